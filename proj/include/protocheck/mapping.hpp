#pragma once

#include <optional>

#include "protocheck/registry.hpp"
#include "protocheck/term.hpp"

namespace protocheck {

enum class UndefinedReason {
  NoSgdEquivalentResource,
  NoSgdEquivalentPrompt,
  NoSgdEquivalentInitialize,
  NoSgdEquivalentToolsList,
};

std::string undefined_reason_name(UndefinedReason r);

enum class LossField {
  Transactionality,
  FailureModes,
  Dependencies,
  ApprovalProtocol,
};

std::string loss_field_name(LossField f);

struct LossRecord {
  LossField field;
  std::string detail;
};

/// Outcome of the partial reverse mapping: either a dialogue-calculus term
/// with loss warnings, or the reason no image exists.
struct MapOutcome {
  std::optional<TermPtr> term;
  std::optional<UndefinedReason> undefined;
  std::vector<LossRecord> warnings;

  bool mapped() const { return term.has_value(); }
  Json to_json() const;
};

/// Forward mapping into the tool calculus. Intents become tools over
/// schema(R, O); pending executions become tool calls with re-encoded
/// bindings; shared constructors map homomorphically. The transactionality
/// flag is dropped (no metadata).
TermPtr sgd_to_mcp(const TermPtr& sgd);

/// Partial, lossy reverse mapping. Tools become intents with transactionality
/// unknown; resources, prompts, negotiation and listings have no image, and a
/// composite containing any such component is itself undefined. Rejects
/// extended tools (use mcp_plus_to_sgd).
MapOutcome mcp_to_sgd(const TermPtr& mcp);

/// Metadata-preserving forward mapping. Requires a definite transactionality
/// flag; attaches side effects, approval, failure modes, a first-sentence
/// summary and dependencies.
TermPtr sgd_to_mcp_plus(const TermPtr& sgd);

/// Inverse of the extended mapping. Requires the description plus the
/// side_effects, failure_modes and dependencies fields; a missing field
/// raises MissingMetadata naming it. A missing summary does not block
/// inversion (it is derived, not carried).
TermPtr mcp_plus_to_sgd(const TermPtr& mcp_plus);

/// schema(R, O): required lists R's names in order; properties cover R and O
/// with enum constraints where a slot lists possible values.
JsonSchema schema_from_slots(const std::vector<SlotDef>& required,
                             const std::vector<SlotDef>& optional_slots);

/// Text up to and including the first period followed by whitespace or end
/// of text; the whole text when no such period exists.
std::string first_sentence(const std::string& text);

struct FieldDiff {
  std::string field;
  Json before;
  Json after;
};

enum class RoundTripMode { Plain, Plus };

struct RoundTripReport {
  bool identity = false;
  std::vector<FieldDiff> diff;
  std::vector<LossRecord> warnings;
  Json to_json() const;
};

/// Plain mode: field-level diff between a dialogue term and its image under
/// the reverse of the forward mapping. Plus mode: the metadata-preserving
/// round trip, which must be the identity; over an extended-tool term it
/// additionally checks the opposite composition.
RoundTripReport round_trip_report(const TermPtr& term, RoundTripMode mode);

// Registry-level mapping for the CLI.

McpRegistry map_sgd_registry(const SgdRegistry& reg, bool plus);

struct SgdMapResult {
  std::optional<SgdRegistry> registry;
  std::optional<UndefinedReason> undefined;
  std::vector<LossRecord> warnings;
};

SgdMapResult map_mcp_registry(const McpRegistry& reg, bool plus);

}  // namespace protocheck
