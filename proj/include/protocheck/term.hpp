#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "protocheck/errors.hpp"
#include "protocheck/literal.hpp"

namespace protocheck {

/// Three-valued transactionality. Unknown is first-class: it is what the
/// lossy reverse mapping produces, so lossiness stays observable.
enum class TriBool { False, True, Unknown };

Json tribool_to_json(TriBool t);
TriBool tribool_from_json(const Json& j);

struct SlotDef {
  std::string name;
  std::string type_name;  // string | integer | number | boolean | date
  std::string description;
  std::vector<std::string> possible_values;  // empty = unconstrained

  friend bool operator==(const SlotDef&, const SlotDef&) = default;
};

struct PropertySpec {
  std::string type_name;
  std::string description;
  std::optional<std::vector<std::string>> enum_values;
  Json extras = Json::object();  // unknown wire keys, re-emitted verbatim

  friend bool operator==(const PropertySpec&, const PropertySpec&) = default;
};

struct JsonSchema {
  std::vector<std::string> required;  // order is meaningful on the wire
  std::map<std::string, PropertySpec> properties;
  Json extras = Json::object();

  bool well_formed() const;  // every required name appears in properties

  friend bool operator==(const JsonSchema&, const JsonSchema&) = default;
};

struct RecoveryStrategy {
  enum class Kind { Retry, Fallback, UserPrompt, Abort };
  Kind kind = Kind::Abort;
  int attempts = 0;     // Retry
  std::string target;   // Fallback tool name
  std::string message;  // UserPrompt

  static RecoveryStrategy retry(int n);
  static RecoveryStrategy fallback(std::string tool);
  static RecoveryStrategy user_prompt(std::string msg);
  static RecoveryStrategy abort();

  friend bool operator==(const RecoveryStrategy&,
                         const RecoveryStrategy&) = default;
};

struct FailureMode {
  std::string error_type;
  RecoveryStrategy recovery;

  friend bool operator==(const FailureMode&, const FailureMode&) = default;
};

enum class SideEffects { Read, Write, Delete, None };
enum class DepRelation { Requires, ProducesInputFor, ExclusiveWith };

struct Dependency {
  std::string tool_name;
  DepRelation relation = DepRelation::Requires;

  friend bool operator==(const Dependency&, const Dependency&) = default;
};

/// Five-principle metadata block of an extended tool. All fields are
/// optional at the wire level; the type checker decides what absence means.
struct ToolMetadata {
  std::optional<SideEffects> side_effects;
  std::optional<bool> requires_approval;
  std::optional<std::vector<FailureMode>> failure_modes;
  std::optional<std::string> summary;
  std::optional<std::vector<Dependency>> dependencies;
  Json extras = Json::object();

  friend bool operator==(const ToolMetadata&, const ToolMetadata&) = default;
};

std::string side_effects_name(SideEffects s);
SideEffects side_effects_from_name(const std::string& s);
std::string relation_name(DepRelation r);
DepRelation relation_from_name(const std::string& s);

// ---------------------------------------------------------------------------
// Process terms
// ---------------------------------------------------------------------------

class ProcessTerm;
using TermPtr = std::shared_ptr<const ProcessTerm>;

struct NilT {
  friend bool operator==(const NilT&, const NilT&) { return true; }
};

struct IntentT {
  std::string name;
  std::string description;
  std::vector<SlotDef> required_slots;
  std::vector<SlotDef> optional_slots;  // kept sorted by name
  TriBool transactional = TriBool::Unknown;
  // Optional schema annotations; sources for error/dependency extraction.
  std::vector<FailureMode> failure_modes;
  std::vector<Dependency> dependencies;

  friend bool operator==(const IntentT&, const IntentT&) = default;
};

struct CollectSlotT {
  std::string slot;
  Literal value;
  TermPtr continuation;

  friend bool operator==(const CollectSlotT&, const CollectSlotT&);
};

/// Pending API invocation on the dialogue side.
struct ExecuteT {
  std::string name;
  Bindings bindings;

  friend bool operator==(const ExecuteT&, const ExecuteT&) = default;
};

struct ToolT {
  std::string name;
  std::string description;
  JsonSchema schema;
  std::optional<ToolMetadata> metadata;  // present = extended tool
  Json extras = Json::object();

  friend bool operator==(const ToolT&, const ToolT&) = default;
};

struct ResourceT {
  std::string uri;
  Literal content;

  friend bool operator==(const ResourceT&, const ResourceT&) = default;
};

struct PromptT {
  std::string template_text;
  Bindings args;

  friend bool operator==(const PromptT&, const PromptT&) = default;
};

struct InitializeT {
  std::vector<std::string> caps;  // sorted, unique

  friend bool operator==(const InitializeT&, const InitializeT&) = default;
};

struct ToolsListT {
  std::vector<TermPtr> tools;      // Tool terms, listing order preserved
  std::vector<std::string> caps;   // negotiated caps, inert data

  friend bool operator==(const ToolsListT&, const ToolsListT&);
};

/// Pending tool invocation. The gate fields realize the approval and
/// dependency handshakes of write-capable / dependent tools.
struct ToolCallT {
  std::string name;
  Bindings params;
  bool gate_approval = false;
  std::vector<std::string> gate_requires;

  friend bool operator==(const ToolCallT&, const ToolCallT&) = default;
};

/// Parameter validation against a schema. `pending_name` threads the tool
/// name to the post-validation state; the gate fields carry the pending
/// tool's handshakes through validation.
struct ValidateT {
  std::string pending_name;
  Bindings params;
  JsonSchema schema;
  bool gate_approval = false;
  std::vector<std::string> gate_requires;

  friend bool operator==(const ValidateT&, const ValidateT&) = default;
};

struct ResultTermT {
  Literal output;
  std::string producer;  // name of the tool/intent that produced it, or ""

  friend bool operator==(const ResultTermT&, const ResultTermT&) = default;
};

struct ErrorTermT {
  std::string error_type;
  std::string message;

  friend bool operator==(const ErrorTermT&, const ErrorTermT&) = default;
};

struct ParT {
  TermPtr left;
  TermPtr right;

  friend bool operator==(const ParT&, const ParT&);
};

struct RestrictT {
  std::string channel;
  TermPtr body;

  friend bool operator==(const RestrictT&, const RestrictT&);
};

struct ReplT {
  TermPtr body;
  int budget = -1;  // -1 = unresolved; exploration substitutes its bound

  friend bool operator==(const ReplT&, const ReplT&);
};

using TermVariant =
    std::variant<NilT, IntentT, CollectSlotT, ExecuteT, ToolT, ResourceT,
                 PromptT, InitializeT, ToolsListT, ToolCallT, ValidateT,
                 ResultTermT, ErrorTermT, ParT, RestrictT, ReplT>;

class ProcessTerm {
 public:
  TermVariant node;
};

template <typename T>
const T* as(const TermPtr& t) {
  return t ? std::get_if<T>(&t->node) : nullptr;
}

// The returned pointer aliases the term; never call on a temporary.
template <typename T>
const T* as(TermPtr&& t) = delete;

template <typename T>
bool is(const TermPtr& t) {
  return as<T>(t) != nullptr;
}

bool term_eq(const TermPtr& a, const TermPtr& b);

// --- builders ---

TermPtr mk(TermVariant&& v);
TermPtr mk_nil();
TermPtr mk_intent(IntentT intent);  // sorts optional slots, checks disjointness
TermPtr mk_collect(std::string slot, Literal value, TermPtr continuation);
TermPtr mk_execute(std::string name, Bindings bindings);
TermPtr mk_tool(ToolT tool);  // checks schema well-formedness
TermPtr mk_resource(std::string uri, Literal content);
TermPtr mk_prompt(std::string template_text, Bindings args);
TermPtr mk_initialize(std::vector<std::string> caps);
TermPtr mk_tools_list(std::vector<TermPtr> tools,
                      std::vector<std::string> caps = {});
TermPtr mk_tool_call(ToolCallT call);
TermPtr mk_validate(ValidateT v);
TermPtr mk_result(Literal output, std::string producer = "");
TermPtr mk_error(std::string error_type, std::string message);
TermPtr mk_par(TermPtr left, TermPtr right);
TermPtr mk_restrict(std::string channel, TermPtr body);
TermPtr mk_repl(TermPtr body, int budget = -1);

// --- classification ---

enum class Calculus { Sgd, Mcp, McpPlus, Shared, Mixed };

Calculus calculus_of(const TermPtr& t);
bool is_pure_sgd(const TermPtr& t);   // SGD or shared-only
bool is_pure_mcp(const TermPtr& t);   // MCP, extended, or shared-only

// --- structural operations ---

/// Canonical form: parallel compositions are flattened to a sorted multiset
/// and re-nested to the right, nil units dropped, and restriction binders
/// renamed to positional names (#0, #1, ...) by nesting depth. Two terms are
/// structurally congruent iff their canonical forms are equal.
TermPtr canonicalize(const TermPtr& t);

/// Replaces free occurrences of slot variable ?slot in value positions by
/// `value`, without capturing restriction-bound channels. Substituting an
/// absent slot is the identity.
TermPtr substitute(const TermPtr& t, const std::string& slot,
                   const Literal& value);

/// Channel names used by the term and not bound by an enclosing restriction.
std::set<std::string> free_names(const TermPtr& t);

std::size_t count_restricts(const TermPtr& t);

/// Equality on all structural fields, ignoring description text (intent,
/// tool, slot and property descriptions). Distinct from plain equality:
/// descriptions are data, not structure, for the non-injectivity analysis.
bool structural_eq(const TermPtr& a, const TermPtr& b);

// --- serialization ---

Json term_to_json(const TermPtr& t);
TermPtr term_from_json(const Json& j);

/// Stable comparison/identity key: dump of the term's JSON encoding.
std::string term_key(const TermPtr& t);

Json metadata_to_json(const ToolMetadata& m);
ToolMetadata metadata_from_json(const Json& j);
Json schema_to_json(const JsonSchema& s);
JsonSchema schema_from_json(const Json& j);
Json failure_mode_to_json(const FailureMode& f);
FailureMode failure_mode_from_json(const Json& j);
Json dependency_to_json(const Dependency& d);
Dependency dependency_from_json(const Json& j);

/// Renders the line-oriented concrete term syntax. parse_term(print_term(t))
/// reproduces t for canonical forms.
std::string print_term(const TermPtr& t);

}  // namespace protocheck
