#pragma once

#include "protocheck/registry.hpp"

namespace protocheck {

struct TypecheckConfig {
  double tau = 0.3;            // semantic-density threshold
  double summary_ratio = 0.1;  // |summary| < ratio * |description|, in tokens
  double invoked_fraction = 0.1;  // fraction of tools priced at full detail
};

/// Lowercased word list: the text is split on every non-alphanumeric
/// character and empty pieces are dropped. Deterministic; the unit for all
/// length bounds here.
std::vector<std::string> tokens(const std::string& s);

/// Deterministic entity count: items of a parenthesized "e.g." list, plus
/// all-caps tokens (length 2..5, not leading, not already inside such a
/// list), plus numeric comparison constraints (>100, <=5), plus
/// double-quoted mentions. Each token counts at most once.
int entities(const std::string& s);

/// entities / max(1, tokens); empty text has density 0.
double semantic_density(const std::string& s);

struct RuleVerdict {
  std::string principle;  // "P1".."P5"
  bool pass = false;
  Json details = Json::object();
  std::string necessity;  // what breaks when this principle is absent

  Json to_json() const;
};

/// P1, semantic completeness: the tool description and every property
/// description meet the density threshold.
RuleVerdict check_p1(const ToolT& tool, const TypecheckConfig& cfg);

/// P2, explicit action boundaries: write/delete-capable tools declare
/// requires_approval; metadata absence always fails.
RuleVerdict check_p2(const ToolT& tool);

/// P3, failure-mode documentation: non-empty, pairwise-distinct error types,
/// fallback targets resolve in the registry.
RuleVerdict check_p3(const ToolT& tool, const McpRegistry& reg);

/// P4, progressive disclosure: a non-empty summary strictly under the token
/// ratio.
RuleVerdict check_p4(const ToolT& tool, const TypecheckConfig& cfg);

/// P5, inter-tool relationships: every tool declares its dependencies, all
/// targets resolve, the requires-graph is acyclic, and no pair is both
/// required and mutually exclusive.
RuleVerdict check_p5(const McpRegistry& reg);

struct TokenReport {
  std::size_t baseline = 0;
  std::size_t progressive = 0;
  double ratio = 0.0;
  bool flag = false;       // ratio < 0.2
  bool degenerate = false; // zero-length baseline
  Json to_json() const;
};

/// Two-level disclosure budget: baseline prices every full description;
/// progressive prices all summaries plus the ceil(k*N) largest descriptions
/// (worst case). Throws MissingSummary for any tool without one.
TokenReport token_report(const McpRegistry& reg, const TypecheckConfig& cfg);

struct ToolReport {
  std::string name;
  std::vector<RuleVerdict> verdicts;  // P1..P4
  bool pass = false;
};

struct TypecheckReport {
  bool pass = false;
  std::vector<ToolReport> tools;
  RuleVerdict p5;
  std::optional<TokenReport> token_budget;
  std::vector<std::string> missing_summaries;

  Json to_json() const;
  std::string to_text() const;
};

TypecheckReport typecheck_registry(const McpRegistry& reg,
                                   const TypecheckConfig& cfg);

}  // namespace protocheck
