#pragma once

#include "protocheck/report.hpp"
#include "protocheck/semantics.hpp"

namespace protocheck {

struct TraceViolation {
  std::string property;  // "ApprovalOrdering" | "DependencyOrdering"
  std::vector<TransitionLabel> trace;
  std::size_t position = 0;  // index of the offending execute in the trace

  Json to_json() const;
};

struct ConfinementFinding {
  std::string channel;
  std::string leak_path;
};

/// Approval precedes execution: on every path, each execution of a
/// write/delete-capable tool consumes an approval granted earlier on that
/// path. Approvals are attributed per pending call (a counter per tool name,
/// never a global flag). Truncated systems are inconclusive, never pass.
VerificationReport check_approval_ordering(const Lts& lts,
                                           const McpRegistry& reg);

/// Dependency ordering: for every requires-edge (T depends on U), no path
/// executes T before an execution of U. Truncated systems are inconclusive.
VerificationReport check_dependency_ordering(const Lts& lts,
                                             const McpRegistry& reg);

/// Static scope walk: a restriction-bound channel must not occur in a
/// payload that is emitted past the restriction (result outputs, resource
/// contents). A syntactic reduction of the confinement property, sufficient
/// for a calculus without name passing; the report notes the reduction.
std::vector<ConfinementFinding> check_confinement(const TermPtr& term);

/// check_confinement wrapped as a report, scope note included.
VerificationReport confinement_report(const TermPtr& term);

/// Two-sort lint: descriptions, summaries and messages are String-sorted;
/// the check fails if any such string occurs in a Code position (a call or
/// tool name, an effect key, a channel). Injection-marker phrases in
/// descriptions yield advisory warnings, never failures.
VerificationReport check_inert_descriptions(const McpRegistry& reg,
                                            const TermPtr& encoding = nullptr);

/// Path-enumeration oracles for the two trace checks: same per-path
/// predicates, computed by enumerating maximal paths up to the bounds.
VerificationReport approval_ordering_by_paths(const Lts& lts,
                                              const McpRegistry& reg,
                                              std::size_t max_paths = 10000,
                                              std::size_t max_len = 64);
VerificationReport dependency_ordering_by_paths(const Lts& lts,
                                                const McpRegistry& reg,
                                                std::size_t max_paths = 10000,
                                                std::size_t max_len = 64);

/// True when the violation's trace replays on the system from its initial
/// state and the predicate indeed fails at the recorded position.
bool replays(const Lts& lts, const TraceViolation& violation);

}  // namespace protocheck
