#pragma once

#include "protocheck/semantics.hpp"

namespace protocheck {

/// Label equivalence classes for cross-calculus comparison. Invocation and
/// call labels with equal name/params share a class; slot collection and
/// internal steps are silent; execution labels share one class. Read, list,
/// approval, requires and detail have no cross-calculus partner and are
/// self-equivalent only.
struct ActionClass {
  enum class Kind {
    Invoke,
    Silent,
    Execute,
    Result,
    Error,
    Read,
    List,
    Approval,
    Requires,
    Detail,
  };

  Kind kind = Kind::Silent;
  std::string name;        // Invoke, Detail
  Bindings params;         // Invoke
  Literal output;          // Result
  std::string error_type;  // Error
  std::string message;     // Error
  std::string uri;         // Read
  bool confirm = false;    // Approval

  friend bool operator==(const ActionClass&, const ActionClass&) = default;

  bool silent() const { return kind == Kind::Silent; }
  std::string key() const;
  std::string print() const;
};

/// Total on transition labels. With unify_errors, the missing-slots and
/// validation error types collapse into one shared class; the strict default
/// keeps them distinct.
ActionClass normalize_label(const TransitionLabel& label, bool unify_errors);

enum class BisimMode { Strong, Weak };

struct EquivalenceVerdict {
  bool equivalent = false;
  bool inconclusive = false;  // an input system was truncated

  /// Trace-equivalence witness: an observable class sequence produced by
  /// exactly one side.
  struct TraceWitness {
    std::vector<ActionClass> sequence;
    bool produced_by_a = false;
  };
  std::optional<TraceWitness> trace_witness;

  /// Bisimulation witness: a reachable state pair and an action one side
  /// can take that the other cannot match into equivalent successors,
  /// together with the matched lead-in from the initial states.
  struct PairWitness {
    std::size_t state_a = 0;
    std::size_t state_b = 0;
    ActionClass action;
    bool action_on_a = true;
    std::vector<ActionClass> lead_in;
  };
  std::optional<PairWitness> pair_witness;

  Json to_json() const;
};

/// Partition-refinement bisimulation check over the disjoint union with
/// normalized labels. Weak mode saturates silent steps first (a visible move
/// may absorb silent steps on both sides; a silent move may be matched by
/// staying put).
EquivalenceVerdict bisimilar(const Lts& a, const Lts& b, BisimMode mode,
                             bool unify_errors);

/// Independent oracle: greatest fixpoint by iterated refinement from the
/// full relation over state pairs. Must agree with bisimilar everywhere.
EquivalenceVerdict brute_force_bisim(const Lts& a, const Lts& b, BisimMode mode,
                                     bool unify_errors);

/// Compares normalized observable trace sets (silent steps erased) up to
/// max_len; the witness is a sequence in the symmetric difference.
EquivalenceVerdict trace_equivalent(const Lts& a, const Lts& b,
                                    std::size_t max_len, bool unify_errors);

}  // namespace protocheck
