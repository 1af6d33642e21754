#pragma once

#include <functional>
#include <vector>

#include "protocheck/registry.hpp"
#include "protocheck/term.hpp"

namespace protocheck {

enum class TauReason { Validate, Negotiate, Collect };

/// Observable and silent actions of both calculi. Dialogue terms emit
/// invoke/collect/execute/result/error; tool-protocol terms emit
/// call/tau/execute/result/error/read/list; extended-tool encodings may add
/// approval, requires and detail.
struct TransitionLabel {
  enum class Kind {
    Invoke,
    Collect,
    Call,
    Tau,
    Approval,
    Requires,
    Execute,
    Result,
    Error,
    Read,
    List,
    Detail,
  };

  Kind kind = Kind::Tau;
  std::string name;        // Invoke/Call/Execute/Detail
  Bindings params;         // Invoke/Call
  std::string slot;        // Collect
  Literal value;           // Collect
  TauReason reason = TauReason::Validate;  // Tau
  bool confirm = false;    // Approval
  std::string token;       // Requires
  Literal output;          // Result
  std::string error_type;  // Error
  std::string message;     // Error
  std::string uri;         // Read
  std::string filter;      // List

  static TransitionLabel invoke(std::string name, Bindings params);
  static TransitionLabel collect(std::string slot, Literal value);
  static TransitionLabel call(std::string name, Bindings params);
  static TransitionLabel tau(TauReason reason);
  static TransitionLabel approval(bool confirm);
  static TransitionLabel requires_token(std::string token);
  static TransitionLabel execute(std::string name);
  static TransitionLabel result(Literal output);
  static TransitionLabel error(std::string type, std::string message);
  static TransitionLabel read(std::string uri);
  static TransitionLabel list(std::string filter);
  static TransitionLabel detail(std::string name);

  friend bool operator==(const TransitionLabel&,
                         const TransitionLabel&) = default;

  Json to_json() const;
  static TransitionLabel from_json(const Json& j);
  std::string key() const;  // stable ordering key
  std::string print() const;
};

struct Transition {
  std::size_t src = 0;
  TransitionLabel label;
  std::size_t dst = 0;
};

/// A finite labeled transition system over canonical terms. No two states
/// are structurally congruent.
struct Lts {
  std::vector<TermPtr> states;
  std::size_t initial = 0;
  std::vector<Transition> transitions;
  bool truncated = false;

  std::vector<std::vector<const Transition*>> adjacency() const;

  Json to_json() const;
  static Lts from_json(const Json& j);
  std::string to_dot() const;
};

/// Finite exploration driver. The paper-level transition systems range over
/// all parameter maps; bounded exploration needs a concrete driver set, and
/// the effect oracle is the deterministic stand-in for real API execution.
struct ExploreConfig {
  std::size_t max_states = 10000;
  int repl_unfold_bound = 2;
  std::map<std::string, std::vector<Bindings>> param_universe;
  std::function<Literal(const std::string&, const Bindings&)> effect_oracle;
  std::vector<TermPtr> available_tools;   // exposed after negotiation
  std::vector<std::string> server_caps;   // intersected with client caps
  std::vector<std::string> list_filters{""};

  ExploreConfig();
};

using Successor = std::pair<TransitionLabel, TermPtr>;

/// Successors licensed by the dialogue-calculus rules. Targets are
/// canonical; the list is duplicate-free and sorted by label then target.
std::vector<Successor> sgd_step(const TermPtr& term, const ExploreConfig& cfg);

/// Successors licensed by the tool-protocol rules, including the approval
/// and dependency handshakes of extended tools.
std::vector<Successor> mcp_step(const TermPtr& term, const ExploreConfig& cfg);

/// Breadth-first closure over canonical successors until saturation or
/// max_states; replication contributes at most repl_unfold_bound copies.
/// `truncated` is set whenever any bound was hit.
Lts build_lts(const TermPtr& term, const ExploreConfig& cfg);

struct TraceSet {
  std::vector<std::vector<TransitionLabel>> sequences;
  bool partial = false;
};

/// All label sequences of length <= max_len from the initial state.
TraceSet traces(const Lts& lts, std::size_t max_len);

/// Parameter conformance: every required key present, every provided value
/// with an enum constraint a member of that enum. Violations (sorted) are
/// appended to *violations when given.
bool conforms(const Bindings& params, const JsonSchema& schema,
              std::vector<std::string>* violations = nullptr);

/// One conforming and one deficient parameter map per intent/tool name,
/// enum-respecting. The deficient map drops the last required key (or is the
/// empty map when nothing is required).
ExploreConfig default_universe_for(const McpRegistry& reg);
ExploreConfig default_universe_for(const SgdRegistry& reg);
/// Same synthesis for every intent and tool reachable in a bare term.
ExploreConfig default_universe_for_term(const TermPtr& term);
Bindings conforming_params(const JsonSchema& schema);

}  // namespace protocheck
