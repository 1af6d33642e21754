#include "protocheck/security.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace protocheck {

Json TraceViolation::to_json() const {
  Json tr = Json::array();
  for (const auto& l : trace) tr.push_back(l.to_json());
  return Json{{"property", property}, {"trace", tr}, {"position", position}};
}

namespace {

constexpr const char* kConfinementNote =
    "syntactic scope check: the calculus has no name passing, so confinement "
    "reduces to an escape scan over emitted payloads";

std::set<std::string> write_capable_names(const McpRegistry& reg) {
  std::set<std::string> out;
  for (const auto& t : reg.tools) {
    const auto* tool = as<ToolT>(t);
    if (!tool || !tool->metadata || !tool->metadata->side_effects) continue;
    SideEffects se = *tool->metadata->side_effects;
    if (se == SideEffects::Write || se == SideEffects::Delete)
      out.insert(tool->name);
  }
  return out;
}

std::map<std::string, std::vector<std::string>> requires_map(
    const McpRegistry& reg) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& t : reg.tools) {
    const auto* tool = as<ToolT>(t);
    if (!tool || !tool->metadata || !tool->metadata->dependencies) continue;
    for (const auto& d : *tool->metadata->dependencies) {
      if (d.relation == DepRelation::Requires)
        out[tool->name].push_back(d.tool_name);
    }
  }
  return out;
}

void awaiting_approval(const TermPtr& t, std::map<std::string, int>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ToolCallT>) {
          if (n.gate_approval) ++out[n.name];
        } else if constexpr (std::is_same_v<T, ParT>) {
          awaiting_approval(n.left, out);
          awaiting_approval(n.right, out);
        } else if constexpr (std::is_same_v<T, RestrictT> ||
                             std::is_same_v<T, ReplT>) {
          awaiting_approval(n.body, out);
        } else if constexpr (std::is_same_v<T, CollectSlotT>) {
          awaiting_approval(n.continuation, out);
        }
      },
      t->node);
}

/// Which pending call did this approval answer? The tool whose
/// awaiting-approval count drops across the transition. Empty when the
/// states carry no such information (hand-built systems).
std::string attribute_approval(const TermPtr& src, const TermPtr& dst) {
  std::map<std::string, int> before, after;
  awaiting_approval(src, before);
  awaiting_approval(dst, after);
  for (const auto& [name, count] : before) {
    auto it = after.find(name);
    int now = it == after.end() ? 0 : it->second;
    if (now < count) return name;
  }
  return "";
}

// Per-path approval discipline. Credits are per tool name; approvals whose
// pending call cannot be attributed become wildcard credits. Counters
// saturate so the configuration space stays finite on cyclic inputs.
struct ApprovalState {
  static constexpr int kCreditCap = 64;

  std::map<std::string, int> credits;
  int wildcard = 0;

  /// Returns false when an execute of a guarded tool has no credit to spend.
  bool apply(const Transition& t, const Lts& lts,
             const std::set<std::string>& guarded) {
    if (t.label.kind == TransitionLabel::Kind::Approval) {
      if (!t.label.confirm) return true;
      std::string name =
          attribute_approval(lts.states[t.src], lts.states[t.dst]);
      if (name.empty()) {
        wildcard = std::min(wildcard + 1, kCreditCap);
      } else {
        int& c = credits[name];
        c = std::min(c + 1, kCreditCap);
      }
      return true;
    }
    if (t.label.kind == TransitionLabel::Kind::Execute &&
        guarded.count(t.label.name)) {
      auto it = credits.find(t.label.name);
      if (it != credits.end() && it->second > 0) {
        --it->second;
        return true;
      }
      if (wildcard > 0) {
        --wildcard;
        return true;
      }
      return false;
    }
    return true;
  }

  std::string key() const {
    std::string k = std::to_string(wildcard);
    for (const auto& [n, c] : credits) {
      if (c > 0) k += "|" + n + "=" + std::to_string(c);
    }
    return k;
  }
};

struct DependencyState {
  std::set<std::string> executed;

  bool apply(const Transition& t,
             const std::map<std::string, std::vector<std::string>>& needed) {
    if (t.label.kind != TransitionLabel::Kind::Execute) return true;
    auto it = needed.find(t.label.name);
    if (it != needed.end()) {
      for (const auto& dep : it->second) {
        if (!executed.count(dep)) return false;
      }
    }
    executed.insert(t.label.name);
    return true;
  }

  std::string key() const {
    std::string k;
    for (const auto& n : executed) k += n + "|";
    return k;
  }
};

/// Forward reachability over (state, discipline) configurations with parent
/// pointers for witness reconstruction.
template <typename State, typename Apply>
std::optional<TraceViolation> search_violation(const Lts& lts,
                                               const char* property,
                                               State init, Apply apply) {
  auto adj = lts.adjacency();
  struct Node {
    std::size_t state;
    State disc;
    std::size_t parent;           // index into nodes
    const Transition* via = nullptr;
  };
  std::vector<Node> nodes;
  std::set<std::string> visited;
  std::deque<std::size_t> queue;

  auto intern = [&](std::size_t state, State disc, std::size_t parent,
                    const Transition* via) {
    std::string key = std::to_string(state) + "#" + disc.key();
    if (!visited.insert(key).second) return;
    nodes.push_back(Node{state, std::move(disc), parent, via});
    queue.push_back(nodes.size() - 1);
  };
  intern(lts.initial, std::move(init), SIZE_MAX, nullptr);

  auto rebuild = [&](std::size_t node_id,
                     const Transition* last) -> TraceViolation {
    std::vector<const Transition*> path;
    path.push_back(last);
    for (std::size_t id = node_id; nodes[id].via != nullptr;
         id = nodes[id].parent)
      path.push_back(nodes[id].via);
    std::reverse(path.begin(), path.end());
    TraceViolation v;
    v.property = property;
    for (const auto* t : path) v.trace.push_back(t->label);
    v.position = v.trace.size() - 1;
    return v;
  };

  while (!queue.empty()) {
    std::size_t id = queue.front();
    queue.pop_front();
    for (const Transition* t : adj[nodes[id].state]) {
      State next = nodes[id].disc;
      if (!apply(next, *t)) return rebuild(id, t);
      intern(t->dst, std::move(next), id, t);
    }
  }
  return std::nullopt;
}

}  // namespace

VerificationReport check_approval_ordering(const Lts& lts,
                                           const McpRegistry& reg) {
  VerificationReport r;
  r.property = "ApprovalOrdering";
  if (lts.truncated) {
    r.status = VerificationReport::Status::Inconclusive;
    r.note = "state space truncated; a safety verdict would not certify";
    return r;
  }
  std::set<std::string> guarded = write_capable_names(reg);
  auto violation = search_violation(
      lts, "ApprovalOrdering", ApprovalState{},
      [&](ApprovalState& s, const Transition& t) {
        return s.apply(t, lts, guarded);
      });
  if (violation) {
    r.status = VerificationReport::Status::Fail;
    r.details = violation->to_json();
  }
  return r;
}

VerificationReport check_dependency_ordering(const Lts& lts,
                                             const McpRegistry& reg) {
  VerificationReport r;
  r.property = "DependencyOrdering";
  if (lts.truncated) {
    r.status = VerificationReport::Status::Inconclusive;
    r.note = "state space truncated; a safety verdict would not certify";
    return r;
  }
  auto requires_edges = requires_map(reg);
  auto violation = search_violation(
      lts, "DependencyOrdering", DependencyState{},
      [&](DependencyState& s, const Transition& t) {
        return s.apply(t, requires_edges);
      });
  if (violation) {
    r.status = VerificationReport::Status::Fail;
    r.details = violation->to_json();
  }
  return r;
}

// ---------------------------------------------------------------------------
// Path-enumeration oracles
// ---------------------------------------------------------------------------

namespace {

template <typename State, typename Apply>
std::optional<TraceViolation> enumerate_paths(const Lts& lts,
                                              const char* property,
                                              std::size_t max_paths,
                                              std::size_t max_len,
                                              State init, Apply apply) {
  auto adj = lts.adjacency();
  struct Frame {
    std::size_t state;
    State disc;
    std::vector<const Transition*> path;
  };
  std::deque<Frame> stack;
  stack.push_back(Frame{lts.initial, std::move(init), {}});
  std::size_t explored = 0;

  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.path.size() >= max_len) continue;
    if (++explored > max_paths)
      throw TooLarge("path enumeration exceeded the budget");
    for (const Transition* t : adj[f.state]) {
      State next = f.disc;
      auto path = f.path;
      path.push_back(t);
      if (!apply(next, *t)) {
        TraceViolation v;
        v.property = property;
        for (const auto* e : path) v.trace.push_back(e->label);
        v.position = v.trace.size() - 1;
        return v;
      }
      stack.push_back(Frame{t->dst, std::move(next), std::move(path)});
    }
  }
  return std::nullopt;
}

}  // namespace

VerificationReport approval_ordering_by_paths(const Lts& lts,
                                              const McpRegistry& reg,
                                              std::size_t max_paths,
                                              std::size_t max_len) {
  VerificationReport r;
  r.property = "ApprovalOrdering(paths)";
  if (lts.truncated) {
    r.status = VerificationReport::Status::Inconclusive;
    return r;
  }
  std::set<std::string> guarded = write_capable_names(reg);
  auto v = enumerate_paths(lts, "ApprovalOrdering", max_paths, max_len,
                           ApprovalState{},
                           [&](ApprovalState& s, const Transition& t) {
                             return s.apply(t, lts, guarded);
                           });
  if (v) {
    r.status = VerificationReport::Status::Fail;
    r.details = v->to_json();
  }
  return r;
}

VerificationReport dependency_ordering_by_paths(const Lts& lts,
                                                const McpRegistry& reg,
                                                std::size_t max_paths,
                                                std::size_t max_len) {
  VerificationReport r;
  r.property = "DependencyOrdering(paths)";
  if (lts.truncated) {
    r.status = VerificationReport::Status::Inconclusive;
    return r;
  }
  auto requires_edges = requires_map(reg);
  auto v = enumerate_paths(lts, "DependencyOrdering", max_paths, max_len,
                           DependencyState{},
                           [&](DependencyState& s, const Transition& t) {
                             return s.apply(t, requires_edges);
                           });
  if (v) {
    r.status = VerificationReport::Status::Fail;
    r.details = v->to_json();
  }
  return r;
}

bool replays(const Lts& lts, const TraceViolation& violation) {
  // Follow the recorded labels from the initial state (the label sequence
  // may be realizable along several state paths).
  auto adj = lts.adjacency();
  std::vector<std::size_t> frontier{lts.initial};
  for (const auto& label : violation.trace) {
    std::vector<std::size_t> next;
    for (std::size_t s : frontier) {
      for (const Transition* t : adj[s]) {
        if (t->label == label) next.push_back(t->dst);
      }
    }
    if (next.empty()) return false;
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }
  if (violation.position >= violation.trace.size()) return false;
  return violation.trace[violation.position].kind ==
         TransitionLabel::Kind::Execute;
}

// ---------------------------------------------------------------------------
// Confinement
// ---------------------------------------------------------------------------

namespace {

void confinement_walk(const TermPtr& t, std::set<std::string>& bound,
                      const std::string& path,
                      std::vector<ConfinementFinding>& out) {
  auto leak = [&](const Literal& l, const std::string& where) {
    if (l.is_chan() && bound.count(l.str()))
      out.push_back(ConfinementFinding{l.str(), path + where});
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ResultTermT>) {
          // Result payloads are emitted to the observer.
          leak(n.output, "result.output");
        } else if constexpr (std::is_same_v<T, ResourceT>) {
          // Resource contents are emitted on read.
          leak(n.content, "resource.content");
        } else if constexpr (std::is_same_v<T, ParT>) {
          confinement_walk(n.left, bound, path + "par[0]/", out);
          confinement_walk(n.right, bound, path + "par[1]/", out);
        } else if constexpr (std::is_same_v<T, RestrictT>) {
          bool inserted = bound.insert(n.channel).second;
          confinement_walk(n.body, bound, path + "restrict(" + n.channel + ")/",
                           out);
          if (inserted) bound.erase(n.channel);
        } else if constexpr (std::is_same_v<T, ReplT>) {
          confinement_walk(n.body, bound, path + "repl/", out);
        } else if constexpr (std::is_same_v<T, CollectSlotT>) {
          confinement_walk(n.continuation, bound, path + "collect/", out);
        } else if constexpr (std::is_same_v<T, ToolsListT>) {
          for (std::size_t i = 0; i < n.tools.size(); ++i)
            confinement_walk(n.tools[i], bound,
                             path + "tools[" + std::to_string(i) + "]/", out);
        }
        // Call parameters and execution bindings stay within the invoking
        // scope: the execute action carries no payload, so a restricted
        // channel used there is the confined pattern, not an escape.
      },
      t->node);
}

}  // namespace

std::vector<ConfinementFinding> check_confinement(const TermPtr& term) {
  std::vector<ConfinementFinding> out;
  std::set<std::string> bound;
  confinement_walk(term, bound, "", out);
  return out;
}

// ---------------------------------------------------------------------------
// Inert descriptions
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string> kInjectionMarkers = {
    "ignore previous instructions", "ignore all previous instructions",
    "disregard previous",           "exfiltrate",
    "system prompt",                "do not tell the user",
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

void collect_strings(const McpRegistry& reg, std::set<std::string>& pool) {
  auto add = [&](const std::string& s) {
    if (!s.empty()) pool.insert(s);
  };
  for (const auto& t : reg.tools) {
    const auto* tool = as<ToolT>(t);
    if (!tool) continue;
    add(tool->description);
    for (const auto& [k, p] : tool->schema.properties) {
      (void)k;
      add(p.description);
    }
    if (tool->metadata) {
      if (tool->metadata->summary) add(*tool->metadata->summary);
      if (tool->metadata->failure_modes) {
        for (const auto& f : *tool->metadata->failure_modes) {
          if (f.recovery.kind == RecoveryStrategy::Kind::UserPrompt)
            add(f.recovery.message);
        }
      }
    }
  }
  for (const auto& t : reg.prompts) {
    const auto* p = as<PromptT>(t);
    if (p) add(p->template_text);
  }
  for (const auto& t : reg.resources) {
    const auto* res = as<ResourceT>(t);
    if (res && res->content.kind() == Literal::Kind::Text)
      add(res->content.str());
  }
}

void code_positions(const TermPtr& t, const std::string& path,
                    std::vector<std::pair<std::string, std::string>>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ToolT>) {
          out.emplace_back(n.name, path + "tool.name");
        } else if constexpr (std::is_same_v<T, ToolCallT>) {
          out.emplace_back(n.name, path + "call.name");
        } else if constexpr (std::is_same_v<T, ExecuteT>) {
          out.emplace_back(n.name, path + "execute.name");
        } else if constexpr (std::is_same_v<T, ValidateT>) {
          out.emplace_back(n.pending_name, path + "validate.name");
        } else if constexpr (std::is_same_v<T, RestrictT>) {
          out.emplace_back(n.channel, path + "restrict.channel");
          code_positions(n.body, path + "restrict/", out);
        } else if constexpr (std::is_same_v<T, ParT>) {
          code_positions(n.left, path + "par[0]/", out);
          code_positions(n.right, path + "par[1]/", out);
        } else if constexpr (std::is_same_v<T, ReplT>) {
          code_positions(n.body, path + "repl/", out);
        } else if constexpr (std::is_same_v<T, CollectSlotT>) {
          code_positions(n.continuation, path + "collect/", out);
        } else if constexpr (std::is_same_v<T, ToolsListT>) {
          for (std::size_t i = 0; i < n.tools.size(); ++i)
            code_positions(n.tools[i], path + "tools[" + std::to_string(i) + "]/",
                           out);
        }
      },
      t->node);
}

}  // namespace

VerificationReport check_inert_descriptions(const McpRegistry& reg,
                                            const TermPtr& encoding) {
  VerificationReport r;
  r.property = "InertDescriptions";
  r.note =
      "the guarantee is the sort separation; the marker scan is advisory "
      "only";

  std::set<std::string> pool;
  collect_strings(reg, pool);

  TermPtr term = encoding ? encoding : registry_process(reg);
  std::vector<std::pair<std::string, std::string>> positions;
  code_positions(term, "", positions);

  Json violations = Json::array();
  for (const auto& [value, where] : positions) {
    if (pool.count(value)) {
      violations.push_back(
          Json{{"value", value}, {"position", where},
               {"reason", "String-sorted text in a Code position"}});
    }
  }

  Json warnings = Json::array();
  for (const auto& s : pool) {
    std::string low = lower(s);
    for (const auto& marker : kInjectionMarkers) {
      if (low.find(marker) != std::string::npos) {
        warnings.push_back(Json{{"text", s}, {"marker", marker}});
        break;
      }
    }
  }

  if (!violations.empty()) {
    r.status = VerificationReport::Status::Fail;
    r.details["violations"] = violations;
  }
  if (!warnings.empty()) r.details["advisory_warnings"] = warnings;
  return r;
}

VerificationReport confinement_report(const TermPtr& term) {
  VerificationReport r;
  r.property = "Confinement";
  r.note = kConfinementNote;
  auto findings = check_confinement(term);
  if (!findings.empty()) {
    r.status = VerificationReport::Status::Fail;
    Json arr = Json::array();
    for (const auto& f : findings)
      arr.push_back(Json{{"channel", f.channel}, {"leak_path", f.leak_path}});
    r.details["findings"] = arr;
  }
  return r;
}

}  // namespace protocheck
