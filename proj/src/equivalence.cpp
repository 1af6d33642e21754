#include "protocheck/equivalence.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace protocheck {

std::string ActionClass::key() const {
  Json j = Json::object();
  switch (kind) {
    case Kind::Invoke:
      j["k"] = "invoke";
      j["name"] = name;
      j["params"] = bindings_to_json(params);
      break;
    case Kind::Silent:
      j["k"] = "silent";
      break;
    case Kind::Execute:
      j["k"] = "execute";
      break;
    case Kind::Result:
      j["k"] = "result";
      j["output"] = output.to_json();
      break;
    case Kind::Error:
      j["k"] = "error";
      j["type"] = error_type;
      j["message"] = message;
      break;
    case Kind::Read:
      j["k"] = "read";
      j["uri"] = uri;
      break;
    case Kind::List:
      j["k"] = "list";
      break;
    case Kind::Approval:
      j["k"] = "approval";
      j["confirm"] = confirm;
      break;
    case Kind::Requires:
      j["k"] = "requires";
      break;
    case Kind::Detail:
      j["k"] = "detail";
      j["name"] = name;
      break;
  }
  return j.dump();
}

std::string ActionClass::print() const {
  switch (kind) {
    case Kind::Invoke:
      return "invoke(" + name + ", " + encode_bindings(params) + ")";
    case Kind::Silent:
      return "tau";
    case Kind::Execute:
      return "execute";
    case Kind::Result:
      return "result(" + output.print() + ")";
    case Kind::Error:
      return "error(" + error_type + ", " + message + ")";
    case Kind::Read:
      return "read(" + uri + ")";
    case Kind::List:
      return "list";
    case Kind::Approval:
      return confirm ? "approval(true)" : "approval(false)";
    case Kind::Requires:
      return "requires";
    case Kind::Detail:
      return "detail(" + name + ")";
  }
  return "";
}

ActionClass normalize_label(const TransitionLabel& label, bool unify_errors) {
  ActionClass c;
  using K = TransitionLabel::Kind;
  switch (label.kind) {
    case K::Invoke:
    case K::Call:
      c.kind = ActionClass::Kind::Invoke;
      c.name = label.name;
      c.params = label.params;
      break;
    case K::Collect:
    case K::Tau:
      c.kind = ActionClass::Kind::Silent;
      break;
    case K::Execute:
      c.kind = ActionClass::Kind::Execute;
      break;
    case K::Result:
      c.kind = ActionClass::Kind::Result;
      c.output = label.output;
      break;
    case K::Error:
      c.kind = ActionClass::Kind::Error;
      c.error_type = label.error_type;
      if (unify_errors && (label.error_type == "MissingSlots" ||
                           label.error_type == "ValidationError"))
        c.error_type = "MissingRequired";
      c.message = label.message;
      break;
    case K::Read:
      c.kind = ActionClass::Kind::Read;
      c.uri = label.uri;
      break;
    case K::List:
      c.kind = ActionClass::Kind::List;
      break;
    case K::Approval:
      c.kind = ActionClass::Kind::Approval;
      c.confirm = label.confirm;
      break;
    case K::Requires:
      c.kind = ActionClass::Kind::Requires;
      break;
    case K::Detail:
      c.kind = ActionClass::Kind::Detail;
      c.name = label.name;
      break;
  }
  return c;
}

Json EquivalenceVerdict::to_json() const {
  Json j = Json::object();
  j["equivalent"] = equivalent;
  j["inconclusive"] = inconclusive;
  if (trace_witness) {
    Json seq = Json::array();
    for (const auto& c : trace_witness->sequence) seq.push_back(c.print());
    j["trace_witness"] =
        Json{{"sequence", seq},
             {"side", trace_witness->produced_by_a ? "a" : "b"}};
  }
  if (pair_witness) {
    Json lead = Json::array();
    for (const auto& c : pair_witness->lead_in) lead.push_back(c.print());
    j["pair_witness"] = Json{{"state_a", pair_witness->state_a},
                             {"state_b", pair_witness->state_b},
                             {"action", pair_witness->action.print()},
                             {"side", pair_witness->action_on_a ? "a" : "b"},
                             {"lead_in", lead}};
  }
  return j;
}

// ---------------------------------------------------------------------------
// Normalized (and optionally saturated) edge representation
// ---------------------------------------------------------------------------

namespace {

struct Edge {
  std::size_t src;
  std::size_t cls;  // index into the class table
  std::size_t dst;
};

struct NormalizedSystem {
  std::size_t n_states = 0;
  std::vector<Edge> edges;
  std::vector<ActionClass> classes;
  std::size_t silent_class = SIZE_MAX;

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out;  // (cls, dst)

  void index() {
    out.assign(n_states, {});
    for (const auto& e : edges) out[e.src].emplace_back(e.cls, e.dst);
    for (auto& v : out) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  }
};

NormalizedSystem normalize(const Lts& lts, bool unify_errors,
                           std::map<std::string, std::size_t>& class_ids,
                           std::vector<ActionClass>& class_table) {
  NormalizedSystem sys;
  sys.n_states = lts.states.size();
  auto intern = [&](const ActionClass& c) {
    std::string k = c.key();
    auto it = class_ids.find(k);
    if (it != class_ids.end()) return it->second;
    std::size_t id = class_table.size();
    class_table.push_back(c);
    class_ids.emplace(std::move(k), id);
    return id;
  };
  for (const auto& t : lts.transitions) {
    ActionClass c = normalize_label(t.label, unify_errors);
    sys.edges.push_back(Edge{t.src, intern(c), t.dst});
  }
  return sys;
}

/// Weak saturation: for observable classes, tau* . a . tau*; the silent
/// class becomes reachability by silent steps, including staying put.
void saturate(NormalizedSystem& sys, std::size_t silent_cls) {
  std::vector<std::vector<std::size_t>> silent_adj(sys.n_states);
  for (const auto& e : sys.edges) {
    if (e.cls == silent_cls) silent_adj[e.src].push_back(e.dst);
  }
  // Silent-step closure per state.
  std::vector<std::vector<std::size_t>> closure(sys.n_states);
  for (std::size_t s = 0; s < sys.n_states; ++s) {
    std::vector<bool> seen(sys.n_states, false);
    std::deque<std::size_t> q{s};
    seen[s] = true;
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop_front();
      closure[s].push_back(u);
      for (std::size_t v : silent_adj[u]) {
        if (!seen[v]) {
          seen[v] = true;
          q.push_back(v);
        }
      }
    }
  }

  std::vector<Edge> weak;
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> dedupe;
  auto add = [&](std::size_t src, std::size_t cls, std::size_t dst) {
    if (dedupe.insert({src, cls, dst}).second)
      weak.push_back(Edge{src, cls, dst});
  };
  for (std::size_t s = 0; s < sys.n_states; ++s) {
    // s ==tau==> t includes zero steps.
    for (std::size_t t : closure[s]) add(s, silent_cls, t);
    for (std::size_t mid : closure[s]) {
      for (const auto& e : sys.edges) {
        if (e.src != mid || e.cls == silent_cls) continue;
        for (std::size_t t : closure[e.dst]) add(s, e.cls, t);
      }
    }
  }
  sys.edges = std::move(weak);
}

struct CombinedSystem {
  NormalizedSystem sys;        // states of a, then states of b shifted
  std::size_t offset_b = 0;
  std::size_t init_a = 0, init_b = 0;
  std::vector<ActionClass> classes;
};

CombinedSystem combine(const Lts& a, const Lts& b, BisimMode mode,
                       bool unify_errors) {
  CombinedSystem out;
  std::map<std::string, std::size_t> class_ids;
  NormalizedSystem sa = normalize(a, unify_errors, class_ids, out.classes);
  NormalizedSystem sb = normalize(b, unify_errors, class_ids, out.classes);

  // The silent class participates even when absent from the labels: weak
  // saturation always adds stay-put silent moves.
  ActionClass silent;
  silent.kind = ActionClass::Kind::Silent;
  std::string sk = silent.key();
  auto it = class_ids.find(sk);
  std::size_t silent_cls;
  if (it == class_ids.end()) {
    silent_cls = out.classes.size();
    out.classes.push_back(silent);
    class_ids.emplace(sk, silent_cls);
  } else {
    silent_cls = it->second;
  }

  if (mode == BisimMode::Weak) {
    saturate(sa, silent_cls);
    saturate(sb, silent_cls);
  }

  out.offset_b = sa.n_states;
  out.init_a = a.initial;
  out.init_b = out.offset_b + b.initial;
  out.sys.n_states = sa.n_states + sb.n_states;
  out.sys.silent_class = silent_cls;
  out.sys.edges = sa.edges;
  for (const auto& e : sb.edges)
    out.sys.edges.push_back(
        Edge{e.src + out.offset_b, e.cls, e.dst + out.offset_b});
  out.sys.classes = out.classes;
  out.sys.index();
  return out;
}

// ---------------------------------------------------------------------------
// Partition refinement (signature splitting)
// ---------------------------------------------------------------------------

std::vector<std::size_t> refine_partition(const NormalizedSystem& sys) {
  std::vector<std::size_t> block(sys.n_states, 0);
  std::size_t n_blocks = 1;
  while (true) {
    std::map<std::pair<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>,
             std::size_t>
        sig_ids;
    std::vector<std::size_t> next(sys.n_states);
    for (std::size_t s = 0; s < sys.n_states; ++s) {
      std::vector<std::pair<std::size_t, std::size_t>> sig;
      for (const auto& [cls, dst] : sys.out[s]) sig.emplace_back(cls, block[dst]);
      std::sort(sig.begin(), sig.end());
      sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
      auto key = std::make_pair(block[s], std::move(sig));
      auto [it, inserted] = sig_ids.emplace(std::move(key), sig_ids.size());
      (void)inserted;
      next[s] = it->second;
    }
    std::size_t next_blocks = sig_ids.size();
    if (next_blocks == n_blocks) return block;
    block = std::move(next);
    n_blocks = next_blocks;
  }
}

// ---------------------------------------------------------------------------
// Pair-relation fixpoint (oracle) and witness extraction
// ---------------------------------------------------------------------------

struct PairTable {
  std::size_t na = 0, nb = 0;
  std::vector<char> related;        // na * nb
  std::vector<std::size_t> rank;    // iteration at which the pair dropped

  bool get(std::size_t i, std::size_t j) const { return related[i * nb + j]; }
};

bool matched(const NormalizedSystem& sa, const NormalizedSystem& sb,
             const PairTable& t, std::size_t i, std::size_t j) {
  for (const auto& [cls, dst_a] : sa.out[i]) {
    bool ok = false;
    for (const auto& [cls_b, dst_b] : sb.out[j]) {
      if (cls_b == cls && t.get(dst_a, dst_b)) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  for (const auto& [cls, dst_b] : sb.out[j]) {
    bool ok = false;
    for (const auto& [cls_a, dst_a] : sa.out[i]) {
      if (cls_a == cls && t.get(dst_a, dst_b)) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

PairTable pair_fixpoint(const NormalizedSystem& sa, const NormalizedSystem& sb) {
  PairTable t;
  t.na = sa.n_states;
  t.nb = sb.n_states;
  t.related.assign(t.na * t.nb, 1);
  t.rank.assign(t.na * t.nb, SIZE_MAX);
  bool changed = true;
  std::size_t round = 0;
  while (changed) {
    changed = false;
    ++round;
    for (std::size_t i = 0; i < t.na; ++i) {
      for (std::size_t j = 0; j < t.nb; ++j) {
        if (!t.related[i * t.nb + j]) continue;
        if (!matched(sa, sb, t, i, j)) {
          t.related[i * t.nb + j] = 0;
          t.rank[i * t.nb + j] = round;
          changed = true;
        }
      }
    }
  }
  return t;
}

/// Builds a distinguishing play from a dropped pair: attacker moves so that
/// every defender reply lands on a pair dropped strictly earlier.
EquivalenceVerdict::PairWitness extract_witness(const NormalizedSystem& sa,
                                                const NormalizedSystem& sb,
                                                const PairTable& t,
                                                const std::vector<ActionClass>& classes,
                                                std::size_t i0, std::size_t j0) {
  EquivalenceVerdict::PairWitness w;
  std::size_t i = i0, j = j0;
  std::vector<ActionClass> lead;
  while (true) {
    std::size_t rank = t.rank[i * t.nb + j];
    // Try an attack on side a.
    for (const auto& [cls, dst_a] : sa.out[i]) {
      bool all_below = true;
      bool any_reply = false;
      std::size_t best_dst = 0, best_rank = 0;
      for (const auto& [cls_b, dst_b] : sb.out[j]) {
        if (cls_b != cls) continue;
        any_reply = true;
        std::size_t r = t.rank[dst_a * t.nb + dst_b];
        if (t.get(dst_a, dst_b) || r >= rank) {
          all_below = false;
          break;
        }
        if (r >= best_rank) {
          best_rank = r;
          best_dst = dst_b;
        }
      }
      if (!any_reply) {
        w.state_a = i;
        w.state_b = j;
        w.action = classes[cls];
        w.action_on_a = true;
        w.lead_in = lead;
        return w;
      }
      if (all_below) {
        lead.push_back(classes[cls]);
        i = dst_a;
        j = best_dst;
        goto descend;
      }
    }
    // Attack on side b.
    for (const auto& [cls, dst_b] : sb.out[j]) {
      bool all_below = true;
      bool any_reply = false;
      std::size_t best_dst = 0, best_rank = 0;
      for (const auto& [cls_a, dst_a] : sa.out[i]) {
        if (cls_a != cls) continue;
        any_reply = true;
        std::size_t r = t.rank[dst_a * t.nb + dst_b];
        if (t.get(dst_a, dst_b) || r >= rank) {
          all_below = false;
          break;
        }
        if (r >= best_rank) {
          best_rank = r;
          best_dst = dst_a;
        }
      }
      if (!any_reply) {
        w.state_a = i;
        w.state_b = j;
        w.action = classes[cls];
        w.action_on_a = false;
        w.lead_in = lead;
        return w;
      }
      if (all_below) {
        lead.push_back(classes[cls]);
        j = dst_b;
        i = best_dst;
        goto descend;
      }
    }
    // No strictly-descending attack found (should not happen); report here.
    w.state_a = i;
    w.state_b = j;
    w.action = ActionClass{};
    w.lead_in = lead;
    return w;
  descend:
    continue;
  }
}

std::pair<NormalizedSystem, NormalizedSystem> normalized_pair(
    const Lts& a, const Lts& b, BisimMode mode, bool unify_errors,
    std::vector<ActionClass>& classes) {
  std::map<std::string, std::size_t> class_ids;
  NormalizedSystem sa = normalize(a, unify_errors, class_ids, classes);
  NormalizedSystem sb = normalize(b, unify_errors, class_ids, classes);
  ActionClass silent;
  silent.kind = ActionClass::Kind::Silent;
  std::string sk = silent.key();
  std::size_t silent_cls;
  auto it = class_ids.find(sk);
  if (it == class_ids.end()) {
    silent_cls = classes.size();
    classes.push_back(silent);
    class_ids.emplace(sk, silent_cls);
  } else {
    silent_cls = it->second;
  }
  if (mode == BisimMode::Weak) {
    saturate(sa, silent_cls);
    saturate(sb, silent_cls);
  }
  sa.index();
  sb.index();
  return {std::move(sa), std::move(sb)};
}

}  // namespace

EquivalenceVerdict bisimilar(const Lts& a, const Lts& b, BisimMode mode,
                             bool unify_errors) {
  EquivalenceVerdict v;
  v.inconclusive = a.truncated || b.truncated;

  CombinedSystem cs = combine(a, b, mode, unify_errors);
  std::vector<std::size_t> block = refine_partition(cs.sys);
  v.equivalent = block[cs.init_a] == block[cs.init_b];
  if (!v.equivalent) {
    // The pair table replays the refinement on pairs to explain the split.
    std::vector<ActionClass> classes;
    auto [sa, sb] = normalized_pair(a, b, mode, unify_errors, classes);
    PairTable t = pair_fixpoint(sa, sb);
    if (!t.get(a.initial, b.initial))
      v.pair_witness =
          extract_witness(sa, sb, t, classes, a.initial, b.initial);
  }
  return v;
}

EquivalenceVerdict brute_force_bisim(const Lts& a, const Lts& b,
                                     BisimMode mode, bool unify_errors) {
  if (a.states.size() * b.states.size() > 1000000)
    throw TooLarge("state-pair space exceeds 10^6");
  EquivalenceVerdict v;
  v.inconclusive = a.truncated || b.truncated;
  std::vector<ActionClass> classes;
  auto [sa, sb] = normalized_pair(a, b, mode, unify_errors, classes);
  PairTable t = pair_fixpoint(sa, sb);
  v.equivalent = t.get(a.initial, b.initial);
  if (!v.equivalent)
    v.pair_witness = extract_witness(sa, sb, t, classes, a.initial, b.initial);
  return v;
}

// ---------------------------------------------------------------------------
// Trace equivalence
// ---------------------------------------------------------------------------

namespace {

std::set<std::vector<std::string>> observable_traces(
    const Lts& lts, std::size_t max_len, bool unify_errors,
    std::map<std::string, ActionClass>& legend) {
  // Determinized walk over silent-closed state sets.
  std::vector<std::vector<std::size_t>> silent_adj(lts.states.size());
  std::vector<std::vector<std::pair<std::string, std::size_t>>> obs_adj(
      lts.states.size());
  for (const auto& t : lts.transitions) {
    ActionClass c = normalize_label(t.label, unify_errors);
    if (c.silent()) {
      silent_adj[t.src].push_back(t.dst);
    } else {
      std::string k = c.key();
      legend.emplace(k, c);
      obs_adj[t.src].emplace_back(std::move(k), t.dst);
    }
  }
  auto close = [&](std::set<std::size_t> states) {
    std::deque<std::size_t> q(states.begin(), states.end());
    while (!q.empty()) {
      std::size_t s = q.front();
      q.pop_front();
      for (std::size_t t : silent_adj[s]) {
        if (states.insert(t).second) q.push_back(t);
      }
    }
    return states;
  };

  std::set<std::vector<std::string>> out;
  struct Item {
    std::set<std::size_t> states;
    std::vector<std::string> seq;
  };
  std::deque<Item> queue;
  queue.push_back({close({lts.initial}), {}});
  out.insert({});
  std::set<std::pair<std::vector<std::size_t>, std::vector<std::string>>> seen;

  while (!queue.empty()) {
    Item item = std::move(queue.front());
    queue.pop_front();
    if (item.seq.size() >= max_len) continue;
    std::map<std::string, std::set<std::size_t>> step;
    for (std::size_t s : item.states) {
      for (const auto& [k, dst] : obs_adj[s]) step[k].insert(dst);
    }
    for (auto& [k, dsts] : step) {
      auto seq = item.seq;
      seq.push_back(k);
      out.insert(seq);
      auto closed = close(std::move(dsts));
      std::vector<std::size_t> sig(closed.begin(), closed.end());
      if (seen.insert({std::move(sig), seq}).second)
        queue.push_back({std::move(closed), std::move(seq)});
    }
  }
  return out;
}

}  // namespace

EquivalenceVerdict trace_equivalent(const Lts& a, const Lts& b,
                                    std::size_t max_len, bool unify_errors) {
  EquivalenceVerdict v;
  v.inconclusive = a.truncated || b.truncated;
  std::map<std::string, ActionClass> legend;
  auto ta = observable_traces(a, max_len, unify_errors, legend);
  auto tb = observable_traces(b, max_len, unify_errors, legend);
  v.equivalent = ta == tb;
  if (!v.equivalent) {
    std::vector<std::vector<std::string>> only_a, only_b;
    std::set_difference(ta.begin(), ta.end(), tb.begin(), tb.end(),
                        std::back_inserter(only_a));
    std::set_difference(tb.begin(), tb.end(), ta.begin(), ta.end(),
                        std::back_inserter(only_b));
    auto shortest = [](const std::vector<std::vector<std::string>>& v) {
      return std::min_element(v.begin(), v.end(),
                              [](const auto& x, const auto& y) {
                                if (x.size() != y.size())
                                  return x.size() < y.size();
                                return x < y;
                              });
    };
    EquivalenceVerdict::TraceWitness w;
    const std::vector<std::string>* pick = nullptr;
    if (!only_a.empty() &&
        (only_b.empty() || shortest(only_a)->size() <= shortest(only_b)->size())) {
      pick = &*shortest(only_a);
      w.produced_by_a = true;
    } else {
      pick = &*shortest(only_b);
      w.produced_by_a = false;
    }
    for (const auto& k : *pick) w.sequence.push_back(legend.at(k));
    v.trace_witness = std::move(w);
  }
  return v;
}

}  // namespace protocheck
