#include "protocheck/semantics.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace protocheck {

TransitionLabel TransitionLabel::invoke(std::string name, Bindings params) {
  TransitionLabel l;
  l.kind = Kind::Invoke;
  l.name = std::move(name);
  l.params = std::move(params);
  return l;
}

TransitionLabel TransitionLabel::collect(std::string slot, Literal value) {
  TransitionLabel l;
  l.kind = Kind::Collect;
  l.slot = std::move(slot);
  l.value = std::move(value);
  return l;
}

TransitionLabel TransitionLabel::call(std::string name, Bindings params) {
  TransitionLabel l;
  l.kind = Kind::Call;
  l.name = std::move(name);
  l.params = std::move(params);
  return l;
}

TransitionLabel TransitionLabel::tau(TauReason reason) {
  TransitionLabel l;
  l.kind = Kind::Tau;
  l.reason = reason;
  return l;
}

TransitionLabel TransitionLabel::approval(bool confirm) {
  TransitionLabel l;
  l.kind = Kind::Approval;
  l.confirm = confirm;
  return l;
}

TransitionLabel TransitionLabel::requires_token(std::string token) {
  TransitionLabel l;
  l.kind = Kind::Requires;
  l.token = std::move(token);
  return l;
}

TransitionLabel TransitionLabel::execute(std::string name) {
  TransitionLabel l;
  l.kind = Kind::Execute;
  l.name = std::move(name);
  return l;
}

TransitionLabel TransitionLabel::result(Literal output) {
  TransitionLabel l;
  l.kind = Kind::Result;
  l.output = std::move(output);
  return l;
}

TransitionLabel TransitionLabel::error(std::string type, std::string message) {
  TransitionLabel l;
  l.kind = Kind::Error;
  l.error_type = std::move(type);
  l.message = std::move(message);
  return l;
}

TransitionLabel TransitionLabel::read(std::string uri) {
  TransitionLabel l;
  l.kind = Kind::Read;
  l.uri = std::move(uri);
  return l;
}

TransitionLabel TransitionLabel::list(std::string filter) {
  TransitionLabel l;
  l.kind = Kind::List;
  l.filter = std::move(filter);
  return l;
}

TransitionLabel TransitionLabel::detail(std::string name) {
  TransitionLabel l;
  l.kind = Kind::Detail;
  l.name = std::move(name);
  return l;
}

namespace {

const char* tau_reason_name(TauReason r) {
  switch (r) {
    case TauReason::Validate:
      return "validate";
    case TauReason::Negotiate:
      return "negotiate";
    case TauReason::Collect:
      return "collect";
  }
  return "validate";
}

TauReason tau_reason_from(const std::string& s) {
  if (s == "validate") return TauReason::Validate;
  if (s == "negotiate") return TauReason::Negotiate;
  if (s == "collect") return TauReason::Collect;
  throw ToolkitError("unknown tau reason: " + s);
}

}  // namespace

Json TransitionLabel::to_json() const {
  Json j = Json::object();
  switch (kind) {
    case Kind::Invoke:
      j["kind"] = "invoke";
      j["name"] = name;
      j["params"] = bindings_to_json(params);
      break;
    case Kind::Collect:
      j["kind"] = "collect";
      j["slot"] = slot;
      j["value"] = value.to_json();
      break;
    case Kind::Call:
      j["kind"] = "call";
      j["name"] = name;
      j["params"] = bindings_to_json(params);
      break;
    case Kind::Tau:
      j["kind"] = "tau";
      j["reason"] = tau_reason_name(reason);
      break;
    case Kind::Approval:
      j["kind"] = "approval";
      j["confirm"] = confirm;
      break;
    case Kind::Requires:
      j["kind"] = "requires";
      j["token"] = token;
      break;
    case Kind::Execute:
      j["kind"] = "execute";
      j["name"] = name;
      break;
    case Kind::Result:
      j["kind"] = "result";
      j["output"] = output.to_json();
      break;
    case Kind::Error:
      j["kind"] = "error";
      j["error_type"] = error_type;
      j["message"] = message;
      break;
    case Kind::Read:
      j["kind"] = "read";
      j["uri"] = uri;
      break;
    case Kind::List:
      j["kind"] = "list";
      j["filter"] = filter;
      break;
    case Kind::Detail:
      j["kind"] = "detail";
      j["name"] = name;
      break;
  }
  return j;
}

TransitionLabel TransitionLabel::from_json(const Json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "invoke")
    return invoke(j.at("name").get<std::string>(),
                  bindings_from_json(j.value("params", Json::object())));
  if (kind == "collect")
    return collect(j.at("slot").get<std::string>(),
                   Literal::from_json(j.at("value")));
  if (kind == "call")
    return call(j.at("name").get<std::string>(),
                bindings_from_json(j.value("params", Json::object())));
  if (kind == "tau") return tau(tau_reason_from(j.at("reason").get<std::string>()));
  if (kind == "approval") return approval(j.at("confirm").get<bool>());
  if (kind == "requires") return requires_token(j.at("token").get<std::string>());
  if (kind == "execute") return execute(j.at("name").get<std::string>());
  if (kind == "result") return result(Literal::from_json(j.at("output")));
  if (kind == "error")
    return error(j.at("error_type").get<std::string>(),
                 j.value("message", std::string{}));
  if (kind == "read") return read(j.at("uri").get<std::string>());
  if (kind == "list") return list(j.value("filter", std::string{}));
  if (kind == "detail") return detail(j.at("name").get<std::string>());
  throw ToolkitError("unknown label kind: " + kind);
}

std::string TransitionLabel::key() const { return to_json().dump(); }

std::string TransitionLabel::print() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Invoke:
      os << "invoke(" << name << ", " << encode_bindings(params) << ")";
      break;
    case Kind::Collect:
      os << "collect(" << slot << ", " << value.print() << ")";
      break;
    case Kind::Call:
      os << "call(" << name << ", " << encode_bindings(params) << ")";
      break;
    case Kind::Tau:
      os << "tau:" << tau_reason_name(reason);
      break;
    case Kind::Approval:
      os << "approval(" << (confirm ? "true" : "false") << ")";
      break;
    case Kind::Requires:
      os << "requires(" << token << ")";
      break;
    case Kind::Execute:
      os << "execute(" << name << ")";
      break;
    case Kind::Result:
      os << "result(" << output.print() << ")";
      break;
    case Kind::Error:
      os << "error(" << error_type << ", " << message << ")";
      break;
    case Kind::Read:
      os << "read(" << uri << ")";
      break;
    case Kind::List:
      os << "list(" << filter << ")";
      break;
    case Kind::Detail:
      os << "detail(" << name << ")";
      break;
  }
  return os.str();
}

std::vector<std::vector<const Transition*>> Lts::adjacency() const {
  std::vector<std::vector<const Transition*>> adj(states.size());
  for (const auto& t : transitions) adj[t.src].push_back(&t);
  return adj;
}

Json Lts::to_json() const {
  Json j = Json::object();
  Json st = Json::array();
  for (const auto& s : states) st.push_back(term_to_json(s));
  Json tr = Json::array();
  for (const auto& t : transitions)
    tr.push_back(Json::array({t.src, t.label.to_json(), t.dst}));
  j["states"] = st;
  j["initial"] = initial;
  j["transitions"] = tr;
  j["truncated"] = truncated;
  return j;
}

Lts Lts::from_json(const Json& j) {
  Lts lts;
  for (const auto& s : j.at("states")) lts.states.push_back(term_from_json(s));
  lts.initial = j.value("initial", 0u);
  for (const auto& t : j.at("transitions")) {
    if (!t.is_array() || t.size() != 3)
      throw ToolkitError("transition must be [src, label, dst]");
    Transition tr;
    tr.src = t.at(0).get<std::size_t>();
    tr.label = TransitionLabel::from_json(t.at(1));
    tr.dst = t.at(2).get<std::size_t>();
    if (tr.src >= lts.states.size() || tr.dst >= lts.states.size())
      throw ToolkitError("transition endpoint out of range");
    lts.transitions.push_back(std::move(tr));
  }
  lts.truncated = j.value("truncated", false);
  return lts;
}

std::string Lts::to_dot() const {
  std::ostringstream os;
  os << "digraph lts {\n  rankdir=LR;\n";
  os << "  init [shape=point];\n  init -> s" << initial << ";\n";
  for (std::size_t i = 0; i < states.size(); ++i)
    os << "  s" << i << " [label=\"" << i << "\"];\n";
  for (const auto& t : transitions) {
    std::string label = t.label.print();
    std::string escaped;
    for (char c : label) {
      if (c == '"' || c == '\\') escaped += '\\';
      escaped += c;
    }
    os << "  s" << t.src << " -> s" << t.dst << " [label=\"" << escaped
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

ExploreConfig::ExploreConfig() {
  effect_oracle = [](const std::string& name, const Bindings&) {
    return Literal::text("ok:" + name);
  };
}

// ---------------------------------------------------------------------------
// Step functions
// ---------------------------------------------------------------------------

bool conforms(const Bindings& params, const JsonSchema& schema,
              std::vector<std::string>* violations) {
  std::vector<std::string> missing;
  for (const auto& r : schema.required) {
    if (!params.count(r)) missing.push_back(r);
  }
  std::sort(missing.begin(), missing.end());
  std::vector<std::string> enum_bad;
  for (const auto& [k, v] : params) {
    auto it = schema.properties.find(k);
    if (it == schema.properties.end() || !it->second.enum_values) continue;
    const auto& allowed = *it->second.enum_values;
    bool ok = v.kind() == Literal::Kind::Text &&
              std::find(allowed.begin(), allowed.end(), v.str()) != allowed.end();
    if (!ok) enum_bad.push_back(k + "!enum");
  }
  std::sort(enum_bad.begin(), enum_bad.end());
  if (violations) {
    *violations = missing;
    violations->insert(violations->end(), enum_bad.begin(), enum_bad.end());
  }
  return missing.empty() && enum_bad.empty();
}

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ",";
    out += parts[i];
  }
  return out;
}

struct StepCtx {
  const ExploreConfig* cfg;
  bool sgd_side;
  std::set<std::string> tokens;  // producers of pending results, whole term
  bool bound_hit = false;
};

const std::vector<Bindings>& universe_for(const StepCtx& ctx,
                                          const std::string& name) {
  auto it = ctx.cfg->param_universe.find(name);
  if (it == ctx.cfg->param_universe.end() || it->second.empty())
    throw MissingParamUniverse(name);
  return it->second;
}

void collect_tokens(const TermPtr& t, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ResultTermT>) {
          if (!n.producer.empty()) out.insert(n.producer);
        } else if constexpr (std::is_same_v<T, ParT>) {
          collect_tokens(n.left, out);
          collect_tokens(n.right, out);
        } else if constexpr (std::is_same_v<T, RestrictT> ||
                             std::is_same_v<T, ReplT>) {
          collect_tokens(n.body, out);
        } else if constexpr (std::is_same_v<T, CollectSlotT>) {
          collect_tokens(n.continuation, out);
        }
      },
      t->node);
}

bool matches_filter(const ToolT& tool, const std::string& filter) {
  if (filter.empty()) return true;
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  std::string f = lower(filter);
  if (lower(tool.name).find(f) != std::string::npos) return true;
  if (tool.metadata && tool.metadata->summary &&
      lower(*tool.metadata->summary).find(f) != std::string::npos)
    return true;
  return false;
}

TermPtr par_fold_terms(const std::vector<TermPtr>& parts) {
  if (parts.empty()) return mk_nil();
  TermPtr acc = parts.back();
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it)
    acc = mk_par(*it, acc);
  return acc;
}

std::vector<Successor> step_impl(const TermPtr& term, StepCtx& ctx);

std::vector<Successor> shared_step(const TermPtr& term, StepCtx& ctx) {
  return std::visit(
      [&](const auto& n) -> std::vector<Successor> {
        using T = std::decay_t<decltype(n)>;
        std::vector<Successor> out;
        if constexpr (std::is_same_v<T, ResultTermT>) {
          out.emplace_back(TransitionLabel::result(n.output), mk_nil());
        } else if constexpr (std::is_same_v<T, ErrorTermT>) {
          out.emplace_back(TransitionLabel::error(n.error_type, n.message),
                           mk_nil());
        } else if constexpr (std::is_same_v<T, ParT>) {
          for (auto& [l, s] : step_impl(n.left, ctx))
            out.emplace_back(l, mk_par(s, n.right));
          for (auto& [l, s] : step_impl(n.right, ctx))
            out.emplace_back(l, mk_par(n.left, s));
        } else if constexpr (std::is_same_v<T, RestrictT>) {
          for (auto& [l, s] : step_impl(n.body, ctx))
            out.emplace_back(l, mk_restrict(n.channel, s));
        } else if constexpr (std::is_same_v<T, ReplT>) {
          int budget = n.budget < 0 ? ctx.cfg->repl_unfold_bound : n.budget;
          auto inner = step_impl(n.body, ctx);
          if (budget <= 0) {
            if (!inner.empty()) ctx.bound_hit = true;
            return out;
          }
          for (auto& [l, s] : inner)
            out.emplace_back(l, mk_par(s, mk_repl(n.body, budget - 1)));
        }
        return out;
      },
      term->node);
}

std::vector<Successor> sgd_atom_step(const TermPtr& term, StepCtx& ctx) {
  return std::visit(
      [&](const auto& n) -> std::vector<Successor> {
        using T = std::decay_t<decltype(n)>;
        std::vector<Successor> out;
        if constexpr (std::is_same_v<T, IntentT>) {
          for (const auto& params : universe_for(ctx, n.name)) {
            std::vector<std::string> missing;
            for (const auto& s : n.required_slots) {
              if (!params.count(s.name)) missing.push_back(s.name);
            }
            std::sort(missing.begin(), missing.end());
            if (missing.empty()) {
              out.emplace_back(TransitionLabel::invoke(n.name, params),
                               mk_execute(n.name, params));
            } else {
              out.emplace_back(TransitionLabel::invoke(n.name, params),
                               mk_error("MissingSlots", join(missing)));
            }
          }
        } else if constexpr (std::is_same_v<T, CollectSlotT>) {
          out.emplace_back(TransitionLabel::collect(n.slot, n.value),
                           substitute(n.continuation, n.slot, n.value));
        } else if constexpr (std::is_same_v<T, ExecuteT>) {
          // Transactional execution asks the environment for approval; the
          // base-calculus oracle always grants, so both execution rules
          // produce the same single step.
          Literal output = ctx.cfg->effect_oracle(n.name, n.bindings);
          out.emplace_back(TransitionLabel::execute(n.name),
                           mk_result(output, n.name));
        }
        return out;
      },
      term->node);
}

std::vector<Successor> mcp_atom_step(const TermPtr& term, StepCtx& ctx) {
  return std::visit(
      [&](const auto& n) -> std::vector<Successor> {
        using T = std::decay_t<decltype(n)>;
        std::vector<Successor> out;
        if constexpr (std::is_same_v<T, InitializeT>) {
          std::vector<std::string> server = ctx.cfg->server_caps;
          std::sort(server.begin(), server.end());
          std::vector<std::string> caps;
          std::set_intersection(n.caps.begin(), n.caps.end(), server.begin(),
                                server.end(), std::back_inserter(caps));
          out.emplace_back(
              TransitionLabel::tau(TauReason::Negotiate),
              mk_tools_list(ctx.cfg->available_tools, std::move(caps)));
        } else if constexpr (std::is_same_v<T, ToolsListT>) {
          for (const auto& filter : ctx.cfg->list_filters) {
            std::vector<TermPtr> matched;
            for (const auto& t : n.tools) {
              const auto* tool = as<ToolT>(t);
              if (tool && matches_filter(*tool, filter)) matched.push_back(t);
            }
            out.emplace_back(TransitionLabel::list(filter),
                             par_fold_terms(matched));
          }
          // Two-level disclosure: a summarised listing can be expanded per
          // tool to its full definition.
          for (const auto& t : n.tools) {
            const auto* tool = as<ToolT>(t);
            if (tool && tool->metadata && tool->metadata->summary)
              out.emplace_back(TransitionLabel::detail(tool->name), t);
          }
        } else if constexpr (std::is_same_v<T, ToolT>) {
          for (const auto& params : universe_for(ctx, n.name)) {
            ValidateT v;
            v.pending_name = n.name;
            v.params = params;
            v.schema = n.schema;
            if (n.metadata) {
              if (n.metadata->requires_approval &&
                  *n.metadata->requires_approval)
                v.gate_approval = true;
              if (n.metadata->dependencies) {
                for (const auto& d : *n.metadata->dependencies) {
                  if (d.relation == DepRelation::Requires)
                    v.gate_requires.push_back(d.tool_name);
                }
              }
            }
            out.emplace_back(TransitionLabel::call(n.name, params),
                             mk_validate(std::move(v)));
          }
        } else if constexpr (std::is_same_v<T, ValidateT>) {
          std::vector<std::string> violations;
          if (conforms(n.params, n.schema, &violations)) {
            ToolCallT c;
            c.name = n.pending_name;
            c.params = n.params;
            c.gate_approval = n.gate_approval;
            c.gate_requires = n.gate_requires;
            out.emplace_back(TransitionLabel::tau(TauReason::Validate),
                             mk_tool_call(std::move(c)));
          } else {
            out.emplace_back(TransitionLabel::tau(TauReason::Validate),
                             mk_error("ValidationError", join(violations)));
          }
        } else if constexpr (std::is_same_v<T, ToolCallT>) {
          if (!n.gate_requires.empty()) {
            // Dependency handshake: consumes a result token emitted by the
            // required tool elsewhere in the composition.
            const std::string& needed = n.gate_requires.front();
            if (ctx.tokens.count(needed)) {
              ToolCallT c = n;
              c.gate_requires.erase(c.gate_requires.begin());
              out.emplace_back(TransitionLabel::requires_token(needed),
                               mk_tool_call(std::move(c)));
            }
          } else if (n.gate_approval) {
            ToolCallT granted = n;
            granted.gate_approval = false;
            out.emplace_back(TransitionLabel::approval(true),
                             mk_tool_call(std::move(granted)));
            out.emplace_back(TransitionLabel::approval(false),
                             mk_result(Literal::text("cancelled")));
          } else {
            Literal output = ctx.cfg->effect_oracle(n.name, n.params);
            out.emplace_back(TransitionLabel::execute(n.name),
                             mk_result(output, n.name));
          }
        } else if constexpr (std::is_same_v<T, ResourceT>) {
          out.emplace_back(TransitionLabel::read(n.uri), mk_result(n.content));
        }
        // Prompt templates are inert: no transition rule consumes them.
        return out;
      },
      term->node);
}

std::vector<Successor> step_impl(const TermPtr& term, StepCtx& ctx) {
  std::vector<Successor> out = shared_step(term, ctx);
  std::vector<Successor> atom =
      ctx.sgd_side ? sgd_atom_step(term, ctx) : mcp_atom_step(term, ctx);
  out.insert(out.end(), std::make_move_iterator(atom.begin()),
             std::make_move_iterator(atom.end()));
  return out;
}

std::vector<Successor> finalize(std::vector<Successor>&& raw) {
  std::vector<Successor> out;
  out.reserve(raw.size());
  for (auto& [l, t] : raw) out.emplace_back(std::move(l), canonicalize(t));
  std::sort(out.begin(), out.end(),
            [](const Successor& a, const Successor& b) {
              auto ka = a.first.key(), kb = b.first.key();
              if (ka != kb) return ka < kb;
              return term_key(a.second) < term_key(b.second);
            });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Successor& a, const Successor& b) {
                          return a.first == b.first &&
                                 term_eq(a.second, b.second);
                        }),
            out.end());
  return out;
}

std::vector<Successor> step_checked(const TermPtr& term,
                                    const ExploreConfig& cfg, bool sgd_side,
                                    bool* bound_hit) {
  StepCtx ctx{&cfg, sgd_side, {}, false};
  if (!sgd_side) collect_tokens(term, ctx.tokens);
  auto out = finalize(step_impl(term, ctx));
  if (bound_hit) *bound_hit |= ctx.bound_hit;
  return out;
}

}  // namespace

std::vector<Successor> sgd_step(const TermPtr& term, const ExploreConfig& cfg) {
  if (!is_pure_sgd(term))
    throw NotSgdTerm("term contains tool-protocol constructs");
  return step_checked(term, cfg, /*sgd_side=*/true, nullptr);
}

std::vector<Successor> mcp_step(const TermPtr& term, const ExploreConfig& cfg) {
  if (!is_pure_mcp(term))
    throw NotMcpTerm("term contains dialogue-calculus constructs");
  return step_checked(term, cfg, /*sgd_side=*/false, nullptr);
}

namespace {

TermPtr resolve_repl_budgets(const TermPtr& t, int bound) {
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ReplT>) {
          return mk_repl(resolve_repl_budgets(n.body, bound),
                         n.budget < 0 ? bound : n.budget);
        } else if constexpr (std::is_same_v<T, ParT>) {
          return mk_par(resolve_repl_budgets(n.left, bound),
                        resolve_repl_budgets(n.right, bound));
        } else if constexpr (std::is_same_v<T, RestrictT>) {
          return mk_restrict(n.channel, resolve_repl_budgets(n.body, bound));
        } else if constexpr (std::is_same_v<T, CollectSlotT>) {
          return mk_collect(n.slot, n.value,
                            resolve_repl_budgets(n.continuation, bound));
        } else {
          return mk(T{n});
        }
      },
      t->node);
}

}  // namespace

Lts build_lts(const TermPtr& term, const ExploreConfig& cfg) {
  Calculus c = calculus_of(term);
  if (c == Calculus::Mixed)
    throw ToolkitError("term mixes both calculi; build one side at a time");
  bool sgd_side = c == Calculus::Sgd || c == Calculus::Shared;

  Lts lts;
  TermPtr init =
      canonicalize(resolve_repl_budgets(term, cfg.repl_unfold_bound));
  std::unordered_map<std::string, std::size_t> index;
  std::deque<std::size_t> frontier;

  auto intern = [&](const TermPtr& t) -> std::optional<std::size_t> {
    std::string key = term_key(t);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    if (lts.states.size() >= cfg.max_states) {
      lts.truncated = true;
      return std::nullopt;
    }
    std::size_t id = lts.states.size();
    lts.states.push_back(t);
    index.emplace(std::move(key), id);
    frontier.push_back(id);
    return id;
  };

  intern(init);
  lts.initial = 0;

  bool bound_hit = false;
  while (!frontier.empty()) {
    std::size_t id = frontier.front();
    frontier.pop_front();
    TermPtr state = lts.states[id];
    auto succs = step_checked(state, cfg, sgd_side, &bound_hit);
    for (auto& [label, target] : succs) {
      auto dst = intern(target);
      if (!dst) continue;  // state budget exhausted
      lts.transitions.push_back(Transition{id, label, *dst});
    }
  }
  lts.truncated = lts.truncated || bound_hit;
  return lts;
}

TraceSet traces(const Lts& lts, std::size_t max_len) {
  TraceSet out;
  out.partial = lts.truncated;
  auto adj = lts.adjacency();
  std::set<std::string> seen;

  struct Item {
    std::size_t state;
    std::vector<TransitionLabel> seq;
  };
  std::deque<Item> queue;
  queue.push_back({lts.initial, {}});

  auto emit = [&](const std::vector<TransitionLabel>& seq) {
    std::string key;
    for (const auto& l : seq) key += l.key() + "\x1f";
    if (seen.insert(key).second) out.sequences.push_back(seq);
  };
  emit({});

  while (!queue.empty()) {
    Item item = std::move(queue.front());
    queue.pop_front();
    if (item.seq.size() >= max_len) continue;
    for (const auto* t : adj[item.state]) {
      auto seq = item.seq;
      seq.push_back(t->label);
      emit(seq);
      queue.push_back({t->dst, std::move(seq)});
    }
  }
  std::sort(out.sequences.begin(), out.sequences.end(),
            [](const auto& a, const auto& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              for (std::size_t i = 0; i < a.size(); ++i) {
                auto ka = a[i].key(), kb = b[i].key();
                if (ka != kb) return ka < kb;
              }
              return false;
            });
  return out;
}

Bindings conforming_params(const JsonSchema& schema) {
  Bindings b;
  for (const auto& name : schema.required) {
    const auto& p = schema.properties.at(name);
    if (p.enum_values && !p.enum_values->empty()) {
      b.emplace(name, Literal::text(p.enum_values->front()));
    } else if (p.type_name == "integer") {
      b.emplace(name, Literal::integer(1));
    } else if (p.type_name == "number") {
      b.emplace(name, Literal::decimal(1.5));
    } else if (p.type_name == "boolean") {
      b.emplace(name, Literal::boolean(true));
    } else {
      b.emplace(name, Literal::text("x"));
    }
  }
  return b;
}

namespace {

std::vector<Bindings> default_maps(const JsonSchema& schema) {
  Bindings ok = conforming_params(schema);
  Bindings deficient = ok;
  if (!deficient.empty()) deficient.erase(std::prev(deficient.end())->first);
  if (deficient == ok) return {ok};
  return {ok, deficient};
}

JsonSchema schema_of_intent(const IntentT& intent) {
  JsonSchema s;
  for (const auto& slot : intent.required_slots) {
    s.required.push_back(slot.name);
    PropertySpec p{slot.type_name, slot.description, std::nullopt};
    if (!slot.possible_values.empty()) p.enum_values = slot.possible_values;
    s.properties.emplace(slot.name, std::move(p));
  }
  for (const auto& slot : intent.optional_slots) {
    PropertySpec p{slot.type_name, slot.description, std::nullopt};
    if (!slot.possible_values.empty()) p.enum_values = slot.possible_values;
    s.properties.emplace(slot.name, std::move(p));
  }
  return s;
}

}  // namespace

ExploreConfig default_universe_for(const McpRegistry& reg) {
  ExploreConfig cfg;
  for (const auto& t : reg.tools) {
    const auto* tool = as<ToolT>(t);
    if (tool) cfg.param_universe[tool->name] = default_maps(tool->schema);
  }
  cfg.available_tools = reg.tools;
  cfg.server_caps = reg.server_caps;
  return cfg;
}

ExploreConfig default_universe_for(const SgdRegistry& reg) {
  ExploreConfig cfg;
  for (const auto& t : reg.intents) {
    const auto* intent = as<IntentT>(t);
    if (intent)
      cfg.param_universe[intent->name] = default_maps(schema_of_intent(*intent));
  }
  return cfg;
}

namespace {

void harvest_universes(const TermPtr& t, ExploreConfig& cfg) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntentT>) {
          cfg.param_universe[n.name] = default_maps(schema_of_intent(n));
        } else if constexpr (std::is_same_v<T, ToolT>) {
          cfg.param_universe[n.name] = default_maps(n.schema);
        } else if constexpr (std::is_same_v<T, ParT>) {
          harvest_universes(n.left, cfg);
          harvest_universes(n.right, cfg);
        } else if constexpr (std::is_same_v<T, RestrictT> ||
                             std::is_same_v<T, ReplT>) {
          harvest_universes(n.body, cfg);
        } else if constexpr (std::is_same_v<T, CollectSlotT>) {
          harvest_universes(n.continuation, cfg);
        } else if constexpr (std::is_same_v<T, ToolsListT>) {
          for (const auto& tool : n.tools) harvest_universes(tool, cfg);
        }
      },
      t->node);
}

}  // namespace

ExploreConfig default_universe_for_term(const TermPtr& term) {
  ExploreConfig cfg;
  harvest_universes(term, cfg);
  return cfg;
}

}  // namespace protocheck
