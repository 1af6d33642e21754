#include "protocheck/term.hpp"

#include <algorithm>
#include <functional>

namespace protocheck {

Json tribool_to_json(TriBool t) {
  switch (t) {
    case TriBool::True:
      return true;
    case TriBool::False:
      return false;
    case TriBool::Unknown:
      return "unknown";
  }
  return "unknown";
}

TriBool tribool_from_json(const Json& j) {
  if (j.is_boolean()) return j.get<bool>() ? TriBool::True : TriBool::False;
  if (j.is_string() && j.get<std::string>() == "unknown")
    return TriBool::Unknown;
  throw ToolkitError("not a tri-valued flag: " + j.dump());
}

bool JsonSchema::well_formed() const {
  for (const auto& r : required) {
    if (!properties.count(r)) return false;
  }
  return true;
}

RecoveryStrategy RecoveryStrategy::retry(int n) {
  RecoveryStrategy r;
  r.kind = Kind::Retry;
  r.attempts = n;
  return r;
}

RecoveryStrategy RecoveryStrategy::fallback(std::string tool) {
  RecoveryStrategy r;
  r.kind = Kind::Fallback;
  r.target = std::move(tool);
  return r;
}

RecoveryStrategy RecoveryStrategy::user_prompt(std::string msg) {
  RecoveryStrategy r;
  r.kind = Kind::UserPrompt;
  r.message = std::move(msg);
  return r;
}

RecoveryStrategy RecoveryStrategy::abort() { return RecoveryStrategy{}; }

std::string side_effects_name(SideEffects s) {
  switch (s) {
    case SideEffects::Read:
      return "read";
    case SideEffects::Write:
      return "write";
    case SideEffects::Delete:
      return "delete";
    case SideEffects::None:
      return "none";
  }
  return "none";
}

SideEffects side_effects_from_name(const std::string& s) {
  if (s == "read") return SideEffects::Read;
  if (s == "write") return SideEffects::Write;
  if (s == "delete") return SideEffects::Delete;
  if (s == "none") return SideEffects::None;
  throw ToolkitError("unknown side_effects value: " + s);
}

std::string relation_name(DepRelation r) {
  switch (r) {
    case DepRelation::Requires:
      return "requires";
    case DepRelation::ProducesInputFor:
      return "produces_input_for";
    case DepRelation::ExclusiveWith:
      return "exclusive_with";
  }
  return "requires";
}

DepRelation relation_from_name(const std::string& s) {
  if (s == "requires") return DepRelation::Requires;
  if (s == "produces_input_for") return DepRelation::ProducesInputFor;
  if (s == "exclusive_with") return DepRelation::ExclusiveWith;
  throw ToolkitError("unknown dependency relation: " + s);
}

// --- equality through shared pointers ---

bool term_eq(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->node == b->node;
}

bool operator==(const CollectSlotT& a, const CollectSlotT& b) {
  return a.slot == b.slot && a.value == b.value &&
         term_eq(a.continuation, b.continuation);
}

bool operator==(const ToolsListT& a, const ToolsListT& b) {
  if (a.caps != b.caps || a.tools.size() != b.tools.size()) return false;
  for (std::size_t i = 0; i < a.tools.size(); ++i) {
    if (!term_eq(a.tools[i], b.tools[i])) return false;
  }
  return true;
}

bool operator==(const ParT& a, const ParT& b) {
  return term_eq(a.left, b.left) && term_eq(a.right, b.right);
}

bool operator==(const RestrictT& a, const RestrictT& b) {
  return a.channel == b.channel && term_eq(a.body, b.body);
}

bool operator==(const ReplT& a, const ReplT& b) {
  return a.budget == b.budget && term_eq(a.body, b.body);
}

// --- builders ---

TermPtr mk(TermVariant&& v) {
  return std::make_shared<const ProcessTerm>(ProcessTerm{std::move(v)});
}

TermPtr mk_nil() { return mk(NilT{}); }

TermPtr mk_intent(IntentT intent) {
  std::set<std::string> seen;
  auto note = [&](const SlotDef& s) {
    if (s.name.empty())
      throw ToolkitError("intent " + intent.name + " has an unnamed slot");
    if (!seen.insert(s.name).second)
      throw ToolkitError("duplicate slot in intent " + intent.name + ": " +
                         s.name);
    std::set<std::string> values(s.possible_values.begin(),
                                 s.possible_values.end());
    if (values.size() != s.possible_values.size())
      throw ToolkitError("slot " + s.name + " repeats a possible value");
  };
  for (const auto& s : intent.required_slots) note(s);
  for (const auto& s : intent.optional_slots) note(s);
  // Optional slots carry no order on the wire; keep them sorted so
  // round-tripped intents compare field-exact.
  std::sort(intent.optional_slots.begin(), intent.optional_slots.end(),
            [](const SlotDef& a, const SlotDef& b) { return a.name < b.name; });
  return mk(std::move(intent));
}

TermPtr mk_collect(std::string slot, Literal value, TermPtr continuation) {
  return mk(CollectSlotT{std::move(slot), std::move(value),
                         std::move(continuation)});
}

TermPtr mk_execute(std::string name, Bindings bindings) {
  return mk(ExecuteT{std::move(name), std::move(bindings)});
}

TermPtr mk_tool(ToolT tool) {
  if (!tool.schema.well_formed())
    throw ToolkitError("tool " + tool.name +
                       ": required name missing from properties");
  return mk(std::move(tool));
}

TermPtr mk_resource(std::string uri, Literal content) {
  return mk(ResourceT{std::move(uri), std::move(content)});
}

TermPtr mk_prompt(std::string template_text, Bindings args) {
  return mk(PromptT{std::move(template_text), std::move(args)});
}

TermPtr mk_initialize(std::vector<std::string> caps) {
  std::sort(caps.begin(), caps.end());
  caps.erase(std::unique(caps.begin(), caps.end()), caps.end());
  return mk(InitializeT{std::move(caps)});
}

TermPtr mk_tools_list(std::vector<TermPtr> tools,
                      std::vector<std::string> caps) {
  std::sort(caps.begin(), caps.end());
  caps.erase(std::unique(caps.begin(), caps.end()), caps.end());
  return mk(ToolsListT{std::move(tools), std::move(caps)});
}

TermPtr mk_tool_call(ToolCallT call) { return mk(std::move(call)); }

TermPtr mk_validate(ValidateT v) { return mk(std::move(v)); }

TermPtr mk_result(Literal output, std::string producer) {
  return mk(ResultTermT{std::move(output), std::move(producer)});
}

TermPtr mk_error(std::string error_type, std::string message) {
  return mk(ErrorTermT{std::move(error_type), std::move(message)});
}

TermPtr mk_par(TermPtr left, TermPtr right) {
  return mk(ParT{std::move(left), std::move(right)});
}

TermPtr mk_restrict(std::string channel, TermPtr body) {
  return mk(RestrictT{std::move(channel), std::move(body)});
}

TermPtr mk_repl(TermPtr body, int budget) {
  return mk(ReplT{std::move(body), budget});
}

// --- classification ---

namespace {

struct CalcFlags {
  bool sgd = false;
  bool mcp = false;
  bool plus = false;
};

void classify(const TermPtr& t, CalcFlags& f) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntentT> ||
                      std::is_same_v<T, CollectSlotT> ||
                      std::is_same_v<T, ExecuteT>) {
          f.sgd = true;
        } else if constexpr (std::is_same_v<T, ToolT>) {
          f.mcp = true;
          if (n.metadata) f.plus = true;
        } else if constexpr (std::is_same_v<T, ResourceT> ||
                             std::is_same_v<T, PromptT> ||
                             std::is_same_v<T, InitializeT> ||
                             std::is_same_v<T, ToolCallT> ||
                             std::is_same_v<T, ValidateT>) {
          f.mcp = true;
        }
        if constexpr (std::is_same_v<T, CollectSlotT>) {
          classify(n.continuation, f);
        } else if constexpr (std::is_same_v<T, ToolsListT>) {
          f.mcp = true;
          for (const auto& tool : n.tools) classify(tool, f);
        } else if constexpr (std::is_same_v<T, ParT>) {
          classify(n.left, f);
          classify(n.right, f);
        } else if constexpr (std::is_same_v<T, RestrictT> ||
                             std::is_same_v<T, ReplT>) {
          classify(n.body, f);
        }
      },
      t->node);
}

}  // namespace

Calculus calculus_of(const TermPtr& t) {
  CalcFlags f;
  classify(t, f);
  if (f.sgd && f.mcp) return Calculus::Mixed;
  if (f.sgd) return Calculus::Sgd;
  if (f.plus) return Calculus::McpPlus;
  if (f.mcp) return Calculus::Mcp;
  return Calculus::Shared;
}

bool is_pure_sgd(const TermPtr& t) {
  auto c = calculus_of(t);
  return c == Calculus::Sgd || c == Calculus::Shared;
}

bool is_pure_mcp(const TermPtr& t) {
  auto c = calculus_of(t);
  return c == Calculus::Mcp || c == Calculus::McpPlus || c == Calculus::Shared;
}

// --- canonicalization ---

namespace {

/// Renames free occurrences of channel `from` to `to`. Inner restrictions
/// binding the same name shadow the renaming.
TermPtr rename_channel(const TermPtr& t, const std::string& from,
                       const std::string& to) {
  auto ren_lit = [&](const Literal& l) {
    if (l.is_chan() && l.str() == from) return Literal::chan(to);
    return l;
  };
  auto ren_bindings = [&](const Bindings& b) {
    Bindings out;
    for (const auto& [k, v] : b) out.emplace(k, ren_lit(v));
    return out;
  };
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CollectSlotT>) {
          return mk_collect(n.slot, ren_lit(n.value),
                            rename_channel(n.continuation, from, to));
        } else if constexpr (std::is_same_v<T, ExecuteT>) {
          return mk_execute(n.name, ren_bindings(n.bindings));
        } else if constexpr (std::is_same_v<T, PromptT>) {
          return mk_prompt(n.template_text, ren_bindings(n.args));
        } else if constexpr (std::is_same_v<T, ToolCallT>) {
          ToolCallT c = n;
          c.params = ren_bindings(n.params);
          return mk_tool_call(std::move(c));
        } else if constexpr (std::is_same_v<T, ValidateT>) {
          ValidateT v = n;
          v.params = ren_bindings(n.params);
          return mk_validate(std::move(v));
        } else if constexpr (std::is_same_v<T, ResultTermT>) {
          return mk_result(ren_lit(n.output), n.producer);
        } else if constexpr (std::is_same_v<T, ResourceT>) {
          return mk_resource(n.uri, ren_lit(n.content));
        } else if constexpr (std::is_same_v<T, ParT>) {
          return mk_par(rename_channel(n.left, from, to),
                        rename_channel(n.right, from, to));
        } else if constexpr (std::is_same_v<T, RestrictT>) {
          if (n.channel == from) return mk(RestrictT{n.channel, n.body});
          return mk_restrict(n.channel, rename_channel(n.body, from, to));
        } else if constexpr (std::is_same_v<T, ReplT>) {
          return mk_repl(rename_channel(n.body, from, to), n.budget);
        } else if constexpr (std::is_same_v<T, ToolsListT>) {
          std::vector<TermPtr> tools;
          for (const auto& tool : n.tools)
            tools.push_back(rename_channel(tool, from, to));
          return mk(ToolsListT{std::move(tools), n.caps});
        } else {
          return mk(T{n});
        }
      },
      t->node);
}

TermPtr canon(const TermPtr& t, int depth);

void flatten_par(const TermPtr& t, int depth, std::vector<TermPtr>& out) {
  if (const auto* p = as<ParT>(t)) {
    flatten_par(p->left, depth, out);
    flatten_par(p->right, depth, out);
    return;
  }
  TermPtr c = canon(t, depth);
  if (is<NilT>(c)) return;
  if (const auto* p = as<ParT>(c)) {
    // A canonicalized child may itself be a chain; splice it.
    flatten_par(c, depth, out);
    (void)p;
    return;
  }
  out.push_back(std::move(c));
}

TermPtr canon(const TermPtr& t, int depth) {
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ParT>) {
          std::vector<TermPtr> children;
          flatten_par(n.left, depth, children);
          flatten_par(n.right, depth, children);
          if (children.empty()) return mk_nil();
          std::stable_sort(children.begin(), children.end(),
                           [](const TermPtr& a, const TermPtr& b) {
                             return term_key(a) < term_key(b);
                           });
          TermPtr acc = children.back();
          for (auto it = children.rbegin() + 1; it != children.rend(); ++it) {
            acc = mk_par(*it, acc);
          }
          return acc;
        } else if constexpr (std::is_same_v<T, RestrictT>) {
          std::string fresh = "#" + std::to_string(depth);
          TermPtr body = n.channel == fresh
                             ? n.body
                             : rename_channel(n.body, n.channel, fresh);
          return mk_restrict(fresh, canon(body, depth + 1));
        } else if constexpr (std::is_same_v<T, ReplT>) {
          return mk_repl(canon(n.body, depth), n.budget);
        } else if constexpr (std::is_same_v<T, CollectSlotT>) {
          return mk_collect(n.slot, n.value, canon(n.continuation, depth));
        } else if constexpr (std::is_same_v<T, ToolsListT>) {
          std::vector<TermPtr> tools;
          for (const auto& tool : n.tools) tools.push_back(canon(tool, depth));
          return mk(ToolsListT{std::move(tools), n.caps});
        } else {
          return mk(T{n});
        }
      },
      t->node);
}

}  // namespace

TermPtr canonicalize(const TermPtr& t) { return canon(t, 0); }

// --- substitution ---

namespace {

std::string fresh_channel(const std::string& base,
                          const std::set<std::string>& taken) {
  std::string cand = base + "'";
  while (taken.count(cand)) cand += "'";
  return cand;
}

TermPtr subst(const TermPtr& t, const std::string& slot, const Literal& value);

Literal subst_lit(const Literal& l, const std::string& slot,
                  const Literal& value) {
  if (l.is_var() && l.str() == slot) return value;
  return l;
}

Bindings subst_bindings(const Bindings& b, const std::string& slot,
                        const Literal& value) {
  Bindings out;
  for (const auto& [k, v] : b) out.emplace(k, subst_lit(v, slot, value));
  return out;
}

TermPtr subst(const TermPtr& t, const std::string& slot,
              const Literal& value) {
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CollectSlotT>) {
          Literal v = subst_lit(n.value, slot, value);
          // An inner collect of the same slot binds tighter.
          TermPtr k = n.slot == slot ? n.continuation
                                     : subst(n.continuation, slot, value);
          return mk_collect(n.slot, std::move(v), std::move(k));
        } else if constexpr (std::is_same_v<T, ExecuteT>) {
          return mk_execute(n.name, subst_bindings(n.bindings, slot, value));
        } else if constexpr (std::is_same_v<T, PromptT>) {
          return mk_prompt(n.template_text, subst_bindings(n.args, slot, value));
        } else if constexpr (std::is_same_v<T, ToolCallT>) {
          ToolCallT c = n;
          c.params = subst_bindings(n.params, slot, value);
          return mk_tool_call(std::move(c));
        } else if constexpr (std::is_same_v<T, ValidateT>) {
          ValidateT v = n;
          v.params = subst_bindings(n.params, slot, value);
          return mk_validate(std::move(v));
        } else if constexpr (std::is_same_v<T, ResultTermT>) {
          return mk_result(subst_lit(n.output, slot, value), n.producer);
        } else if constexpr (std::is_same_v<T, ResourceT>) {
          return mk_resource(n.uri, subst_lit(n.content, slot, value));
        } else if constexpr (std::is_same_v<T, ParT>) {
          return mk_par(subst(n.left, slot, value),
                        subst(n.right, slot, value));
        } else if constexpr (std::is_same_v<T, RestrictT>) {
          if (value.is_chan() && value.str() == n.channel) {
            // Rename the binder so the incoming channel is not captured.
            auto taken = free_names(n.body);
            taken.insert(n.channel);
            std::string fresh = fresh_channel(n.channel, taken);
            TermPtr body = rename_channel(n.body, n.channel, fresh);
            return mk_restrict(fresh, subst(body, slot, value));
          }
          return mk_restrict(n.channel, subst(n.body, slot, value));
        } else if constexpr (std::is_same_v<T, ReplT>) {
          return mk_repl(subst(n.body, slot, value), n.budget);
        } else if constexpr (std::is_same_v<T, ToolsListT>) {
          std::vector<TermPtr> tools;
          for (const auto& tool : n.tools)
            tools.push_back(subst(tool, slot, value));
          return mk(ToolsListT{std::move(tools), n.caps});
        } else {
          return mk(T{n});
        }
      },
      t->node);
}

}  // namespace

TermPtr substitute(const TermPtr& t, const std::string& slot,
                   const Literal& value) {
  return subst(t, slot, value);
}

// --- free names ---

namespace {

void collect_free(const TermPtr& t, std::set<std::string>& bound,
                  std::set<std::string>& out) {
  auto lit = [&](const Literal& l) {
    if (l.is_chan() && !bound.count(l.str())) out.insert(l.str());
  };
  auto binds = [&](const Bindings& b) {
    for (const auto& [k, v] : b) {
      (void)k;
      lit(v);
    }
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CollectSlotT>) {
          lit(n.value);
          collect_free(n.continuation, bound, out);
        } else if constexpr (std::is_same_v<T, ExecuteT>) {
          binds(n.bindings);
        } else if constexpr (std::is_same_v<T, PromptT>) {
          binds(n.args);
        } else if constexpr (std::is_same_v<T, ToolCallT>) {
          binds(n.params);
        } else if constexpr (std::is_same_v<T, ValidateT>) {
          binds(n.params);
        } else if constexpr (std::is_same_v<T, ResultTermT>) {
          lit(n.output);
        } else if constexpr (std::is_same_v<T, ResourceT>) {
          lit(n.content);
        } else if constexpr (std::is_same_v<T, ParT>) {
          collect_free(n.left, bound, out);
          collect_free(n.right, bound, out);
        } else if constexpr (std::is_same_v<T, RestrictT>) {
          bool inserted = bound.insert(n.channel).second;
          collect_free(n.body, bound, out);
          if (inserted) bound.erase(n.channel);
        } else if constexpr (std::is_same_v<T, ReplT>) {
          collect_free(n.body, bound, out);
        } else if constexpr (std::is_same_v<T, ToolsListT>) {
          for (const auto& tool : n.tools) collect_free(tool, bound, out);
        }
      },
      t->node);
}

}  // namespace

std::set<std::string> free_names(const TermPtr& t) {
  std::set<std::string> bound, out;
  collect_free(t, bound, out);
  return out;
}

std::size_t count_restricts(const TermPtr& t) {
  return std::visit(
      [&](const auto& n) -> std::size_t {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CollectSlotT>) {
          return count_restricts(n.continuation);
        } else if constexpr (std::is_same_v<T, ParT>) {
          return count_restricts(n.left) + count_restricts(n.right);
        } else if constexpr (std::is_same_v<T, RestrictT>) {
          return 1 + count_restricts(n.body);
        } else if constexpr (std::is_same_v<T, ReplT>) {
          return count_restricts(n.body);
        } else if constexpr (std::is_same_v<T, ToolsListT>) {
          std::size_t acc = 0;
          for (const auto& tool : n.tools) acc += count_restricts(tool);
          return acc;
        } else {
          return 0;
        }
      },
      t->node);
}

// --- description-blind equality ---

namespace {

TermPtr scrub_descriptions(const TermPtr& t) {
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntentT>) {
          IntentT i = n;
          i.description.clear();
          for (auto& s : i.required_slots) s.description.clear();
          for (auto& s : i.optional_slots) s.description.clear();
          return mk(std::move(i));
        } else if constexpr (std::is_same_v<T, ToolT>) {
          ToolT tool = n;
          tool.description.clear();
          for (auto& [k, p] : tool.schema.properties) {
            (void)k;
            p.description.clear();
          }
          return mk(std::move(tool));
        } else if constexpr (std::is_same_v<T, CollectSlotT>) {
          return mk_collect(n.slot, n.value,
                            scrub_descriptions(n.continuation));
        } else if constexpr (std::is_same_v<T, ParT>) {
          return mk_par(scrub_descriptions(n.left),
                        scrub_descriptions(n.right));
        } else if constexpr (std::is_same_v<T, RestrictT>) {
          return mk_restrict(n.channel, scrub_descriptions(n.body));
        } else if constexpr (std::is_same_v<T, ReplT>) {
          return mk_repl(scrub_descriptions(n.body), n.budget);
        } else if constexpr (std::is_same_v<T, ToolsListT>) {
          std::vector<TermPtr> tools;
          for (const auto& tool : n.tools)
            tools.push_back(scrub_descriptions(tool));
          return mk(ToolsListT{std::move(tools), n.caps});
        } else {
          return mk(T{n});
        }
      },
      t->node);
}

}  // namespace

bool structural_eq(const TermPtr& a, const TermPtr& b) {
  return term_eq(scrub_descriptions(a), scrub_descriptions(b));
}

}  // namespace protocheck
