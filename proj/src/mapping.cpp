#include "protocheck/mapping.hpp"

#include <algorithm>

namespace protocheck {

std::string undefined_reason_name(UndefinedReason r) {
  switch (r) {
    case UndefinedReason::NoSgdEquivalentResource:
      return "NoSgdEquivalentResource";
    case UndefinedReason::NoSgdEquivalentPrompt:
      return "NoSgdEquivalentPrompt";
    case UndefinedReason::NoSgdEquivalentInitialize:
      return "NoSgdEquivalentInitialize";
    case UndefinedReason::NoSgdEquivalentToolsList:
      return "NoSgdEquivalentToolsList";
  }
  return "NoSgdEquivalentResource";
}

std::string loss_field_name(LossField f) {
  switch (f) {
    case LossField::Transactionality:
      return "transactionality";
    case LossField::FailureModes:
      return "failure_modes";
    case LossField::Dependencies:
      return "dependencies";
    case LossField::ApprovalProtocol:
      return "approval_protocol";
  }
  return "transactionality";
}

Json MapOutcome::to_json() const {
  Json j = Json::object();
  if (term) j["term"] = term_to_json(*term);
  if (undefined) j["undefined"] = undefined_reason_name(*undefined);
  Json w = Json::array();
  for (const auto& l : warnings)
    w.push_back(Json{{"field", loss_field_name(l.field)}, {"detail", l.detail}});
  j["warnings"] = w;
  return j;
}

JsonSchema schema_from_slots(const std::vector<SlotDef>& required,
                             const std::vector<SlotDef>& optional_slots) {
  JsonSchema s;
  auto prop = [](const SlotDef& slot) {
    PropertySpec p{slot.type_name, slot.description, std::nullopt};
    if (!slot.possible_values.empty()) p.enum_values = slot.possible_values;
    return p;
  };
  for (const auto& slot : required) {
    s.required.push_back(slot.name);
    s.properties.emplace(slot.name, prop(slot));
  }
  for (const auto& slot : optional_slots)
    s.properties.emplace(slot.name, prop(slot));
  return s;
}

std::string first_sentence(const std::string& text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '.') continue;
    if (i + 1 == text.size() ||
        std::isspace(static_cast<unsigned char>(text[i + 1])))
      return text.substr(0, i + 1);
  }
  return text;
}

// ---------------------------------------------------------------------------
// Forward mapping
// ---------------------------------------------------------------------------

namespace {

TermPtr forward(const TermPtr& t, bool plus) {
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntentT>) {
          ToolT tool;
          tool.name = n.name;
          tool.description = n.description;
          tool.schema = schema_from_slots(n.required_slots, n.optional_slots);
          if (plus) {
            if (n.transactional == TriBool::Unknown)
              throw UnknownTransactionality(
                  "intent " + n.name +
                  " has unknown transactionality; the extended mapping needs "
                  "a definite flag");
            bool tx = n.transactional == TriBool::True;
            ToolMetadata m;
            m.side_effects = tx ? SideEffects::Write : SideEffects::Read;
            m.requires_approval = tx;
            m.failure_modes = n.failure_modes;
            m.summary = first_sentence(n.description);
            m.dependencies = n.dependencies;
            tool.metadata = std::move(m);
          }
          return mk_tool(std::move(tool));
        } else if constexpr (std::is_same_v<T, ExecuteT>) {
          // Bindings cross the boundary JSON-encoded; decode(encode(b)) == b.
          ToolCallT c;
          c.name = n.name;
          c.params = decode_bindings(encode_bindings(n.bindings));
          return mk_tool_call(std::move(c));
        } else if constexpr (std::is_same_v<T, ResultTermT> ||
                             std::is_same_v<T, ErrorTermT> ||
                             std::is_same_v<T, NilT>) {
          return mk(T{n});
        } else if constexpr (std::is_same_v<T, ParT>) {
          return mk_par(forward(n.left, plus), forward(n.right, plus));
        } else if constexpr (std::is_same_v<T, RestrictT>) {
          return mk_restrict(n.channel, forward(n.body, plus));
        } else if constexpr (std::is_same_v<T, ReplT>) {
          return mk_repl(forward(n.body, plus), n.budget);
        } else if constexpr (std::is_same_v<T, CollectSlotT>) {
          throw UnsupportedTerm(
              "slot-collection prefixes have no clause in the forward "
              "mapping");
        } else {
          throw NotSgdTerm("term is not in the dialogue calculus");
        }
      },
      t->node);
}

}  // namespace

TermPtr sgd_to_mcp(const TermPtr& sgd) {
  if (!is_pure_sgd(sgd))
    throw NotSgdTerm("term contains tool-protocol constructs");
  return forward(sgd, /*plus=*/false);
}

TermPtr sgd_to_mcp_plus(const TermPtr& sgd) {
  if (!is_pure_sgd(sgd))
    throw NotSgdTerm("term contains tool-protocol constructs");
  return forward(sgd, /*plus=*/true);
}

// ---------------------------------------------------------------------------
// Reverse mapping
// ---------------------------------------------------------------------------

namespace {

std::vector<SlotDef> slots_from_required(const JsonSchema& schema) {
  std::vector<SlotDef> out;
  for (const auto& name : schema.required) {
    const auto& p = schema.properties.at(name);
    out.push_back(SlotDef{name, p.type_name, p.description,
                          p.enum_values.value_or(std::vector<std::string>{})});
  }
  return out;
}

std::vector<SlotDef> slots_from_optional(const JsonSchema& schema) {
  // Property order is a map; optional slots are ordered by name.
  std::set<std::string> required_set(schema.required.begin(),
                                     schema.required.end());
  std::vector<SlotDef> out;
  for (const auto& [name, p] : schema.properties) {
    if (required_set.count(name)) continue;
    out.push_back(SlotDef{name, p.type_name, p.description,
                          p.enum_values.value_or(std::vector<std::string>{})});
  }
  return out;
}

void reject_extended(const TermPtr& t) {
  if (calculus_of(t) == Calculus::McpPlus)
    throw McpPlusNotAccepted(
        "term carries five-principle metadata; use the extended inverse");
}

TermPtr reverse_plain(const TermPtr& t, std::vector<LossRecord>& warnings,
                      std::optional<UndefinedReason>& undefined) {
  if (undefined) return mk_nil();
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ToolT>) {
          IntentT intent;
          intent.name = n.name;
          intent.description = n.description;
          intent.required_slots = slots_from_required(n.schema);
          intent.optional_slots = slots_from_optional(n.schema);
          intent.transactional = TriBool::Unknown;
          warnings.push_back(LossRecord{
              LossField::Transactionality,
              "tool " + n.name +
                  ": no machine-readable transactionality flag survives"});
          return mk_intent(std::move(intent));
        } else if constexpr (std::is_same_v<T, ToolCallT>) {
          return mk_execute(n.name,
                            decode_bindings(encode_bindings(n.params)));
        } else if constexpr (std::is_same_v<T, ResourceT>) {
          undefined = UndefinedReason::NoSgdEquivalentResource;
          return mk_nil();
        } else if constexpr (std::is_same_v<T, PromptT>) {
          undefined = UndefinedReason::NoSgdEquivalentPrompt;
          return mk_nil();
        } else if constexpr (std::is_same_v<T, InitializeT>) {
          undefined = UndefinedReason::NoSgdEquivalentInitialize;
          return mk_nil();
        } else if constexpr (std::is_same_v<T, ToolsListT>) {
          undefined = UndefinedReason::NoSgdEquivalentToolsList;
          return mk_nil();
        } else if constexpr (std::is_same_v<T, ResultTermT> ||
                             std::is_same_v<T, ErrorTermT> ||
                             std::is_same_v<T, NilT>) {
          return mk(T{n});
        } else if constexpr (std::is_same_v<T, ParT>) {
          TermPtr l = reverse_plain(n.left, warnings, undefined);
          TermPtr r = reverse_plain(n.right, warnings, undefined);
          return mk_par(std::move(l), std::move(r));
        } else if constexpr (std::is_same_v<T, RestrictT>) {
          return mk_restrict(n.channel,
                             reverse_plain(n.body, warnings, undefined));
        } else if constexpr (std::is_same_v<T, ReplT>) {
          return mk_repl(reverse_plain(n.body, warnings, undefined), n.budget);
        } else if constexpr (std::is_same_v<T, ValidateT>) {
          throw UnsupportedTerm(
              "validation states are runtime intermediates with no clause in "
              "the reverse mapping");
        } else {
          throw NotMcpTerm("term is not in the tool calculus");
        }
      },
      t->node);
}

}  // namespace

MapOutcome mcp_to_sgd(const TermPtr& mcp) {
  if (!is_pure_mcp(mcp))
    throw NotMcpTerm("term contains dialogue-calculus constructs");
  reject_extended(mcp);
  MapOutcome out;
  std::optional<UndefinedReason> undefined;
  TermPtr mapped = reverse_plain(mcp, out.warnings, undefined);
  if (undefined) {
    out.undefined = undefined;
    out.warnings.clear();
  } else {
    out.term = mapped;
  }
  return out;
}

TermPtr mcp_plus_to_sgd(const TermPtr& mcp_plus) {
  const auto* tool = as<ToolT>(mcp_plus);
  if (!tool) {
    // Composite terms invert componentwise; only extended tools carry the
    // metadata this inverse consumes.
    return std::visit(
        [&](const auto& n) -> TermPtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ParT>) {
            return mk_par(mcp_plus_to_sgd(n.left), mcp_plus_to_sgd(n.right));
          } else if constexpr (std::is_same_v<T, RestrictT>) {
            return mk_restrict(n.channel, mcp_plus_to_sgd(n.body));
          } else if constexpr (std::is_same_v<T, ReplT>) {
            return mk_repl(mcp_plus_to_sgd(n.body), n.budget);
          } else if constexpr (std::is_same_v<T, ToolCallT>) {
            return mk_execute(n.name,
                              decode_bindings(encode_bindings(n.params)));
          } else if constexpr (std::is_same_v<T, ResultTermT> ||
                               std::is_same_v<T, ErrorTermT> ||
                               std::is_same_v<T, NilT>) {
            return mk(T{n});
          } else {
            throw NotMcpTerm(
                "extended inverse applies to extended tools and shared "
                "constructors");
          }
        },
        mcp_plus->node);
  }

  if (!tool->metadata) throw MissingMetadata("metadata");
  const ToolMetadata& m = *tool->metadata;
  if (tool->description.empty()) throw MissingMetadata("description");
  if (!m.side_effects) throw MissingMetadata("side_effects");
  if (!m.failure_modes) throw MissingMetadata("failure_modes");
  if (!m.dependencies) throw MissingMetadata("dependencies");

  IntentT intent;
  intent.name = tool->name;
  intent.description = tool->description;
  intent.required_slots = slots_from_required(tool->schema);
  intent.optional_slots = slots_from_optional(tool->schema);
  bool tx = *m.side_effects == SideEffects::Write ||
            *m.side_effects == SideEffects::Delete;
  intent.transactional = tx ? TriBool::True : TriBool::False;
  intent.failure_modes = *m.failure_modes;
  intent.dependencies = *m.dependencies;
  return mk_intent(std::move(intent));
}

// ---------------------------------------------------------------------------
// Round trips
// ---------------------------------------------------------------------------

namespace {

void diff_intents(const std::string& prefix, const IntentT& a, const IntentT& b,
                  std::vector<FieldDiff>& out) {
  auto field = [&](const char* name, const Json& before, const Json& after) {
    if (before != after)
      out.push_back(FieldDiff{prefix + name, before, after});
  };
  field("name", a.name, b.name);
  field("description", a.description, b.description);
  auto slots = [](const std::vector<SlotDef>& v) {
    Json arr = Json::array();
    for (const auto& s : v) {
      Json j{{"name", s.name}, {"type", s.type_name},
             {"description", s.description}};
      if (!s.possible_values.empty()) j["values"] = s.possible_values;
      arr.push_back(j);
    }
    return arr;
  };
  field("required", slots(a.required_slots), slots(b.required_slots));
  field("optional", slots(a.optional_slots), slots(b.optional_slots));
  field("transactional", tribool_to_json(a.transactional),
        tribool_to_json(b.transactional));
  auto fms = [](const std::vector<FailureMode>& v) {
    Json arr = Json::array();
    for (const auto& f : v) arr.push_back(failure_mode_to_json(f));
    return arr;
  };
  field("failure_modes", fms(a.failure_modes), fms(b.failure_modes));
  auto deps = [](const std::vector<Dependency>& v) {
    Json arr = Json::array();
    for (const auto& d : v) arr.push_back(dependency_to_json(d));
    return arr;
  };
  field("dependencies", deps(a.dependencies), deps(b.dependencies));
}

void diff_terms(const std::string& prefix, const TermPtr& a, const TermPtr& b,
                std::vector<FieldDiff>& out) {
  const auto* ia = as<IntentT>(a);
  const auto* ib = as<IntentT>(b);
  if (ia && ib) {
    diff_intents(prefix, *ia, *ib, out);
    return;
  }
  const auto* pa = as<ParT>(a);
  const auto* pb = as<ParT>(b);
  if (pa && pb) {
    diff_terms(prefix + "left.", pa->left, pb->left, out);
    diff_terms(prefix + "right.", pa->right, pb->right, out);
    return;
  }
  const auto* ra = as<RestrictT>(a);
  const auto* rb = as<RestrictT>(b);
  if (ra && rb) {
    diff_terms(prefix + "body.", ra->body, rb->body, out);
    return;
  }
  const auto* la = as<ReplT>(a);
  const auto* lb = as<ReplT>(b);
  if (la && lb) {
    diff_terms(prefix + "body.", la->body, lb->body, out);
    return;
  }
  if (!term_eq(a, b))
    out.push_back(FieldDiff{prefix + "term", term_to_json(a), term_to_json(b)});
}

void intent_loss_warnings(const TermPtr& term,
                          std::vector<LossRecord>& warnings) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntentT>) {
          if (n.transactional == TriBool::True)
            warnings.push_back(LossRecord{
                LossField::ApprovalProtocol,
                "intent " + n.name +
                    ": approval requirement has no plain-protocol carrier"});
          if (!n.failure_modes.empty())
            warnings.push_back(
                LossRecord{LossField::FailureModes,
                           "intent " + n.name +
                               ": recovery strategies are dropped by the "
                               "plain mapping"});
          if (!n.dependencies.empty())
            warnings.push_back(LossRecord{
                LossField::Dependencies,
                "intent " + n.name +
                    ": dependency records are dropped by the plain mapping"});
        } else if constexpr (std::is_same_v<T, ParT>) {
          intent_loss_warnings(n.left, warnings);
          intent_loss_warnings(n.right, warnings);
        } else if constexpr (std::is_same_v<T, RestrictT> ||
                             std::is_same_v<T, ReplT>) {
          intent_loss_warnings(n.body, warnings);
        }
      },
      term->node);
}

}  // namespace

Json RoundTripReport::to_json() const {
  Json j = Json::object();
  j["identity"] = identity;
  Json d = Json::array();
  for (const auto& f : diff)
    d.push_back(Json{{"field", f.field}, {"before", f.before}, {"after", f.after}});
  j["diff"] = d;
  Json w = Json::array();
  for (const auto& l : warnings)
    w.push_back(Json{{"field", loss_field_name(l.field)}, {"detail", l.detail}});
  j["warnings"] = w;
  return j;
}

RoundTripReport round_trip_report(const TermPtr& term, RoundTripMode mode) {
  RoundTripReport report;
  if (mode == RoundTripMode::Plain) {
    TermPtr image = sgd_to_mcp(term);
    MapOutcome back = mcp_to_sgd(image);
    if (!back.mapped())
      throw ToolkitError("plain round trip lost the whole term");
    report.warnings = back.warnings;
    intent_loss_warnings(term, report.warnings);
    diff_terms("", term, *back.term, report.diff);
    report.identity = report.diff.empty();
    return report;
  }
  if (is_pure_sgd(term)) {
    TermPtr image = sgd_to_mcp_plus(term);
    TermPtr back = mcp_plus_to_sgd(image);
    diff_terms("", term, back, report.diff);
    report.identity = report.diff.empty();
    return report;
  }
  // Extended-tool side: the opposite composition must also be the identity.
  TermPtr back = mcp_plus_to_sgd(term);
  TermPtr again = sgd_to_mcp_plus(back);
  if (!term_eq(term, again))
    report.diff.push_back(
        FieldDiff{"term", term_to_json(term), term_to_json(again)});
  report.identity = report.diff.empty();
  return report;
}

// ---------------------------------------------------------------------------
// Registry-level mapping
// ---------------------------------------------------------------------------

McpRegistry map_sgd_registry(const SgdRegistry& reg, bool plus) {
  McpRegistry out;
  for (const auto& intent : reg.intents)
    out.tools.push_back(plus ? sgd_to_mcp_plus(intent) : sgd_to_mcp(intent));
  return out;
}

SgdMapResult map_mcp_registry(const McpRegistry& reg, bool plus) {
  SgdMapResult out;
  if (!reg.resources.empty()) {
    out.undefined = UndefinedReason::NoSgdEquivalentResource;
    return out;
  }
  if (!reg.prompts.empty()) {
    out.undefined = UndefinedReason::NoSgdEquivalentPrompt;
    return out;
  }
  SgdRegistry sgd;
  sgd.service_name = "mapped_service";
  for (const auto& tool : reg.tools) {
    if (plus) {
      sgd.intents.push_back(mcp_plus_to_sgd(tool));
    } else {
      MapOutcome o = mcp_to_sgd(tool);
      if (!o.mapped()) {
        out.undefined = o.undefined;
        return out;
      }
      out.warnings.insert(out.warnings.end(), o.warnings.begin(),
                          o.warnings.end());
      sgd.intents.push_back(*o.term);
    }
  }
  out.registry = std::move(sgd);
  return out;
}

}  // namespace protocheck
