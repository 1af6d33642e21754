#include "protocheck/term.hpp"

#include <sstream>

namespace protocheck {

namespace {

std::string quote(const std::string& s) {
  return Literal::text(s).print();
}

std::string print_slots(const std::vector<SlotDef>& req,
                        const std::vector<SlotDef>& opt) {
  std::ostringstream os;
  auto one = [&](const char* kw, const SlotDef& s) {
    os << "  " << kw << " " << s.name << ": " << s.type_name << " "
       << quote(s.description);
    if (!s.possible_values.empty()) {
      os << " in [";
      for (std::size_t i = 0; i < s.possible_values.size(); ++i) {
        if (i) os << ", ";
        os << quote(s.possible_values[i]);
      }
      os << "]";
    }
    os << "\n";
  };
  for (const auto& s : req) one("required", s);
  for (const auto& s : opt) one("optional", s);
  return os.str();
}

std::string print_recovery(const RecoveryStrategy& r) {
  switch (r.kind) {
    case RecoveryStrategy::Kind::Retry:
      return "retry " + std::to_string(r.attempts);
    case RecoveryStrategy::Kind::Fallback:
      return "fallback " + quote(r.target);
    case RecoveryStrategy::Kind::UserPrompt:
      return "user_prompt " + quote(r.message);
    case RecoveryStrategy::Kind::Abort:
      return "abort";
  }
  return "abort";
}

std::string print_failures(const std::vector<FailureMode>& fs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (i) os << ", ";
    os << fs[i].error_type << " " << print_recovery(fs[i].recovery);
  }
  return os.str();
}

std::string print_deps(const std::vector<Dependency>& ds) {
  std::ostringstream os;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (i) os << ", ";
    os << relation_name(ds[i].relation) << " " << quote(ds[i].tool_name);
  }
  return os.str();
}

std::string print_bindings(const Bindings& b) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [k, v] : b) {
    if (!first) os << ", ";
    first = false;
    os << k << ": " << v.print();
  }
  os << "}";
  return os.str();
}

std::string print_schema_block(const JsonSchema& s) {
  // Schemas reuse the slot-declaration syntax: required names first,
  // remaining properties as optional, each in schema order.
  std::vector<SlotDef> req, opt;
  std::set<std::string> required_set(s.required.begin(), s.required.end());
  for (const auto& name : s.required) {
    const auto& p = s.properties.at(name);
    req.push_back(SlotDef{name, p.type_name, p.description,
                          p.enum_values.value_or(std::vector<std::string>{})});
  }
  for (const auto& [name, p] : s.properties) {
    if (required_set.count(name)) continue;
    opt.push_back(SlotDef{name, p.type_name, p.description,
                          p.enum_values.value_or(std::vector<std::string>{})});
  }
  return "{\n" + print_slots(req, opt) + "}";
}

std::string print_meta(const ToolMetadata& m) {
  std::ostringstream os;
  os << "meta {\n";
  if (m.side_effects)
    os << "  side_effects " << side_effects_name(*m.side_effects) << "\n";
  if (m.requires_approval)
    os << "  requires_approval " << (*m.requires_approval ? "true" : "false")
       << "\n";
  if (m.summary) os << "  summary " << quote(*m.summary) << "\n";
  if (m.failure_modes)
    os << "  failure_modes [" << print_failures(*m.failure_modes) << "]\n";
  if (m.dependencies)
    os << "  dependencies [" << print_deps(*m.dependencies) << "]\n";
  os << "}";
  return os.str();
}

std::string pp(const TermPtr& t);

std::string pp_guarded(const TermPtr& t) {
  // Parenthesize parallel compositions in prefix positions.
  if (is<ParT>(t)) return "(" + pp(t) + ")";
  return pp(t);
}

std::string pp(const TermPtr& t) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NilT>) {
          return "0";
        } else if constexpr (std::is_same_v<T, IntentT>) {
          std::ostringstream os;
          os << "intent " << quote(n.name) << " " << quote(n.description);
          if (n.transactional == TriBool::True) os << " transactional";
          if (n.transactional == TriBool::False) os << " non_transactional";
          os << " {\n" << print_slots(n.required_slots, n.optional_slots);
          if (!n.failure_modes.empty())
            os << "  failures [" << print_failures(n.failure_modes) << "]\n";
          if (!n.dependencies.empty())
            os << "  deps [" << print_deps(n.dependencies) << "]\n";
          os << "}";
          return os.str();
        } else if constexpr (std::is_same_v<T, CollectSlotT>) {
          return "collect " + n.slot + " = " + n.value.print() + " . " +
                 pp_guarded(n.continuation);
        } else if constexpr (std::is_same_v<T, ExecuteT>) {
          return "exec " + quote(n.name) + " " + print_bindings(n.bindings);
        } else if constexpr (std::is_same_v<T, ToolT>) {
          std::string out = "tool " + quote(n.name) + " " +
                            quote(n.description) + " " +
                            print_schema_block(n.schema);
          if (n.metadata) out += " " + print_meta(*n.metadata);
          return out;
        } else if constexpr (std::is_same_v<T, ResourceT>) {
          return "resource " + quote(n.uri) + " " + n.content.print();
        } else if constexpr (std::is_same_v<T, PromptT>) {
          return "prompt " + quote(n.template_text) + " " +
                 print_bindings(n.args);
        } else if constexpr (std::is_same_v<T, InitializeT>) {
          std::string out = "init {";
          for (std::size_t i = 0; i < n.caps.size(); ++i) {
            if (i) out += ", ";
            out += n.caps[i];
          }
          return out + "}";
        } else if constexpr (std::is_same_v<T, ToolsListT>) {
          std::string out = "tools [";
          for (std::size_t i = 0; i < n.tools.size(); ++i) {
            if (i) out += ", ";
            out += pp(n.tools[i]);
          }
          out += "]";
          if (!n.caps.empty()) {
            out += " caps {";
            for (std::size_t i = 0; i < n.caps.size(); ++i) {
              if (i) out += ", ";
              out += n.caps[i];
            }
            out += "}";
          }
          return out;
        } else if constexpr (std::is_same_v<T, ToolCallT>) {
          std::string out = "call " + quote(n.name) + " " +
                            print_bindings(n.params);
          if (n.gate_approval) out += " needs_approval";
          if (!n.gate_requires.empty()) {
            out += " after [";
            for (std::size_t i = 0; i < n.gate_requires.size(); ++i) {
              if (i) out += ", ";
              out += quote(n.gate_requires[i]);
            }
            out += "]";
          }
          return out;
        } else if constexpr (std::is_same_v<T, ValidateT>) {
          std::string out = "validate " + quote(n.pending_name) + " " +
                            print_bindings(n.params) + " " +
                            print_schema_block(n.schema);
          if (n.gate_approval) out += " needs_approval";
          if (!n.gate_requires.empty()) {
            out += " after [";
            for (std::size_t i = 0; i < n.gate_requires.size(); ++i) {
              if (i) out += ", ";
              out += quote(n.gate_requires[i]);
            }
            out += "]";
          }
          return out;
        } else if constexpr (std::is_same_v<T, ResultTermT>) {
          std::string out = "result " + n.output.print();
          if (!n.producer.empty()) out += " from " + quote(n.producer);
          return out;
        } else if constexpr (std::is_same_v<T, ErrorTermT>) {
          return "error " + n.error_type + " " + quote(n.message);
        } else if constexpr (std::is_same_v<T, ParT>) {
          std::string l = is<ParT>(n.left) ? "(" + pp(n.left) + ")" : pp(n.left);
          return l + " | " + pp(n.right);
        } else if constexpr (std::is_same_v<T, RestrictT>) {
          return "(new " + n.channel + ") " + pp_guarded(n.body);
        } else if constexpr (std::is_same_v<T, ReplT>) {
          std::string out = "!";
          if (n.budget >= 0) out += "[" + std::to_string(n.budget) + "]";
          return out + " " + pp_guarded(n.body);
        }
        return "";
      },
      t->node);
}

}  // namespace

std::string print_term(const TermPtr& t) { return pp(t); }

}  // namespace protocheck
