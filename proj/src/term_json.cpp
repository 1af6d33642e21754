#include "protocheck/term.hpp"

namespace protocheck {

Json failure_mode_to_json(const FailureMode& f) {
  Json r;
  switch (f.recovery.kind) {
    case RecoveryStrategy::Kind::Retry:
      r = Json{{"kind", "retry"}, {"n", f.recovery.attempts}};
      break;
    case RecoveryStrategy::Kind::Fallback:
      r = Json{{"kind", "fallback"}, {"tool", f.recovery.target}};
      break;
    case RecoveryStrategy::Kind::UserPrompt:
      r = Json{{"kind", "user_prompt"}, {"message", f.recovery.message}};
      break;
    case RecoveryStrategy::Kind::Abort:
      r = Json{{"kind", "abort"}};
      break;
  }
  return Json{{"error", f.error_type}, {"recovery", r}};
}

FailureMode failure_mode_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("error") || !j.contains("recovery"))
    throw ToolkitError("malformed failure mode: " + j.dump());
  FailureMode f;
  f.error_type = j.at("error").get<std::string>();
  const Json& r = j.at("recovery");
  std::string kind = r.at("kind").get<std::string>();
  if (kind == "retry") {
    int n = r.at("n").get<int>();
    if (n < 1) throw ToolkitError("retry count must be >= 1");
    f.recovery = RecoveryStrategy::retry(n);
  } else if (kind == "fallback") {
    f.recovery = RecoveryStrategy::fallback(r.at("tool").get<std::string>());
  } else if (kind == "user_prompt") {
    f.recovery =
        RecoveryStrategy::user_prompt(r.at("message").get<std::string>());
  } else if (kind == "abort") {
    f.recovery = RecoveryStrategy::abort();
  } else {
    throw ToolkitError("unknown recovery kind: " + kind);
  }
  return f;
}

Json dependency_to_json(const Dependency& d) {
  return Json{{"relation", relation_name(d.relation)}, {"tool", d.tool_name}};
}

Dependency dependency_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("tool") || !j.contains("relation"))
    throw ToolkitError("malformed dependency: " + j.dump());
  return Dependency{j.at("tool").get<std::string>(),
                    relation_from_name(j.at("relation").get<std::string>())};
}

Json metadata_to_json(const ToolMetadata& m) {
  Json j = Json::object();
  if (m.side_effects) j["side_effects"] = side_effects_name(*m.side_effects);
  if (m.requires_approval) j["requires_approval"] = *m.requires_approval;
  if (m.failure_modes) {
    Json arr = Json::array();
    for (const auto& f : *m.failure_modes) arr.push_back(failure_mode_to_json(f));
    j["failure_modes"] = arr;
  }
  if (m.summary) j["summary"] = *m.summary;
  if (m.dependencies) {
    Json arr = Json::array();
    for (const auto& d : *m.dependencies) arr.push_back(dependency_to_json(d));
    j["dependencies"] = arr;
  }
  for (auto it = m.extras.begin(); it != m.extras.end(); ++it)
    j[it.key()] = it.value();
  return j;
}

ToolMetadata metadata_from_json(const Json& j) {
  if (!j.is_object()) throw ToolkitError("metadata must be a JSON object");
  ToolMetadata m;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const Json& v = it.value();
    if (k == "side_effects") {
      m.side_effects = side_effects_from_name(v.get<std::string>());
    } else if (k == "requires_approval") {
      if (!v.is_boolean()) throw ToolkitError("requires_approval must be bool");
      m.requires_approval = v.get<bool>();
    } else if (k == "failure_modes") {
      std::vector<FailureMode> fs;
      for (const auto& f : v) fs.push_back(failure_mode_from_json(f));
      m.failure_modes = std::move(fs);
    } else if (k == "summary") {
      m.summary = v.get<std::string>();
    } else if (k == "dependencies") {
      std::vector<Dependency> ds;
      for (const auto& d : v) ds.push_back(dependency_from_json(d));
      m.dependencies = std::move(ds);
    } else {
      m.extras[k] = v;
    }
  }
  return m;
}

Json schema_to_json(const JsonSchema& s) {
  Json props = Json::object();
  for (const auto& [name, p] : s.properties) {
    Json pj = Json::object();
    pj["type"] = p.type_name;
    if (!p.description.empty()) pj["description"] = p.description;
    if (p.enum_values) pj["enum"] = *p.enum_values;
    for (auto it = p.extras.begin(); it != p.extras.end(); ++it)
      pj[it.key()] = it.value();
    props[name] = pj;
  }
  Json j = Json::object();
  j["type"] = "object";
  if (!s.required.empty()) j["required"] = s.required;
  j["properties"] = props;
  for (auto it = s.extras.begin(); it != s.extras.end(); ++it)
    j[it.key()] = it.value();
  return j;
}

namespace {

const std::set<std::string> kRejectedSchemaKeys = {
    "oneOf", "anyOf",  "allOf",          "not",
    "$ref",  "items",  "patternProperties", "additionalProperties",
    "if",    "then",   "else",           "format",
    "default"};

const std::set<std::string> kTypeNames = {"string", "integer", "number",
                                          "boolean", "date"};

}  // namespace

JsonSchema schema_from_json(const Json& j) {
  if (!j.is_object()) throw MalformedManifest("schema must be a JSON object");
  JsonSchema s;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const Json& v = it.value();
    if (kRejectedSchemaKeys.count(k))
      throw UnsupportedSchemaFeature("schema feature not in the accepted subset: " + k);
    if (k == "type") {
      if (!v.is_string() || v.get<std::string>() != "object")
        throw UnsupportedSchemaFeature("top-level schema type must be object");
    } else if (k == "required") {
      if (!v.is_array())
        throw MalformedManifest("schema required must be an array");
      for (const auto& r : v) s.required.push_back(r.get<std::string>());
    } else if (k == "properties") {
      if (!v.is_object())
        throw MalformedManifest("schema properties must be an object");
      for (auto pit = v.begin(); pit != v.end(); ++pit) {
        const Json& pv = pit.value();
        if (!pv.is_object())
          throw MalformedManifest("property spec must be an object");
        PropertySpec p;
        bool has_type = false;
        for (auto fit = pv.begin(); fit != pv.end(); ++fit) {
          const std::string& fk = fit.key();
          const Json& fv = fit.value();
          if (kRejectedSchemaKeys.count(fk) || fk == "properties" ||
              fk == "required")
            throw UnsupportedSchemaFeature(
                "schema feature not in the accepted subset: " + fk);
          if (fk == "type") {
            std::string t = fv.get<std::string>();
            if (!kTypeNames.count(t))
              throw UnsupportedSchemaFeature("property type not supported: " + t);
            p.type_name = t;
            has_type = true;
          } else if (fk == "description") {
            p.description = fv.get<std::string>();
          } else if (fk == "enum") {
            std::vector<std::string> vals;
            for (const auto& e : fv) {
              if (!e.is_string())
                throw UnsupportedSchemaFeature("non-string enum entry");
              vals.push_back(e.get<std::string>());
            }
            std::set<std::string> distinct(vals.begin(), vals.end());
            if (distinct.size() != vals.size())
              throw MalformedManifest("enum repeats a value");
            p.enum_values = std::move(vals);
          } else {
            p.extras[fk] = fv;
          }
        }
        if (!has_type)
          throw MalformedManifest("property " + pit.key() + " has no type");
        s.properties.emplace(pit.key(), std::move(p));
      }
    } else {
      s.extras[k] = v;
    }
  }
  if (!s.well_formed())
    throw MalformedManifest("schema lists a required name with no property");
  return s;
}

namespace {

Json slot_to_json(const SlotDef& s) {
  Json j = Json::object();
  j["name"] = s.name;
  j["type"] = s.type_name;
  if (!s.description.empty()) j["description"] = s.description;
  if (!s.possible_values.empty()) j["values"] = s.possible_values;
  return j;
}

SlotDef slot_from_json(const Json& j) {
  SlotDef s;
  s.name = j.at("name").get<std::string>();
  s.type_name = j.at("type").get<std::string>();
  if (j.contains("description"))
    s.description = j.at("description").get<std::string>();
  if (j.contains("values"))
    s.possible_values = j.at("values").get<std::vector<std::string>>();
  return s;
}

}  // namespace

Json term_to_json(const TermPtr& t) {
  return std::visit(
      [&](const auto& n) -> Json {
        using T = std::decay_t<decltype(n)>;
        Json j = Json::object();
        if constexpr (std::is_same_v<T, NilT>) {
          j["kind"] = "nil";
        } else if constexpr (std::is_same_v<T, IntentT>) {
          j["kind"] = "intent";
          j["name"] = n.name;
          j["description"] = n.description;
          Json req = Json::array(), opt = Json::array();
          for (const auto& s : n.required_slots) req.push_back(slot_to_json(s));
          for (const auto& s : n.optional_slots) opt.push_back(slot_to_json(s));
          j["required"] = req;
          j["optional"] = opt;
          j["transactional"] = tribool_to_json(n.transactional);
          if (!n.failure_modes.empty()) {
            Json arr = Json::array();
            for (const auto& f : n.failure_modes)
              arr.push_back(failure_mode_to_json(f));
            j["failure_modes"] = arr;
          }
          if (!n.dependencies.empty()) {
            Json arr = Json::array();
            for (const auto& d : n.dependencies)
              arr.push_back(dependency_to_json(d));
            j["dependencies"] = arr;
          }
        } else if constexpr (std::is_same_v<T, CollectSlotT>) {
          j["kind"] = "collect";
          j["slot"] = n.slot;
          j["value"] = n.value.to_json();
          j["next"] = term_to_json(n.continuation);
        } else if constexpr (std::is_same_v<T, ExecuteT>) {
          j["kind"] = "execute";
          j["name"] = n.name;
          j["bindings"] = bindings_to_json(n.bindings);
        } else if constexpr (std::is_same_v<T, ToolT>) {
          j["kind"] = "tool";
          j["name"] = n.name;
          j["description"] = n.description;
          j["schema"] = schema_to_json(n.schema);
          if (n.metadata) j["metadata"] = metadata_to_json(*n.metadata);
          if (!n.extras.empty()) j["extras"] = n.extras;
        } else if constexpr (std::is_same_v<T, ResourceT>) {
          j["kind"] = "resource";
          j["uri"] = n.uri;
          j["content"] = n.content.to_json();
        } else if constexpr (std::is_same_v<T, PromptT>) {
          j["kind"] = "prompt";
          j["template"] = n.template_text;
          j["args"] = bindings_to_json(n.args);
        } else if constexpr (std::is_same_v<T, InitializeT>) {
          j["kind"] = "initialize";
          j["caps"] = n.caps;
        } else if constexpr (std::is_same_v<T, ToolsListT>) {
          j["kind"] = "tools_list";
          Json arr = Json::array();
          for (const auto& tool : n.tools) arr.push_back(term_to_json(tool));
          j["tools"] = arr;
          if (!n.caps.empty()) j["caps"] = n.caps;
        } else if constexpr (std::is_same_v<T, ToolCallT>) {
          j["kind"] = "call";
          j["name"] = n.name;
          j["params"] = bindings_to_json(n.params);
          if (n.gate_approval) j["needs_approval"] = true;
          if (!n.gate_requires.empty()) j["after"] = n.gate_requires;
        } else if constexpr (std::is_same_v<T, ValidateT>) {
          j["kind"] = "validate";
          j["name"] = n.pending_name;
          j["params"] = bindings_to_json(n.params);
          j["schema"] = schema_to_json(n.schema);
          if (n.gate_approval) j["needs_approval"] = true;
          if (!n.gate_requires.empty()) j["after"] = n.gate_requires;
        } else if constexpr (std::is_same_v<T, ResultTermT>) {
          j["kind"] = "result";
          j["output"] = n.output.to_json();
          if (!n.producer.empty()) j["producer"] = n.producer;
        } else if constexpr (std::is_same_v<T, ErrorTermT>) {
          j["kind"] = "error";
          j["error_type"] = n.error_type;
          j["message"] = n.message;
        } else if constexpr (std::is_same_v<T, ParT>) {
          j["kind"] = "par";
          j["left"] = term_to_json(n.left);
          j["right"] = term_to_json(n.right);
        } else if constexpr (std::is_same_v<T, RestrictT>) {
          j["kind"] = "restrict";
          j["channel"] = n.channel;
          j["body"] = term_to_json(n.body);
        } else if constexpr (std::is_same_v<T, ReplT>) {
          j["kind"] = "repl";
          j["body"] = term_to_json(n.body);
          if (n.budget >= 0) j["budget"] = n.budget;
        }
        return j;
      },
      t->node);
}

TermPtr term_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ToolkitError("term JSON must be an object with a kind field");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "nil") return mk_nil();
  if (kind == "intent") {
    IntentT i;
    i.name = j.at("name").get<std::string>();
    i.description = j.value("description", std::string{});
    for (const auto& s : j.value("required", Json::array()))
      i.required_slots.push_back(slot_from_json(s));
    for (const auto& s : j.value("optional", Json::array()))
      i.optional_slots.push_back(slot_from_json(s));
    i.transactional = j.contains("transactional")
                          ? tribool_from_json(j.at("transactional"))
                          : TriBool::Unknown;
    for (const auto& f : j.value("failure_modes", Json::array()))
      i.failure_modes.push_back(failure_mode_from_json(f));
    for (const auto& d : j.value("dependencies", Json::array()))
      i.dependencies.push_back(dependency_from_json(d));
    return mk_intent(std::move(i));
  }
  if (kind == "collect") {
    return mk_collect(j.at("slot").get<std::string>(),
                      Literal::from_json(j.at("value")),
                      term_from_json(j.at("next")));
  }
  if (kind == "execute") {
    return mk_execute(j.at("name").get<std::string>(),
                      bindings_from_json(j.value("bindings", Json::object())));
  }
  if (kind == "tool") {
    ToolT t;
    t.name = j.at("name").get<std::string>();
    t.description = j.value("description", std::string{});
    t.schema = schema_from_json(j.at("schema"));
    if (j.contains("metadata")) t.metadata = metadata_from_json(j.at("metadata"));
    if (j.contains("extras")) t.extras = j.at("extras");
    return mk_tool(std::move(t));
  }
  if (kind == "resource") {
    return mk_resource(j.at("uri").get<std::string>(),
                       Literal::from_json(j.at("content")));
  }
  if (kind == "prompt") {
    return mk_prompt(j.at("template").get<std::string>(),
                     bindings_from_json(j.value("args", Json::object())));
  }
  if (kind == "initialize") {
    return mk_initialize(j.value("caps", std::vector<std::string>{}));
  }
  if (kind == "tools_list") {
    std::vector<TermPtr> tools;
    for (const auto& t : j.value("tools", Json::array()))
      tools.push_back(term_from_json(t));
    return mk_tools_list(std::move(tools),
                         j.value("caps", std::vector<std::string>{}));
  }
  if (kind == "call") {
    ToolCallT c;
    c.name = j.at("name").get<std::string>();
    c.params = bindings_from_json(j.value("params", Json::object()));
    c.gate_approval = j.value("needs_approval", false);
    c.gate_requires = j.value("after", std::vector<std::string>{});
    return mk_tool_call(std::move(c));
  }
  if (kind == "validate") {
    ValidateT v;
    v.pending_name = j.at("name").get<std::string>();
    v.params = bindings_from_json(j.value("params", Json::object()));
    v.schema = schema_from_json(j.at("schema"));
    v.gate_approval = j.value("needs_approval", false);
    v.gate_requires = j.value("after", std::vector<std::string>{});
    return mk_validate(std::move(v));
  }
  if (kind == "result") {
    return mk_result(Literal::from_json(j.at("output")),
                     j.value("producer", std::string{}));
  }
  if (kind == "error") {
    return mk_error(j.at("error_type").get<std::string>(),
                    j.value("message", std::string{}));
  }
  if (kind == "par") {
    return mk_par(term_from_json(j.at("left")), term_from_json(j.at("right")));
  }
  if (kind == "restrict") {
    return mk_restrict(j.at("channel").get<std::string>(),
                       term_from_json(j.at("body")));
  }
  if (kind == "repl") {
    return mk_repl(term_from_json(j.at("body")), j.value("budget", -1));
  }
  throw ToolkitError("unknown term kind: " + kind);
}

std::string term_key(const TermPtr& t) { return term_to_json(t).dump(); }

}  // namespace protocheck
