#include "protocheck/registry.hpp"

#include <algorithm>
#include <set>

namespace protocheck {

const ToolT* McpRegistry::find_tool(const std::string& name) const {
  for (const auto& t : tools) {
    const auto* tool = as<ToolT>(t);
    if (tool && tool->name == name) return tool;
  }
  return nullptr;
}

const IntentT* SgdRegistry::find_intent(const std::string& name) const {
  for (const auto& t : intents) {
    const auto* intent = as<IntentT>(t);
    if (intent && intent->name == name) return intent;
  }
  return nullptr;
}

namespace {

Json parse_document(const std::string& text, const char* what) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw MalformedManifest(std::string(what) + ": not valid JSON");
  return j;
}

}  // namespace

McpRegistry parse_mcp_manifest(const std::string& document) {
  Json j = parse_document(document, "manifest");
  if (!j.is_object()) throw MalformedManifest("manifest must be a JSON object");
  if (!j.contains("tools") || !j.at("tools").is_array())
    throw MalformedManifest("manifest has no tools array");

  McpRegistry reg;
  std::set<std::string> names;
  for (const auto& entry : j.at("tools")) {
    if (!entry.is_object())
      throw MalformedManifest("tool entry must be an object");
    ToolT tool;
    bool has_schema = false;
    for (auto it = entry.begin(); it != entry.end(); ++it) {
      const std::string& k = it.key();
      const Json& v = it.value();
      if (k == "name") {
        if (!v.is_string()) throw MalformedManifest("tool name must be a string");
        tool.name = v.get<std::string>();
      } else if (k == "description") {
        if (!v.is_string())
          throw MalformedManifest("tool description must be a string");
        tool.description = v.get<std::string>();
      } else if (k == "inputSchema") {
        tool.schema = schema_from_json(v);
        has_schema = true;
      } else if (k == "x-mcp-plus") {
        tool.metadata = metadata_from_json(v);
      } else {
        tool.extras[k] = v;
      }
    }
    if (tool.name.empty()) throw MalformedManifest("tool entry has no name");
    if (!entry.contains("description"))
      throw MalformedManifest("tool " + tool.name + " has no description");
    if (!has_schema)
      throw MalformedManifest("tool " + tool.name + " has no inputSchema");
    if (!names.insert(tool.name).second)
      throw DuplicateToolName("duplicate tool name: " + tool.name);
    reg.tools.push_back(mk_tool(std::move(tool)));
  }

  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const Json& v = it.value();
    if (k == "tools") continue;
    if (k == "resources") {
      if (!v.is_array()) throw MalformedManifest("resources must be an array");
      for (const auto& r : v) {
        if (!r.is_object() || !r.contains("uri"))
          throw MalformedManifest("resource entry must have a uri");
        Literal content = r.contains("content")
                              ? Literal::from_json(r.at("content"))
                              : Literal::text("");
        reg.resources.push_back(
            mk_resource(r.at("uri").get<std::string>(), content));
      }
    } else if (k == "prompts") {
      if (!v.is_array()) throw MalformedManifest("prompts must be an array");
      for (const auto& p : v) {
        if (!p.is_object() || !p.contains("template"))
          throw MalformedManifest("prompt entry must have a template");
        Bindings args = p.contains("args") ? bindings_from_json(p.at("args"))
                                           : Bindings{};
        reg.prompts.push_back(
            mk_prompt(p.at("template").get<std::string>(), std::move(args)));
      }
    } else if (k == "capabilities") {
      if (!v.is_array()) throw MalformedManifest("capabilities must be an array");
      for (const auto& c : v) reg.server_caps.push_back(c.get<std::string>());
      std::sort(reg.server_caps.begin(), reg.server_caps.end());
    } else {
      reg.extras[k] = v;
    }
  }
  return reg;
}

std::string emit_manifest(const McpRegistry& r) {
  Json j = Json::object();
  Json tools = Json::array();
  for (const auto& t : r.tools) {
    const auto* tool = as<ToolT>(t);
    if (!tool) throw ToolkitError("registry tools must be tool terms");
    Json tj = Json::object();
    tj["name"] = tool->name;
    tj["description"] = tool->description;
    tj["inputSchema"] = schema_to_json(tool->schema);
    if (tool->metadata) tj["x-mcp-plus"] = metadata_to_json(*tool->metadata);
    for (auto it = tool->extras.begin(); it != tool->extras.end(); ++it)
      tj[it.key()] = it.value();
    tools.push_back(tj);
  }
  j["tools"] = tools;
  if (!r.resources.empty()) {
    Json arr = Json::array();
    for (const auto& t : r.resources) {
      const auto* res = as<ResourceT>(t);
      if (!res) throw ToolkitError("registry resources must be resource terms");
      arr.push_back(Json{{"content", res->content.to_json()}, {"uri", res->uri}});
    }
    j["resources"] = arr;
  }
  if (!r.prompts.empty()) {
    Json arr = Json::array();
    for (const auto& t : r.prompts) {
      const auto* p = as<PromptT>(t);
      if (!p) throw ToolkitError("registry prompts must be prompt terms");
      arr.push_back(Json{{"args", bindings_to_json(p->args)},
                         {"template", p->template_text}});
    }
    j["prompts"] = arr;
  }
  if (!r.server_caps.empty()) j["capabilities"] = r.server_caps;
  for (auto it = r.extras.begin(); it != r.extras.end(); ++it)
    j[it.key()] = it.value();
  return j.dump(2) + "\n";
}

SgdRegistry parse_sgd_schema(const std::string& document) {
  Json j = parse_document(document, "service schema");
  if (!j.is_object() || !j.contains("service_name") || !j.contains("slots") ||
      !j.contains("intents"))
    throw MalformedSchema(
        "service schema needs service_name, slots and intents");

  SgdRegistry reg;
  reg.service_name = j.at("service_name").get<std::string>();

  std::map<std::string, SlotDef> slot_table;
  if (!j.at("slots").is_array()) throw MalformedSchema("slots must be an array");
  for (const auto& s : j.at("slots")) {
    if (!s.is_object() || !s.contains("name"))
      throw MalformedSchema("slot entry must have a name");
    SlotDef def;
    def.name = s.at("name").get<std::string>();
    def.type_name = s.value("type", std::string{"string"});
    def.description = s.value("description", std::string{});
    if (s.contains("possible_values"))
      def.possible_values =
          s.at("possible_values").get<std::vector<std::string>>();
    if (!slot_table.emplace(def.name, std::move(def)).second)
      throw MalformedSchema("duplicate slot: " + s.at("name").get<std::string>());
  }

  auto resolve = [&](const std::string& name, const std::string& intent) {
    auto it = slot_table.find(name);
    if (it == slot_table.end())
      throw UnresolvedSlotReference("intent " + intent +
                                    " references unknown slot: " + name);
    return it->second;
  };

  if (!j.at("intents").is_array())
    throw MalformedSchema("intents must be an array");
  std::set<std::string> names;
  for (const auto& e : j.at("intents")) {
    if (!e.is_object() || !e.contains("name"))
      throw MalformedSchema("intent entry must have a name");
    IntentT intent;
    intent.name = e.at("name").get<std::string>();
    if (!names.insert(intent.name).second)
      throw MalformedSchema("duplicate intent name: " + intent.name);
    intent.description = e.value("description", std::string{});
    for (const auto& n : e.value("required_slots", std::vector<std::string>{}))
      intent.required_slots.push_back(resolve(n, intent.name));
    for (const auto& n : e.value("optional_slots", std::vector<std::string>{}))
      intent.optional_slots.push_back(resolve(n, intent.name));
    if (e.contains("is_transactional")) {
      if (!e.at("is_transactional").is_boolean())
        throw MalformedSchema("is_transactional must be a boolean");
      intent.transactional = e.at("is_transactional").get<bool>()
                                 ? TriBool::True
                                 : TriBool::False;
    } else {
      intent.transactional = TriBool::Unknown;
      reg.warnings.push_back("intent " + intent.name +
                             ": is_transactional missing, recorded as unknown");
    }
    for (const auto& f : e.value("failure_modes", Json::array()))
      intent.failure_modes.push_back(failure_mode_from_json(f));
    for (const auto& d : e.value("dependencies", Json::array()))
      intent.dependencies.push_back(dependency_from_json(d));
    reg.intents.push_back(mk_intent(std::move(intent)));
  }
  return reg;
}

std::string emit_sgd_schema(const SgdRegistry& r) {
  Json j = Json::object();
  j["service_name"] = r.service_name;

  std::map<std::string, SlotDef> slot_table;
  auto note = [&](const SlotDef& s) {
    auto [it, inserted] = slot_table.emplace(s.name, s);
    if (!inserted && !(it->second == s))
      throw MalformedSchema("conflicting definitions for slot: " + s.name);
  };

  Json intents = Json::array();
  for (const auto& t : r.intents) {
    const auto* intent = as<IntentT>(t);
    if (!intent) throw ToolkitError("registry intents must be intent terms");
    Json e = Json::object();
    e["name"] = intent->name;
    e["description"] = intent->description;
    Json req = Json::array(), opt = Json::array();
    for (const auto& s : intent->required_slots) {
      note(s);
      req.push_back(s.name);
    }
    for (const auto& s : intent->optional_slots) {
      note(s);
      opt.push_back(s.name);
    }
    e["required_slots"] = req;
    e["optional_slots"] = opt;
    if (intent->transactional != TriBool::Unknown)
      e["is_transactional"] = intent->transactional == TriBool::True;
    if (!intent->failure_modes.empty()) {
      Json arr = Json::array();
      for (const auto& f : intent->failure_modes)
        arr.push_back(failure_mode_to_json(f));
      e["failure_modes"] = arr;
    }
    if (!intent->dependencies.empty()) {
      Json arr = Json::array();
      for (const auto& d : intent->dependencies)
        arr.push_back(dependency_to_json(d));
      e["dependencies"] = arr;
    }
    intents.push_back(e);
  }

  Json slots = Json::array();
  for (const auto& [name, s] : slot_table) {
    Json sj = Json::object();
    sj["name"] = name;
    sj["type"] = s.type_name;
    if (!s.description.empty()) sj["description"] = s.description;
    if (!s.possible_values.empty()) sj["possible_values"] = s.possible_values;
    slots.push_back(sj);
  }
  j["slots"] = slots;
  j["intents"] = intents;
  return j.dump(2) + "\n";
}

namespace {

TermPtr par_fold(const std::vector<TermPtr>& parts) {
  if (parts.empty()) return mk_nil();
  TermPtr acc = parts.back();
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it)
    acc = mk_par(*it, acc);
  return acc;
}

}  // namespace

TermPtr registry_process(const McpRegistry& r) {
  std::vector<TermPtr> parts;
  parts.insert(parts.end(), r.tools.begin(), r.tools.end());
  parts.insert(parts.end(), r.resources.begin(), r.resources.end());
  parts.insert(parts.end(), r.prompts.begin(), r.prompts.end());
  return par_fold(parts);
}

TermPtr registry_process(const SgdRegistry& r) { return par_fold(r.intents); }

}  // namespace protocheck
