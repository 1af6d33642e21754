#pragma once

#include <string>
#include <vector>

#include "protocheck/term.hpp"

namespace protocheck {

/// A parsed tool-protocol manifest: tool/resource/prompt terms plus server
/// capabilities. Unknown wire keys ride along in `extras` and are re-emitted.
struct McpRegistry {
  std::vector<TermPtr> tools;
  std::vector<TermPtr> resources;
  std::vector<TermPtr> prompts;
  std::vector<std::string> server_caps;
  Json extras = Json::object();

  const ToolT* find_tool(const std::string& name) const;
};

/// A parsed dialogue service schema.
struct SgdRegistry {
  std::string service_name;
  std::vector<TermPtr> intents;
  std::vector<std::string> warnings;  // e.g. missing transactionality flags

  const IntentT* find_intent(const std::string& name) const;
};

/// Parses a tools/list-shaped manifest document. The optional `x-mcp-plus`
/// object on a tool entry carries the five-principle metadata block.
McpRegistry parse_mcp_manifest(const std::string& document);

/// Emits the manifest with sorted object keys and 2-space indentation;
/// parse_mcp_manifest(emit_manifest(r)) == r on canonical-form manifests.
std::string emit_manifest(const McpRegistry& r);

/// Parses a service schema: service_name, slots, intents with
/// required_slots/optional_slots resolved against the slot table.
SgdRegistry parse_sgd_schema(const std::string& document);

std::string emit_sgd_schema(const SgdRegistry& r);

/// Parallel composition of all registry members, the registry's process
/// encoding. Nil for an empty registry.
TermPtr registry_process(const McpRegistry& r);
TermPtr registry_process(const SgdRegistry& r);

}  // namespace protocheck
