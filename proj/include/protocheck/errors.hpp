#pragma once

#include <stdexcept>
#include <string>

namespace protocheck {

/// Base class for all toolkit errors. The CLI maps these to exit code 2.
struct ToolkitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- term syntax ---

struct SyntaxError : ToolkitError {
  int line;
  int column;
  SyntaxError(int l, int c, const std::string& msg)
      : ToolkitError("syntax error at " + std::to_string(l) + ":" +
                     std::to_string(c) + ": " + msg),
        line(l),
        column(c) {}
};

struct DuplicateSlotError : SyntaxError {
  using SyntaxError::SyntaxError;
};

struct UnknownVariantError : SyntaxError {
  using SyntaxError::SyntaxError;
};

// --- manifests and schemas ---

struct MalformedManifest : ToolkitError {
  using ToolkitError::ToolkitError;
};
struct DuplicateToolName : ToolkitError {
  using ToolkitError::ToolkitError;
};
struct UnsupportedSchemaFeature : ToolkitError {
  using ToolkitError::ToolkitError;
};
struct MalformedSchema : ToolkitError {
  using ToolkitError::ToolkitError;
};
struct UnresolvedSlotReference : ToolkitError {
  using ToolkitError::ToolkitError;
};

// --- semantics and mapping ---

struct NotSgdTerm : ToolkitError {
  using ToolkitError::ToolkitError;
};
struct NotMcpTerm : ToolkitError {
  using ToolkitError::ToolkitError;
};
/// Raised for terms that have no clause in the relevant direction of the
/// mapping (runtime intermediates, slot-collection prefixes).
struct UnsupportedTerm : ToolkitError {
  using ToolkitError::ToolkitError;
};
struct McpPlusNotAccepted : ToolkitError {
  using ToolkitError::ToolkitError;
};
struct UnknownTransactionality : ToolkitError {
  using ToolkitError::ToolkitError;
};

struct MissingMetadata : ToolkitError {
  std::string field;
  explicit MissingMetadata(std::string f)
      : ToolkitError("missing metadata field: " + f), field(std::move(f)) {}
};

struct MissingSummary : ToolkitError {
  std::string tool;
  explicit MissingSummary(std::string t)
      : ToolkitError("tool has no summary: " + t), tool(std::move(t)) {}
};

struct MissingParamUniverse : ToolkitError {
  std::string name;
  explicit MissingParamUniverse(std::string n)
      : ToolkitError("no parameter universe for: " + n), name(std::move(n)) {}
};

struct TooLarge : ToolkitError {
  using ToolkitError::ToolkitError;
};

}  // namespace protocheck
