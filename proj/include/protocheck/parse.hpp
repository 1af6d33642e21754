#pragma once

#include <string>

#include "protocheck/term.hpp"

namespace protocheck {

/// Parses the concrete term syntax. Keywords: intent, collect, exec, tool,
/// resource, prompt, init, tools, call, validate, result, error, new, bang,
/// nil; `|` composes in parallel, `!` replicates, `0` is the null process.
TermPtr parse_term(const std::string& source);

}  // namespace protocheck
