#pragma once

#include <cstdint>

#include "protocheck/semantics.hpp"

namespace protocheck {
namespace gen {

struct IntentOptions {
  int max_required = 4;
  int max_optional = 3;
  bool annotate = false;  // attach failure modes and dependency records
};

/// Seeded corpus of distinct intents with definite transactionality flags,
/// enum-respecting slot values, and (optionally) annotation records.
std::vector<TermPtr> random_intents(std::size_t n, std::uint64_t seed,
                                    IntentOptions opts = {});

/// One conforming and one deficient parameter map per intent. The deficient
/// map drops a required key; intents without required slots keep a single
/// conforming map.
ExploreConfig matched_universe(const std::vector<TermPtr>& intents);

/// Seeded corpus of distinct, type-correct extended tools in the image of
/// the forward mapping: side effects read or write, approval equal to
/// transactionality, summary equal to the description's first sentence.
std::vector<TermPtr> random_extended_tools(std::size_t n, std::uint64_t seed);

}  // namespace gen
}  // namespace protocheck
