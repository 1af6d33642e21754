#pragma once

#include <fstream>
#include <random>
#include <sstream>

#include "protocheck/semantics.hpp"

namespace protocheck {
namespace testing {

inline std::string read_data_file(const std::string& name) {
  std::string path = std::string(TEST_DATA_DIR) + "/" + name;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing test data file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Random system over a small label alphabet; states are distinct result
/// terms so the structure round-trips like any other system.
inline Lts random_lts(std::mt19937_64& rng, std::size_t max_states,
                      std::size_t n_labels) {
  static const TransitionLabel alphabet[] = {
      TransitionLabel::read("a"),
      TransitionLabel::read("b"),
      TransitionLabel::execute("x"),
      TransitionLabel::result(Literal::text("v")),
  };
  Lts lts;
  std::size_t n = 1 + rng() % max_states;
  for (std::size_t i = 0; i < n; ++i)
    lts.states.push_back(mk_result(Literal::integer(static_cast<int>(i))));
  std::size_t edges = rng() % (2 * n + 1);
  for (std::size_t i = 0; i < edges; ++i) {
    Transition t;
    t.src = rng() % n;
    t.dst = rng() % n;
    t.label = alphabet[rng() % std::min<std::size_t>(n_labels, 4)];
    lts.transitions.push_back(t);
  }
  return lts;
}

/// Small random dialogue-calculus terms for structural-property tests.
inline TermPtr random_sgd_term(std::mt19937_64& rng, int depth = 0) {
  int pick = static_cast<int>(rng() % (depth >= 3 ? 4 : 7));
  switch (pick) {
    case 0:
      return mk_nil();
    case 1:
      return mk_result(Literal::integer(static_cast<int>(rng() % 10)));
    case 2:
      return mk_error("E" + std::to_string(rng() % 3), "m");
    case 3: {
      Bindings b;
      if (rng() % 2) b.emplace("x", Literal::text("v"));
      if (rng() % 2) b.emplace("y", Literal::var("s"));
      if (rng() % 3 == 0) b.emplace("c", Literal::chan("k"));
      return mk_execute("f" + std::to_string(rng() % 3), std::move(b));
    }
    case 4:
      return mk_par(random_sgd_term(rng, depth + 1),
                    random_sgd_term(rng, depth + 1));
    case 5:
      return mk_restrict("c" + std::to_string(rng() % 2),
                         random_sgd_term(rng, depth + 1));
    default:
      return mk_repl(random_sgd_term(rng, depth + 1),
                     static_cast<int>(rng() % 3));
  }
}

}  // namespace testing
}  // namespace protocheck
