#include "doctest.h"
#include "helpers.hpp"
#include "protocheck/fixtures.hpp"
#include "protocheck/parse.hpp"

using namespace protocheck;
namespace fx = fixtures;

TEST_CASE("null process and structural composition parse") {
  CHECK(is<NilT>(parse_term("0")));
  CHECK(is<NilT>(parse_term("nil")));

  TermPtr t = parse_term("(new c)(0 | 0)");
  const auto* r = as<RestrictT>(t);
  REQUIRE(r != nullptr);
  CHECK(r->channel == "c");
  const auto* p = as<ParT>(r->body);
  REQUIRE(p != nullptr);
  CHECK(is<NilT>(p->left));
  CHECK(is<NilT>(p->right));
}

TEST_CASE("the flight-booking intent source parses to the fixture term") {
  const char* src = R"src(
    intent "BookFlight" "Books a flight reservation" transactional {
      required origin: string "IATA airport code for departure (e.g., ZRH, JFK, LHR)" in ["ZRH", "JFK", "LHR"]
      required destination: string "IATA airport code for arrival (e.g., ZRH, JFK, LHR)" in ["ZRH", "JFK", "LHR"]
      required date: date "Travel date"
      optional class: string "Cabin class" in ["economy", "business"]
    }
  )src";
  TermPtr t = parse_term(src);
  const auto* i = as<IntentT>(t);
  REQUIRE(i != nullptr);
  CHECK(i->transactional == TriBool::True);
  CHECK(term_eq(t, fx::book_flight_intent()));
}

TEST_CASE("tool, resource, prompt, init, call and collect parse") {
  TermPtr tool = parse_term(R"(
    tool "delete_user" "Permanently deletes a user account" {
      required user_id: string "Account identifier"
    } meta {
      side_effects delete
      requires_approval true
      summary "Deletes a user account."
      failure_modes [NotFound user_prompt "User does not exist."]
      dependencies []
    }
  )");
  CHECK(term_eq(tool, fx::delete_user_tool(true, true)));

  CHECK(is<ResourceT>(parse_term(
      "resource \"file:///var/log/app.log\" \"2026-02-20 10:00:00 ERROR "
      "Connection timeout...\"")));
  CHECK(is<PromptT>(parse_term("prompt \"summarize {x}\" {x: \"log\"}")));
  CHECK(is<InitializeT>(parse_term("init {tools, sampling}")));
  CHECK(is<ToolCallT>(parse_term("call \"f\" {n: 3, q: \"x\"}")));

  TermPtr c = parse_term("collect date = \"2026-03-15\" . exec \"BookFlight\" "
                         "{date: ?date, origin: \"ZRH\"}");
  const auto* cs = as<CollectSlotT>(c);
  REQUIRE(cs != nullptr);
  CHECK(cs->slot == "date");
  CHECK(is<ExecuteT>(cs->continuation));
}

TEST_CASE("parse then print then parse is the identity") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    TermPtr t = testing::random_sgd_term(rng);
    CHECK(term_eq(parse_term(print_term(t)), t));
  }
  std::vector<TermPtr> rich = {
      fx::book_flight_intent(),
      fx::delete_user_tool(true, true),
      fx::create_issue_tool(),
      fx::log_resource(),
      fx::negotiation_term(),
      fx::confined_tool_term(),
      mk_tools_list({fx::create_issue_tool()}, {"tools"}),
      mk_validate(ValidateT{"f", Bindings{{"a", Literal::integer(1)}},
                            JsonSchema{}, true, {"dep"}}),
      mk_repl(mk_result(Literal::decimal(1.5)), 2),
      mk_collect("s", Literal::var("s"), mk_nil()),
  };
  for (const auto& t : rich) CHECK(term_eq(parse_term(print_term(t)), t));
  // Canonical forms print and re-parse too (positional binder names).
  TermPtr canon = canonicalize(mk_restrict("c", mk_par(
      mk_result(Literal::chan("c")), mk_restrict("d", mk_nil()))));
  CHECK(term_eq(parse_term(print_term(canon)), canon));
}

TEST_CASE("parse errors carry position and kind") {
  CHECK_THROWS_AS(parse_term("intent \"x\""), SyntaxError);
  CHECK_THROWS_AS(parse_term("wibble 3"), UnknownVariantError);
  CHECK_THROWS_AS(parse_term(R"(
    intent "x" "d" {
      required a: string ""
      optional a: string ""
    }
  )"),
                  DuplicateSlotError);
  try {
    parse_term("call \"f\" {a: }");
    CHECK(false);
  } catch (const SyntaxError& e) {
    CHECK(e.line == 1);
    CHECK(e.column > 1);
  }
  // Repeated entries in a value list are rejected.
  CHECK_THROWS_AS(parse_term(R"(
    intent "x" "d" { required a: string "" in ["v", "v"] }
  )"),
                  DuplicateSlotError);
}
