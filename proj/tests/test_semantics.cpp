#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "protocheck/fixtures.hpp"
#include "protocheck/semantics.hpp"

using namespace protocheck;
namespace fx = fixtures;

namespace {

using SuccKey = std::pair<std::string, std::string>;

std::set<SuccKey> keys(const std::vector<Successor>& succ) {
  std::set<SuccKey> out;
  for (const auto& [l, t] : succ) out.insert({l.key(), term_key(t)});
  return out;
}

SuccKey expect(const TransitionLabel& l, const TermPtr& t) {
  return {l.key(), term_key(canonicalize(t))};
}

TermPtr search_flights_execute() {
  return mk_execute("SearchFlights", Bindings{{"q", Literal::text("x")}});
}

}  // namespace

// One fixture per transition rule; each successor set is compared against a
// hand-derived expected set, exactly.

TEST_CASE("rule: invoke with all required slots present") {
  ExploreConfig cfg;
  cfg.param_universe["BookFlight"] = {fx::book_flight_ok_params()};
  auto succ = sgd_step(fx::book_flight_intent(), cfg);
  CHECK(keys(succ) ==
        std::set<SuccKey>{expect(
            TransitionLabel::invoke("BookFlight", fx::book_flight_ok_params()),
            mk_execute("BookFlight", fx::book_flight_ok_params()))});
}

TEST_CASE("rule: invoke with a required slot missing") {
  ExploreConfig cfg;
  cfg.param_universe["BookFlight"] = {fx::book_flight_deficient_params()};
  auto succ = sgd_step(fx::book_flight_intent(), cfg);
  CHECK(keys(succ) ==
        std::set<SuccKey>{
            expect(TransitionLabel::invoke("BookFlight",
                                           fx::book_flight_deficient_params()),
                   mk_error("MissingSlots", "date"))});
}

TEST_CASE("rule: slot collection substitutes into the continuation") {
  ExploreConfig cfg;
  TermPtr cont = mk_execute(
      "BookFlight", Bindings{{"origin", Literal::text("ZRH")},
                             {"date", Literal::var("date")}});
  TermPtr term = mk_collect("date", Literal::text("2026-03-15"), cont);
  auto succ = sgd_step(term, cfg);
  CHECK(keys(succ) ==
        std::set<SuccKey>{
            expect(TransitionLabel::collect("date", Literal::text("2026-03-15")),
                   mk_execute("BookFlight",
                              Bindings{{"origin", Literal::text("ZRH")},
                                       {"date", Literal::text("2026-03-15")}}))});
}

TEST_CASE("rule: transactional execution steps once under granted approval") {
  // The originating intent is transactional; the environment oracle grants,
  // so execution is a single step to the oracle's result.
  ExploreConfig cfg;
  TermPtr pending = mk_execute("BookFlight", fx::book_flight_ok_params());
  auto succ = sgd_step(pending, cfg);
  CHECK(keys(succ) ==
        std::set<SuccKey>{expect(
            TransitionLabel::execute("BookFlight"),
            mk_result(Literal::text("ok:BookFlight"), "BookFlight"))});
}

TEST_CASE("rule: non-transactional execution steps identically") {
  ExploreConfig cfg;
  auto succ = sgd_step(search_flights_execute(), cfg);
  CHECK(keys(succ) ==
        std::set<SuccKey>{expect(
            TransitionLabel::execute("SearchFlights"),
            mk_result(Literal::text("ok:SearchFlights"), "SearchFlights"))});
}

TEST_CASE("rule: parallel composition interleaves both sides") {
  ExploreConfig cfg;
  TermPtr left = mk_collect("a", Literal::integer(1), mk_nil());
  TermPtr right = search_flights_execute();
  auto succ = sgd_step(mk_par(left, right), cfg);
  CHECK(keys(succ) ==
        std::set<SuccKey>{
            expect(TransitionLabel::collect("a", Literal::integer(1)),
                   mk_par(mk_nil(), right)),
            expect(TransitionLabel::execute("SearchFlights"),
                   mk_par(left, mk_result(Literal::text("ok:SearchFlights"),
                                          "SearchFlights")))});
}

TEST_CASE("rule: restriction is transparent to the step") {
  ExploreConfig cfg;
  TermPtr term =
      mk_restrict("c", mk_collect("a", Literal::integer(1), mk_nil()));
  auto succ = sgd_step(term, cfg);
  CHECK(keys(succ) ==
        std::set<SuccKey>{
            expect(TransitionLabel::collect("a", Literal::integer(1)),
                   mk_restrict("#0", mk_nil()))});
}

TEST_CASE("rule: negotiation intersects capabilities and exposes the listing") {
  ExploreConfig cfg;
  cfg.server_caps = {"resources", "tools"};
  cfg.available_tools = {fx::create_issue_tool()};
  auto succ = mcp_step(mk_initialize({"tools", "sampling"}), cfg);
  CHECK(keys(succ) ==
        std::set<SuccKey>{
            expect(TransitionLabel::tau(TauReason::Negotiate),
                   mk_tools_list({fx::create_issue_tool()}, {"tools"}))});
}

TEST_CASE("rule: discovery filters by name or summary substring") {
  ExploreConfig cfg;
  cfg.list_filters = {"issue"};
  TermPtr listing =
      mk_tools_list({fx::create_issue_tool(), fx::delete_user_tool(true, true)});
  auto succ = mcp_step(listing, cfg);
  // The match keeps only the issue tool; the extended tool also answers a
  // detail request (two-level disclosure).
  CHECK(keys(succ) ==
        std::set<SuccKey>{
            expect(TransitionLabel::list("issue"), fx::create_issue_tool()),
            expect(TransitionLabel::detail("delete_user"),
                   fx::delete_user_tool(true, true))});
}

TEST_CASE("rule: a call always reaches validation") {
  ExploreConfig cfg;
  cfg.param_universe["create_issue"] = {fx::create_issue_ok_params()};
  TermPtr issue = fx::create_issue_tool();
  auto succ = mcp_step(issue, cfg);
  const auto* tool = as<ToolT>(issue);
  ValidateT v{"create_issue", fx::create_issue_ok_params(), tool->schema,
              false, {}};
  CHECK(keys(succ) ==
        std::set<SuccKey>{expect(
            TransitionLabel::call("create_issue", fx::create_issue_ok_params()),
            mk_validate(std::move(v)))});
}

TEST_CASE("rule: validation success is a silent step to the pending call") {
  ExploreConfig cfg;
  TermPtr issue = fx::create_issue_tool();
  const auto* tool = as<ToolT>(issue);
  TermPtr v = mk_validate(ValidateT{"create_issue",
                                    fx::create_issue_ok_params(),
                                    tool->schema, false, {}});
  auto succ = mcp_step(v, cfg);
  CHECK(keys(succ) ==
        std::set<SuccKey>{expect(
            TransitionLabel::tau(TauReason::Validate),
            mk_tool_call(ToolCallT{"create_issue",
                                   fx::create_issue_ok_params(), false, {}}))});
}

TEST_CASE("rule: validation failure is a silent step to the error") {
  ExploreConfig cfg;
  TermPtr issue = fx::create_issue_tool();
  const auto* tool = as<ToolT>(issue);
  Bindings missing_title{{"owner", Literal::text("anthropic")},
                         {"repo", Literal::text("mcp")}};
  TermPtr v = mk_validate(
      ValidateT{"create_issue", missing_title, tool->schema, false, {}});
  auto succ = mcp_step(v, cfg);
  CHECK(keys(succ) ==
        std::set<SuccKey>{expect(TransitionLabel::tau(TauReason::Validate),
                                 mk_error("ValidationError", "title"))});
}

TEST_CASE("rule: pending call executes through the effect oracle") {
  ExploreConfig cfg;
  TermPtr c = mk_tool_call(
      ToolCallT{"create_issue", fx::create_issue_ok_params(), false, {}});
  auto succ = mcp_step(c, cfg);
  CHECK(keys(succ) ==
        std::set<SuccKey>{expect(
            TransitionLabel::execute("create_issue"),
            mk_result(Literal::text("ok:create_issue"), "create_issue"))});
}

TEST_CASE("rule: a resource answers a read with its content") {
  ExploreConfig cfg;
  TermPtr resource = fx::log_resource();
  auto succ = mcp_step(resource, cfg);
  const auto* res = as<ResourceT>(resource);
  CHECK(keys(succ) ==
        std::set<SuccKey>{expect(TransitionLabel::read(res->uri),
                                 mk_result(res->content))});
}

TEST_CASE("results and errors emit their payload and stop") {
  ExploreConfig cfg;
  auto r = sgd_step(mk_result(Literal::text("v")), cfg);
  CHECK(keys(r) == std::set<SuccKey>{expect(
                       TransitionLabel::result(Literal::text("v")), mk_nil())});
  auto e = mcp_step(mk_error("ValidationError", "title"), cfg);
  CHECK(keys(e) ==
        std::set<SuccKey>{expect(
            TransitionLabel::error("ValidationError", "title"), mk_nil())});
}

TEST_CASE("step functions reject terms of the other calculus") {
  ExploreConfig cfg;
  CHECK_THROWS_AS(sgd_step(fx::create_issue_tool(), cfg), NotSgdTerm);
  CHECK_THROWS_AS(mcp_step(fx::book_flight_intent(), cfg), NotMcpTerm);
  CHECK_THROWS_AS(sgd_step(fx::book_flight_intent(), ExploreConfig{}),
                  MissingParamUniverse);
}

TEST_CASE("booking-intent system has the derived shape") {
  Lts lts = build_lts(fx::book_flight_intent(), fx::book_flight_config());
  // Hand enumeration: intent, pending execution, missing-slots error,
  // result, nil.
  CHECK(lts.states.size() == 5);
  CHECK(lts.transitions.size() == 5);
  CHECK(!lts.truncated);
  CHECK(is<IntentT>(lts.states[lts.initial]));
}

TEST_CASE("issue-tool system has the derived shape") {
  Lts lts = build_lts(fx::create_issue_tool(), fx::create_issue_config());
  // Tool, two validation states, pending call, error, result, nil.
  CHECK(lts.states.size() == 7);
  CHECK(lts.transitions.size() == 7);
}

TEST_CASE("interleaving of two identical resources collapses by congruence") {
  TermPtr two = mk_par(fx::log_resource(), fx::log_resource());
  Lts lts = build_lts(two, ExploreConfig{});
  // Hand enumeration: R|R, R|Res, Res|Res, R, Res, 0 with six transitions;
  // the symmetric moves are identified by canonicalization.
  CHECK(lts.states.size() == 6);
  CHECK(lts.transitions.size() == 6);
}

TEST_CASE("nil system is a single stuck state") {
  Lts lts = build_lts(mk_nil(), ExploreConfig{});
  CHECK(lts.states.size() == 1);
  CHECK(lts.transitions.empty());
  auto ts = traces(lts, 3);
  REQUIRE(ts.sequences.size() == 1);
  CHECK(ts.sequences[0].empty());
}

TEST_CASE("booking traces include the full success path") {
  Lts lts = build_lts(fx::book_flight_intent(), fx::book_flight_config());
  auto ts = traces(lts, 3);
  bool found = false;
  for (const auto& seq : ts.sequences) {
    if (seq.size() == 3 && seq[0].kind == TransitionLabel::Kind::Invoke &&
        seq[1].kind == TransitionLabel::Kind::Execute &&
        seq[2].kind == TransitionLabel::Kind::Result)
      found = true;
  }
  CHECK(found);
}

TEST_CASE("write-capable tool traces show both approval branches") {
  McpRegistry reg = fx::delete_user_registry(true, true);
  Lts lts = build_lts(registry_process(reg), default_universe_for(reg));
  auto ts = traces(lts, 5);
  bool granted = false, declined = false;
  for (const auto& seq : ts.sequences) {
    if (seq.size() == 5 && seq[0].kind == TransitionLabel::Kind::Call &&
        seq[1].kind == TransitionLabel::Kind::Tau &&
        seq[2].kind == TransitionLabel::Kind::Approval && seq[2].confirm &&
        seq[3].kind == TransitionLabel::Kind::Execute &&
        seq[4].kind == TransitionLabel::Kind::Result)
      granted = true;
    if (seq.size() == 4 && seq[2].kind == TransitionLabel::Kind::Approval &&
        !seq[2].confirm && seq[3].kind == TransitionLabel::Kind::Result &&
        seq[3].output == Literal::text("cancelled"))
      declined = true;
  }
  CHECK(granted);
  CHECK(declined);
}

TEST_CASE("replication unfolds a bounded number of copies") {
  ExploreConfig cfg;
  cfg.repl_unfold_bound = 2;
  Lts lts = build_lts(mk_repl(fx::log_resource()), cfg);
  CHECK(lts.truncated);  // the body is still active when the budget runs out
  // With budget 2 every state holds at most two unfolded copies.
  for (const auto& s : lts.states) {
    std::string printed = print_term(s);
    CHECK(printed.find("![") != std::string::npos);
  }
  // A nil body never hits the bound.
  Lts quiet = build_lts(mk_repl(mk_nil()), cfg);
  CHECK(!quiet.truncated);
  CHECK(quiet.states.size() == 1);
}

TEST_CASE("state budget truncates and is reported") {
  ExploreConfig cfg = fx::book_flight_config();
  cfg.max_states = 2;
  Lts lts = build_lts(fx::book_flight_intent(), cfg);
  CHECK(lts.truncated);
  CHECK(lts.states.size() <= 2);
  CHECK(traces(lts, 4).partial);
}

TEST_CASE("successor lists are deterministic and order-stable") {
  ExploreConfig cfg = fx::book_flight_config();
  auto a = sgd_step(fx::book_flight_intent(), cfg);
  auto b = sgd_step(fx::book_flight_intent(), cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    CHECK(term_eq(a[i].second, b[i].second));
  }
  Lts l1 = build_lts(fx::book_flight_intent(), cfg);
  Lts l2 = build_lts(fx::book_flight_intent(), cfg);
  CHECK(l1.to_json() == l2.to_json());
}

TEST_CASE("parallel congruence agrees with componentwise steps") {
  ExploreConfig cfg = fx::book_flight_config();
  std::vector<TermPtr> family = {
      mk_nil(),
      mk_result(Literal::text("v")),
      mk_error("MissingSlots", "date"),
      mk_collect("a", Literal::integer(1), mk_nil()),
      search_flights_execute(),
      fx::book_flight_intent(),
  };
  for (const auto& a : family) {
    for (const auto& b : family) {
      auto composed = keys(sgd_step(mk_par(a, b), cfg));
      std::set<SuccKey> expected;
      for (const auto& [l, t] : sgd_step(a, cfg))
        expected.insert({l.key(), term_key(canonicalize(mk_par(t, b)))});
      for (const auto& [l, t] : sgd_step(b, cfg))
        expected.insert({l.key(), term_key(canonicalize(mk_par(a, t)))});
      CHECK(composed == expected);
    }
  }
}

TEST_CASE("conformance equals the required-and-enum predicate") {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 500; ++round) {
    JsonSchema schema;
    int n_props = 1 + rng() % 4;
    for (int i = 0; i < n_props; ++i) {
      std::string name = "p" + std::to_string(i);
      PropertySpec p{"string", "", std::nullopt};
      if (rng() % 3 == 0)
        p.enum_values = std::vector<std::string>{"ok1", "ok2"};
      if (rng() % 2) schema.required.push_back(name);
      schema.properties.emplace(name, std::move(p));
    }
    Bindings params;
    for (int i = 0; i < n_props; ++i) {
      if (rng() % 3 == 0) continue;  // leave some out
      std::string name = "p" + std::to_string(i);
      params.emplace(name, rng() % 4 == 0 ? Literal::text("rogue")
                                          : Literal::text("ok1"));
    }
    bool expected = true;
    for (const auto& r : schema.required)
      expected = expected && params.count(r) > 0;
    for (const auto& [k, v] : params) {
      auto it = schema.properties.find(k);
      if (it == schema.properties.end() || !it->second.enum_values) continue;
      const auto& allowed = *it->second.enum_values;
      expected = expected &&
                 std::find(allowed.begin(), allowed.end(), v.str()) !=
                     allowed.end();
    }
    CHECK(conforms(params, schema) == expected);
  }
}

TEST_CASE("transition systems round-trip through JSON and render to dot") {
  Lts lts = build_lts(fx::book_flight_intent(), fx::book_flight_config());
  Lts back = Lts::from_json(lts.to_json());
  CHECK(back.to_json() == lts.to_json());
  std::string dot = lts.to_dot();
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("->") != std::string::npos);
}

TEST_CASE("dependency gate blocks until the producer's result is present") {
  McpRegistry pair = fx::dependent_pair_registry(true);
  ExploreConfig cfg = fx::dependent_pair_config(pair);
  Lts lts = build_lts(registry_process(pair), cfg);
  // No trace may execute the dependent tool before the producer.
  auto ts = traces(lts, 10);
  for (const auto& seq : ts.sequences) {
    bool producer_done = false;
    for (const auto& l : seq) {
      if (l.kind == TransitionLabel::Kind::Execute) {
        if (l.name == "create_order") producer_done = true;
        if (l.name == "process_payment") CHECK(producer_done);
      }
    }
  }
  // The handshake label itself appears.
  bool requires_seen = false;
  for (const auto& t : lts.transitions)
    requires_seen = requires_seen ||
                    (t.label.kind == TransitionLabel::Kind::Requires &&
                     t.label.token == "create_order");
  CHECK(requires_seen);
}
