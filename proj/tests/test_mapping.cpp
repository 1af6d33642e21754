#include <random>
#include <unordered_set>

#include "doctest.h"
#include "helpers.hpp"
#include "protocheck/fixtures.hpp"
#include "protocheck/generate.hpp"
#include "protocheck/mapping.hpp"
#include "protocheck/typecheck.hpp"

using namespace protocheck;
namespace fx = fixtures;

TEST_CASE("forward image of an intent is a tool over schema(R, O)") {
  TermPtr image = sgd_to_mcp(fx::enum_flight_intent());
  const auto* tool = as<ToolT>(image);
  REQUIRE(tool != nullptr);
  CHECK(tool->name == "BookFlight");
  CHECK(tool->description == "Books a flight");
  CHECK(tool->schema.required == std::vector<std::string>{"origin"});
  const auto& origin = tool->schema.properties.at("origin");
  CHECK(origin.type_name == "string");
  CHECK(origin.description == "Departure airport");
  REQUIRE(origin.enum_values.has_value());
  CHECK(*origin.enum_values == fx::airports());
  CHECK(!tool->metadata.has_value());  // the plain mapping drops the flag
}

TEST_CASE("forward mapping is homomorphic on shared constructors") {
  CHECK(is<NilT>(sgd_to_mcp(mk_nil())));
  std::mt19937_64 rng(41);
  for (int i = 0; i < 200; ++i) {
    TermPtr s1 = testing::random_sgd_term(rng);
    TermPtr s2 = testing::random_sgd_term(rng);
    CHECK(term_eq(sgd_to_mcp(mk_par(s1, s2)),
                  mk_par(sgd_to_mcp(s1), sgd_to_mcp(s2))));
    CHECK(term_eq(sgd_to_mcp(mk_restrict("c", s1)),
                  mk_restrict("c", sgd_to_mcp(s1))));
    CHECK(term_eq(sgd_to_mcp(mk_repl(s1, 2)), mk_repl(sgd_to_mcp(s1), 2)));
  }
}

TEST_CASE("forward mapping re-encodes execution bindings") {
  Bindings b{{"origin", Literal::text("ZRH")}, {"n", Literal::integer(2)}};
  TermPtr image = sgd_to_mcp(mk_execute("f", b));
  const auto* call = as<ToolCallT>(image);
  REQUIRE(call != nullptr);
  CHECK(call->params == b);
}

TEST_CASE("forward mapping never outputs the tool-only primitives") {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 300; ++i) {
    TermPtr image = sgd_to_mcp(testing::random_sgd_term(rng));
    std::function<void(const TermPtr&)> walk = [&](const TermPtr& t) {
      CHECK(!is<ResourceT>(t));
      CHECK(!is<PromptT>(t));
      CHECK(!is<InitializeT>(t));
      CHECK(!is<ToolsListT>(t));
      if (const auto* p = as<ParT>(t)) {
        walk(p->left);
        walk(p->right);
      } else if (const auto* r = as<RestrictT>(t)) {
        walk(r->body);
      } else if (const auto* rep = as<ReplT>(t)) {
        walk(rep->body);
      }
    };
    walk(image);
  }
}

TEST_CASE("slot-collection prefixes have no forward clause") {
  TermPtr c = mk_collect("s", Literal::text("v"), mk_nil());
  CHECK_THROWS_AS(sgd_to_mcp(c), UnsupportedTerm);
  CHECK_THROWS_AS(sgd_to_mcp(fx::create_issue_tool()), NotSgdTerm);
}

TEST_CASE("reverse mapping: tool becomes an intent with unknown flag") {
  MapOutcome o = mcp_to_sgd(fx::delete_user_tool(false, false));
  REQUIRE(o.mapped());
  const auto* intent = as<IntentT>(*o.term);
  REQUIRE(intent != nullptr);
  CHECK(intent->name == "delete_user");
  CHECK(intent->transactional == TriBool::Unknown);
  REQUIRE(intent->required_slots.size() == 1);
  CHECK(intent->required_slots[0].name == "user_id");
  REQUIRE(o.warnings.size() == 1);
  CHECK(o.warnings[0].field == LossField::Transactionality);
}

TEST_CASE("reverse mapping: resources and negotiation have no image") {
  MapOutcome r = mcp_to_sgd(fx::log_resource());
  CHECK(!r.mapped());
  CHECK(r.undefined == UndefinedReason::NoSgdEquivalentResource);

  MapOutcome p = mcp_to_sgd(mk_prompt("tpl", {}));
  CHECK(p.undefined == UndefinedReason::NoSgdEquivalentPrompt);

  MapOutcome n = mcp_to_sgd(fx::negotiation_term());
  CHECK(n.undefined == UndefinedReason::NoSgdEquivalentInitialize);

  MapOutcome l = mcp_to_sgd(mk_tools_list({}));
  CHECK(l.undefined == UndefinedReason::NoSgdEquivalentToolsList);

  // A composite with any undefined component is undefined, first reason wins.
  MapOutcome mixed = mcp_to_sgd(
      mk_par(fx::create_issue_tool(), fx::log_resource()));
  CHECK(!mixed.mapped());
  CHECK(mixed.undefined == UndefinedReason::NoSgdEquivalentResource);
}

TEST_CASE("reverse mapping refuses extended tools") {
  CHECK_THROWS_AS(mcp_to_sgd(fx::delete_user_tool(true, true)),
                  McpPlusNotAccepted);
}

TEST_CASE("reverse mapping orders optional slots by name") {
  ToolT t;
  t.name = "x";
  t.description = "d";
  t.schema.required = {"b"};
  t.schema.properties = {
      {"b", PropertySpec{"string", "", std::nullopt}},
      {"z", PropertySpec{"string", "", std::nullopt}},
      {"a", PropertySpec{"string", "", std::nullopt}},
  };
  MapOutcome o = mcp_to_sgd(mk_tool(std::move(t)));
  const auto* intent = as<IntentT>(*o.term);
  REQUIRE(intent->optional_slots.size() == 2);
  CHECK(intent->optional_slots[0].name == "a");
  CHECK(intent->optional_slots[1].name == "z");
}

TEST_CASE("extended mapping attaches the five metadata fields") {
  TermPtr image = sgd_to_mcp_plus(fx::book_flight_intent());
  const auto* tool = as<ToolT>(image);
  REQUIRE(tool != nullptr);
  REQUIRE(tool->metadata.has_value());
  const auto& m = *tool->metadata;
  CHECK(m.side_effects == SideEffects::Write);
  CHECK(m.requires_approval == true);
  CHECK(m.summary == "Books a flight reservation");
  CHECK(m.failure_modes->empty());
  CHECK(m.dependencies->empty());

  // Non-transactional intents map to read without approval.
  IntentT i;
  i.name = "search";
  i.description = "Searches things. Second sentence.";
  i.transactional = TriBool::False;
  TermPtr read_image = sgd_to_mcp_plus(mk_intent(std::move(i)));
  const auto& rm = *as<ToolT>(read_image)->metadata;
  CHECK(rm.side_effects == SideEffects::Read);
  CHECK(rm.requires_approval == false);
  CHECK(rm.summary == "Searches things.");
}

TEST_CASE("extended mapping carries annotation records") {
  IntentT i;
  i.name = "sync";
  i.description = "Synchronizes records.";
  i.transactional = TriBool::True;
  i.failure_modes = {{"ServiceDown", RecoveryStrategy::retry(3)}};
  i.dependencies = {{"auth", DepRelation::Requires}};
  TermPtr image = sgd_to_mcp_plus(mk_intent(IntentT{i}));
  const auto& m = *as<ToolT>(image)->metadata;
  CHECK(*m.failure_modes == i.failure_modes);
  CHECK(*m.dependencies == i.dependencies);
}

TEST_CASE("extended mapping needs a definite transactionality flag") {
  IntentT i;
  i.name = "x";
  i.description = "d";
  i.transactional = TriBool::Unknown;
  CHECK_THROWS_AS(sgd_to_mcp_plus(mk_intent(std::move(i))),
                  UnknownTransactionality);
}

TEST_CASE("extended inverse reconstructs the intent exactly") {
  TermPtr intent = fx::book_flight_intent();
  CHECK(term_eq(mcp_plus_to_sgd(sgd_to_mcp_plus(intent)), intent));

  // delete also reads back as transactional.
  TermPtr tool = fx::delete_user_tool(true, true);
  TermPtr back = mcp_plus_to_sgd(tool);
  const auto* i = as<IntentT>(back);
  REQUIRE(i != nullptr);
  CHECK(i->transactional == TriBool::True);
}

TEST_CASE("extended inverse names the missing field") {
  TermPtr base = sgd_to_mcp_plus(fx::book_flight_intent());
  const auto* tool = as<ToolT>(base);

  auto drop = [&](auto mutate) {
    ToolT t = *tool;
    mutate(t);
    return mk_tool(std::move(t));
  };

  auto expect_missing = [&](const TermPtr& t, const std::string& field) {
    try {
      mcp_plus_to_sgd(t);
      return std::string("<no error>") == field;
    } catch (const MissingMetadata& e) {
      return e.field == field;
    }
  };

  CHECK(expect_missing(drop([](ToolT& t) { t.description.clear(); }),
                       "description"));
  CHECK(expect_missing(
      drop([](ToolT& t) { t.metadata->side_effects.reset(); }),
      "side_effects"));
  CHECK(expect_missing(
      drop([](ToolT& t) { t.metadata->failure_modes.reset(); }),
      "failure_modes"));
  CHECK(expect_missing(
      drop([](ToolT& t) { t.metadata->dependencies.reset(); }),
      "dependencies"));

  // A missing summary does not block inversion: it is derived, not carried.
  TermPtr no_summary = drop([](ToolT& t) { t.metadata->summary.reset(); });
  CHECK(term_eq(mcp_plus_to_sgd(no_summary), fx::book_flight_intent()));
}

TEST_CASE("first sentence extraction") {
  CHECK(first_sentence("Books a flight reservation") ==
        "Books a flight reservation");
  CHECK(first_sentence("Creates an order. Then more.") == "Creates an order.");
  CHECK(first_sentence("Uses v1.2 protocol. Rest.") == "Uses v1.2 protocol.");
  CHECK(first_sentence("Ends with a period.") == "Ends with a period.");
  CHECK(first_sentence("") == "");
}

TEST_CASE("plain round trip shows exactly the transactionality loss") {
  auto rep = round_trip_report(fx::create_order_intent(), RoundTripMode::Plain);
  CHECK(!rep.identity);
  REQUIRE(rep.diff.size() == 1);
  CHECK(rep.diff[0].field == "transactional");
  CHECK(rep.diff[0].before == Json(true));
  CHECK(rep.diff[0].after == Json("unknown"));
  // The loss records cover the dropped approval behavior too.
  bool has_tx = false, has_approval = false;
  for (const auto& w : rep.warnings) {
    has_tx = has_tx || w.field == LossField::Transactionality;
    has_approval = has_approval || w.field == LossField::ApprovalProtocol;
  }
  CHECK(has_tx);
  CHECK(has_approval);
}

TEST_CASE("plain round trip on a non-transactional intent still loses the flag") {
  IntentT i;
  i.name = "s";
  i.description = "Searches.";
  i.transactional = TriBool::False;
  auto rep = round_trip_report(mk_intent(std::move(i)), RoundTripMode::Plain);
  REQUIRE(rep.diff.size() == 1);
  CHECK(rep.diff[0].field == "transactional");
  CHECK(rep.diff[0].before == Json(false));
  CHECK(rep.diff[0].after == Json("unknown"));
}

TEST_CASE("plain round trip drops annotation records and says so") {
  IntentT i;
  i.name = "sync";
  i.description = "Synchronizes records.";
  i.transactional = TriBool::True;
  i.failure_modes = {{"ServiceDown", RecoveryStrategy::retry(3)}};
  i.dependencies = {{"auth", DepRelation::Requires}};
  auto rep = round_trip_report(mk_intent(std::move(i)), RoundTripMode::Plain);
  std::set<std::string> fields;
  for (const auto& d : rep.diff) fields.insert(d.field);
  CHECK(fields ==
        std::set<std::string>{"transactional", "failure_modes", "dependencies"});
}

TEST_CASE("extended round trip is the identity in both modes") {
  auto rep = round_trip_report(fx::create_order_intent(), RoundTripMode::Plus);
  CHECK(rep.identity);
  CHECK(rep.diff.empty());

  TermPtr tool = sgd_to_mcp_plus(fx::book_flight_intent());
  auto rep2 = round_trip_report(tool, RoundTripMode::Plus);
  CHECK(rep2.identity);
}

TEST_CASE("reverse images of the description-variant pair coincide structurally") {
  auto [m1, m2] = fx::transfer_funds_pair();
  CHECK(!term_eq(m1, m2));
  auto o1 = mcp_to_sgd(m1);
  auto o2 = mcp_to_sgd(m2);
  REQUIRE(o1.mapped());
  REQUIRE(o2.mapped());
  CHECK(structural_eq(*o1.term, *o2.term));
  CHECK(!term_eq(*o1.term, *o2.term));  // the descriptions still differ
}

TEST_CASE("extended mapping is injective on a generated corpus") {
  gen::IntentOptions opts;
  opts.annotate = true;
  auto intents = gen::random_intents(300, 97, opts);
  std::unordered_set<std::string> images;
  for (const auto& intent : intents)
    images.insert(term_key(sgd_to_mcp_plus(intent)));
  CHECK(images.size() == intents.size());
}

TEST_CASE("well-formed extended tools are in the image of the mapping") {
  auto tools = gen::random_extended_tools(300, 101);
  for (const auto& tool : tools)
    CHECK(term_eq(sgd_to_mcp_plus(mcp_plus_to_sgd(tool)), tool));
}

TEST_CASE("a registry that passes the type check inverts totally") {
  // Sufficiency bridge: every principle verdict passing means no metadata
  // field is missing, so the extended inverse is total on the registry.
  McpRegistry reg =
      parse_mcp_manifest(testing::read_data_file("corrected_tools.json"));
  REQUIRE(typecheck_registry(reg, TypecheckConfig{}).pass);
  for (const auto& tool : reg.tools)
    CHECK_NOTHROW(mcp_plus_to_sgd(tool));
  auto mapped = map_mcp_registry(reg, /*plus=*/true);
  CHECK(mapped.registry.has_value());

  // Deleting a field fails the matching principle and blocks inversion at
  // the same field.
  McpRegistry broken = reg;
  ToolT t = *as<ToolT>(broken.tools[0]);
  t.metadata->failure_modes.reset();
  broken.tools[0] = mk_tool(std::move(t));
  auto report = typecheck_registry(broken, TypecheckConfig{});
  CHECK(!report.pass);
  CHECK_THROWS_AS(mcp_plus_to_sgd(broken.tools[0]), MissingMetadata);
}
