// Acceptance suite: one check per criterion, one pass/fail line each.
// Exit status is the number of failing criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <unordered_set>

#include "helpers.hpp"
#include "protocheck/equivalence.hpp"
#include "protocheck/fixtures.hpp"
#include "protocheck/generate.hpp"
#include "protocheck/mapping.hpp"
#include "protocheck/security.hpp"
#include "protocheck/typecheck.hpp"

using namespace protocheck;
namespace fx = fixtures;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name,
               const std::function<bool(std::string&)>& body,
               double budget_seconds = 0.0) {
  std::string detail;
  auto start = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (budget_seconds > 0 && elapsed > budget_seconds) {
    ok = false;
    detail += " [over time budget]";
  }
  std::printf("%s  %2d. %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", number,
              name.c_str(), elapsed, detail.empty() ? "" : " -- ",
              detail.c_str());
  if (!ok) ++g_failures;
}

bool expect(bool cond, std::string& detail, const std::string& msg) {
  if (!cond && detail.empty()) detail = msg;
  return cond;
}

// --- criterion 1: rule fixtures -------------------------------------------

using SuccKey = std::pair<std::string, std::string>;

std::set<SuccKey> keys(const std::vector<Successor>& succ) {
  std::set<SuccKey> out;
  for (const auto& [l, t] : succ) out.insert({l.key(), term_key(t)});
  return out;
}

SuccKey ex(const TransitionLabel& l, const TermPtr& t) {
  return {l.key(), term_key(canonicalize(t))};
}

bool rule_fixtures(std::string& detail) {
  int passed = 0;
  auto rule = [&](const char* name, bool ok) {
    if (ok) {
      ++passed;
    } else if (detail.empty()) {
      detail = std::string("rule fixture failed: ") + name;
    }
  };

  Bindings ok_params = fx::book_flight_ok_params();
  Bindings bad_params = fx::book_flight_deficient_params();

  {  // dialogue calculus
    ExploreConfig cfg;
    cfg.param_universe["BookFlight"] = {ok_params};
    rule("invoke-ok",
         keys(sgd_step(fx::book_flight_intent(), cfg)) ==
             std::set<SuccKey>{ex(TransitionLabel::invoke("BookFlight", ok_params),
                                  mk_execute("BookFlight", ok_params))});
  }
  {
    ExploreConfig cfg;
    cfg.param_universe["BookFlight"] = {bad_params};
    rule("invoke-err",
         keys(sgd_step(fx::book_flight_intent(), cfg)) ==
             std::set<SuccKey>{
                 ex(TransitionLabel::invoke("BookFlight", bad_params),
                    mk_error("MissingSlots", "date"))});
  }
  {
    ExploreConfig cfg;
    TermPtr cont = mk_execute("f", Bindings{{"date", Literal::var("date")}});
    rule("collect",
         keys(sgd_step(mk_collect("date", Literal::text("2026-03-15"), cont),
                       cfg)) ==
             std::set<SuccKey>{ex(
                 TransitionLabel::collect("date", Literal::text("2026-03-15")),
                 mk_execute("f", Bindings{{"date",
                                           Literal::text("2026-03-15")}}))});
  }
  {
    ExploreConfig cfg;  // transactional execution, approval granted
    rule("execute-transactional",
         keys(sgd_step(mk_execute("BookFlight", ok_params), cfg)) ==
             std::set<SuccKey>{
                 ex(TransitionLabel::execute("BookFlight"),
                    mk_result(Literal::text("ok:BookFlight"), "BookFlight"))});
  }
  {
    ExploreConfig cfg;  // plain execution
    rule("execute",
         keys(sgd_step(mk_execute("SearchFlights", Bindings{}), cfg)) ==
             std::set<SuccKey>{ex(
                 TransitionLabel::execute("SearchFlights"),
                 mk_result(Literal::text("ok:SearchFlights"), "SearchFlights"))});
  }
  {
    ExploreConfig cfg;
    TermPtr left = mk_collect("a", Literal::integer(1), mk_nil());
    TermPtr right = mk_result(Literal::text("v"));
    rule("par",
         keys(sgd_step(mk_par(left, right), cfg)) ==
             std::set<SuccKey>{
                 ex(TransitionLabel::collect("a", Literal::integer(1)),
                    mk_par(mk_nil(), right)),
                 ex(TransitionLabel::result(Literal::text("v")),
                    mk_par(left, mk_nil()))});
  }
  {
    ExploreConfig cfg;
    rule("res",
         keys(sgd_step(mk_restrict("c",
                                   mk_collect("a", Literal::integer(1), mk_nil())),
                       cfg)) ==
             std::set<SuccKey>{
                 ex(TransitionLabel::collect("a", Literal::integer(1)),
                    mk_restrict("#0", mk_nil()))});
  }

  {  // tool calculus
    ExploreConfig cfg;
    cfg.server_caps = {"resources", "tools"};
    cfg.available_tools = {fx::create_issue_tool()};
    rule("init",
         keys(mcp_step(mk_initialize({"tools", "sampling"}), cfg)) ==
             std::set<SuccKey>{
                 ex(TransitionLabel::tau(TauReason::Negotiate),
                    mk_tools_list({fx::create_issue_tool()}, {"tools"}))});
  }
  {
    ExploreConfig cfg;
    cfg.list_filters = {"issue"};
    rule("discover",
         keys(mcp_step(mk_tools_list({fx::create_issue_tool(),
                                      fx::delete_user_tool(true, true)}),
                       cfg)) ==
             std::set<SuccKey>{
                 ex(TransitionLabel::list("issue"), fx::create_issue_tool()),
                 ex(TransitionLabel::detail("delete_user"),
                    fx::delete_user_tool(true, true))});
  }
  TermPtr issue = fx::create_issue_tool();
  const auto* issue_tool = as<ToolT>(issue);
  Bindings call_params = fx::create_issue_ok_params();
  {
    ExploreConfig cfg;
    cfg.param_universe["create_issue"] = {call_params};
    rule("call",
         keys(mcp_step(fx::create_issue_tool(), cfg)) ==
             std::set<SuccKey>{
                 ex(TransitionLabel::call("create_issue", call_params),
                    mk_validate(ValidateT{"create_issue", call_params,
                                          issue_tool->schema, false, {}}))});
  }
  {
    ExploreConfig cfg;
    rule("validate-ok",
         keys(mcp_step(mk_validate(ValidateT{"create_issue", call_params,
                                             issue_tool->schema, false, {}}),
                       cfg)) ==
             std::set<SuccKey>{
                 ex(TransitionLabel::tau(TauReason::Validate),
                    mk_tool_call(
                        ToolCallT{"create_issue", call_params, false, {}}))});
  }
  {
    ExploreConfig cfg;
    Bindings missing{{"owner", Literal::text("anthropic")},
                     {"repo", Literal::text("mcp")}};
    rule("validate-err",
         keys(mcp_step(mk_validate(ValidateT{"create_issue", missing,
                                             issue_tool->schema, false, {}}),
                       cfg)) ==
             std::set<SuccKey>{ex(TransitionLabel::tau(TauReason::Validate),
                                  mk_error("ValidationError", "title"))});
  }
  {
    ExploreConfig cfg;
    rule("mcp-execute",
         keys(mcp_step(mk_tool_call(
                           ToolCallT{"create_issue", call_params, false, {}}),
                       cfg)) ==
             std::set<SuccKey>{
                 ex(TransitionLabel::execute("create_issue"),
                    mk_result(Literal::text("ok:create_issue"),
                              "create_issue"))});
  }
  {
    ExploreConfig cfg;
    TermPtr resource = fx::log_resource();
    const auto* res = as<ResourceT>(resource);
    rule("resource",
         keys(mcp_step(resource, cfg)) ==
             std::set<SuccKey>{ex(TransitionLabel::read(res->uri),
                                  mk_result(res->content))});
  }

  if (passed != 14 && detail.empty())
    detail = "only " + std::to_string(passed) + "/14 rule fixtures passed";
  return passed == 14;
}

// --- criterion 2 ------------------------------------------------------------

bool instance_bisim_suite(std::string& detail) {
  auto intents = gen::random_intents(200, 2026);
  ExploreConfig cfg = gen::matched_universe(intents);
  int equivalent = 0;
  for (const auto& intent : intents) {
    Lts a = build_lts(intent, cfg);
    Lts b = build_lts(sgd_to_mcp(intent), cfg);
    if (bisimilar(a, b, BisimMode::Weak, /*unify_errors=*/true).equivalent)
      ++equivalent;
  }
  if (!expect(equivalent == 200, detail,
              "weak equivalence held on " + std::to_string(equivalent) +
                  "/200 intents"))
    return false;

  // Strong mode must fail on the designated fixture, documenting that the
  // relation only holds up to silent absorption.
  ExploreConfig bf = fx::book_flight_config();
  Lts a = build_lts(fx::book_flight_intent(), bf);
  Lts b = build_lts(sgd_to_mcp(fx::book_flight_intent()), bf);
  return expect(!bisimilar(a, b, BisimMode::Strong, true).equivalent, detail,
                "strong mode unexpectedly equated the designated fixture");
}

// --- criterion 3 ------------------------------------------------------------

bool oracle_agreement(std::string& detail) {
  std::mt19937_64 rng(777);
  int agree = 0;
  for (int i = 0; i < 500; ++i) {
    Lts a = testing::random_lts(rng, 8, 4);
    Lts b = testing::random_lts(rng, 8, 4);
    BisimMode mode = i % 2 == 0 ? BisimMode::Strong : BisimMode::Weak;
    auto fast = bisimilar(a, b, mode, false);
    auto slow = brute_force_bisim(a, b, mode, false);
    if (fast.equivalent == slow.equivalent) ++agree;
  }
  return expect(agree == 500, detail,
                "agreement on " + std::to_string(agree) + "/500 pairs");
}

// --- criterion 4 ------------------------------------------------------------

bool trace_suite(std::string& detail) {
  auto intents = gen::random_intents(200, 2026);
  ExploreConfig cfg = gen::matched_universe(intents);
  int equivalent = 0;
  for (const auto& intent : intents) {
    Lts a = build_lts(intent, cfg);
    Lts b = build_lts(sgd_to_mcp(intent), cfg);
    if (trace_equivalent(a, b, 6, true).equivalent) ++equivalent;
  }
  if (!expect(equivalent == 200, detail,
              "trace equivalence held on " + std::to_string(equivalent) +
                  "/200 intents"))
    return false;

  // The separating pair: same traces, different branching.
  auto mk_lts = [](std::vector<std::vector<std::pair<std::string, int>>> adj) {
    Lts lts;
    for (std::size_t i = 0; i < adj.size(); ++i)
      lts.states.push_back(mk_result(Literal::integer(static_cast<int>(i))));
    for (std::size_t i = 0; i < adj.size(); ++i)
      for (const auto& [label, dst] : adj[i])
        lts.transitions.push_back(
            Transition{i, TransitionLabel::read(label), std::size_t(dst)});
    return lts;
  };
  Lts joined = mk_lts({{{"a", 1}}, {{"b", 2}, {"c", 3}}, {}, {}});
  Lts split = mk_lts({{{"a", 1}, {"a", 2}}, {{"b", 3}}, {{"c", 4}}, {}, {}});
  bool traces_same = trace_equivalent(joined, split, 3, false).equivalent;
  bool bisim_differs =
      !bisimilar(joined, split, BisimMode::Weak, false).equivalent &&
      !bisimilar(joined, split, BisimMode::Strong, false).equivalent;
  return expect(traces_same && bisim_differs, detail,
                "separating pair verdicts were not trace-eq + not-bisimilar");
}

// --- criterion 5 ------------------------------------------------------------

bool gap_regressions(std::string& detail) {
  int passed = 0;
  auto gap = [&](const char* name, bool ok) {
    if (ok) {
      ++passed;
    } else if (detail.empty()) {
      detail = std::string("gap regression failed: ") + name;
    }
  };

  {  // lost transactionality with a loss record
    MapOutcome o = mcp_to_sgd(fx::delete_user_tool(false, false));
    const auto* intent = o.mapped() ? as<IntentT>(*o.term) : nullptr;
    gap("lost-flag", intent && intent->transactional == TriBool::Unknown &&
                         o.warnings.size() == 1 &&
                         o.warnings[0].field == LossField::Transactionality);
  }
  {
    MapOutcome o = mcp_to_sgd(fx::log_resource());
    gap("resource-undefined",
        !o.mapped() && o.undefined == UndefinedReason::NoSgdEquivalentResource);
  }
  {
    MapOutcome o = mcp_to_sgd(fx::negotiation_term());
    gap("negotiation-undefined",
        !o.mapped() &&
            o.undefined == UndefinedReason::NoSgdEquivalentInitialize);
  }
  {
    auto rep =
        round_trip_report(fx::create_order_intent(), RoundTripMode::Plain);
    gap("round-trip-diff", !rep.identity && rep.diff.size() == 1 &&
                               rep.diff[0].field == "transactional");
  }
  {
    auto [m1, m2] = fx::transfer_funds_pair();
    auto o1 = mcp_to_sgd(m1), o2 = mcp_to_sgd(m2);
    gap("non-injective", o1.mapped() && o2.mapped() && !term_eq(m1, m2) &&
                             structural_eq(*o1.term, *o2.term));
  }
  if (passed != 5 && detail.empty())
    detail = std::to_string(passed) + "/5 gap checks passed";
  return passed == 5;
}

// --- criterion 6 ------------------------------------------------------------

bool extended_round_trips(std::string& detail) {
  gen::IntentOptions opts;
  opts.annotate = true;
  auto intents = gen::random_intents(1000, 4242, opts);
  for (const auto& intent : intents) {
    if (!term_eq(mcp_plus_to_sgd(sgd_to_mcp_plus(intent)), intent))
      return expect(false, detail, "intent round trip broke field-exactness");
  }
  auto tools = gen::random_extended_tools(1000, 4343);
  for (const auto& tool : tools) {
    if (!term_eq(sgd_to_mcp_plus(mcp_plus_to_sgd(tool)), tool))
      return expect(false, detail, "tool round trip broke field-exactness");
  }
  std::unordered_set<std::string> images;
  for (const auto& intent : intents)
    images.insert(term_key(sgd_to_mcp_plus(intent)));
  return expect(images.size() == intents.size(), detail,
                "distinct intents collided in the image");
}

// --- criterion 7 ------------------------------------------------------------

bool necessity_matrix(std::string& detail) {
  TermPtr base = sgd_to_mcp_plus(fx::book_flight_intent());
  const auto* tool = as<ToolT>(base);

  auto fails_with = [&](auto mutate, const std::string& field) {
    ToolT t = *tool;
    mutate(t);
    try {
      mcp_plus_to_sgd(mk_tool(std::move(t)));
      return false;
    } catch (const MissingMetadata& e) {
      return e.field == field;
    }
  };

  int hits = 0;
  hits += fails_with([](ToolT& t) { t.description.clear(); }, "description");
  hits += fails_with([](ToolT& t) { t.metadata->side_effects.reset(); },
                     "side_effects");
  hits += fails_with([](ToolT& t) { t.metadata->failure_modes.reset(); },
                     "failure_modes");
  hits += fails_with([](ToolT& t) { t.metadata->dependencies.reset(); },
                     "dependencies");
  if (!expect(hits == 4, detail,
              std::to_string(hits) + "/4 deletions named their field"))
    return false;

  // Deleting the summary alone must still invert, but fail the type check.
  ToolT no_summary = *tool;
  no_summary.metadata->summary.reset();
  TermPtr t = mk_tool(std::move(no_summary));
  bool inverts = term_eq(mcp_plus_to_sgd(t), fx::book_flight_intent());
  bool p4_fails = !check_p4(*as<ToolT>(t), TypecheckConfig{}).pass;
  return expect(inverts && p4_fails, detail,
                "summary deletion should invert but fail the summary rule");
}

// --- criterion 8 ------------------------------------------------------------

bool rule_anchors(std::string& detail) {
  bool ok = true;
  ok = expect(semantic_density("departure") == 0.0, detail,
              "density of a bare type echo is not 0") &&
       ok;
  ok = expect(semantic_density(fx::iata_description()) == 0.3, detail,
              "density of the anchor example is not exactly 0.3") &&
       ok;
  TermPtr unapproved = fx::delete_user_tool(true, false);
  ok = expect(!check_p2(*as<ToolT>(unapproved)).pass, detail,
              "unapproved delete tool passed the boundary rule") &&
       ok;
  McpRegistry reg;
  reg.tools.push_back(fx::fetch_user_data_tool());
  reg.tools.push_back(fx::use_cached_data_tool());
  ok = expect(check_p3(*as<ToolT>(reg.tools[0]), reg).pass, detail,
              "documented failure modes failed the recovery rule") &&
       ok;
  McpRegistry cyc = fx::dependent_pair_registry(true);
  ToolT t = *as<ToolT>(cyc.tools[0]);
  t.metadata->dependencies =
      std::vector<Dependency>{{"process_payment", DepRelation::Requires}};
  cyc.tools[0] = mk_tool(std::move(t));
  ok = expect(!check_p5(cyc).pass, detail,
              "two-cycle passed the relationship rule") &&
       ok;
  return ok;
}

// --- criterion 9 ------------------------------------------------------------

bool token_budget(std::string& detail) {
  TypecheckConfig cfg;
  McpRegistry reg;
  for (int i = 0; i < 50; ++i) {
    ToolT t;
    t.name = "tool_" + std::to_string(i);
    std::string desc, summary;
    for (int w = 0; w < 100; ++w) desc += "w" + std::to_string(w) + " ";
    for (int w = 0; w < 9; ++w) summary += "s" + std::to_string(w) + " ";
    t.description = desc;
    ToolMetadata m;
    m.summary = summary;
    t.metadata = std::move(m);
    reg.tools.push_back(mk_tool(std::move(t)));
  }
  auto report = token_report(reg, cfg);
  if (!expect(report.flag && report.ratio <= 0.19 + 0.01, detail,
              "50-tool corpus ratio " + format_ratio(report.ratio)))
    return false;

  McpRegistry one;
  ToolT t;
  t.name = "only";
  t.description = "w0 w1 w2 w3 w4 w5 w6 w7 w8 w9";
  ToolMetadata m;
  m.summary = "s0";
  t.metadata = std::move(m);
  one.tools.push_back(mk_tool(std::move(t)));
  auto single = token_report(one, cfg);
  return expect(!single.flag, detail,
                "single-tool degenerate case should not clear the bound");
}

// --- criterion 10 -----------------------------------------------------------

bool safety_suite(std::string& detail) {
  int passed = 0;
  auto safety = [&](const char* name, bool ok) {
    if (ok) {
      ++passed;
    } else if (detail.empty()) {
      detail = std::string("safety check failed: ") + name;
    }
  };

  McpRegistry write_reg = fx::delete_user_registry(true, true);
  Lts write_lts =
      build_lts(registry_process(write_reg), default_universe_for(write_reg));
  safety("approval-pass", check_approval_ordering(write_lts, write_reg).pass());

  // Guard-severed mutant: the encoding lacks the handshake while the
  // declaration says delete-capable.
  McpRegistry plain = fx::delete_user_registry(false, false);
  Lts severed =
      build_lts(registry_process(plain), default_universe_for(plain));
  auto sev_report = check_approval_ordering(severed, write_reg);
  bool replayable = false;
  if (!sev_report.pass()) {
    TraceViolation v;
    v.position = sev_report.details.value("position", std::size_t{0});
    for (const auto& l : sev_report.details.at("trace"))
      v.trace.push_back(TransitionLabel::from_json(l));
    replayable = replays(severed, v);
  }
  safety("approval-mutant", !sev_report.pass() && replayable);

  McpRegistry guarded = fx::dependent_pair_registry(true);
  ExploreConfig dep_cfg = fx::dependent_pair_config(guarded);
  Lts dep_lts = build_lts(registry_process(guarded), dep_cfg);
  safety("dependency-pass",
         check_dependency_ordering(dep_lts, guarded).pass());

  McpRegistry loose = fx::dependent_pair_registry(false);
  Lts dep_severed =
      build_lts(registry_process(loose), fx::dependent_pair_config(loose));
  auto dep_violation = check_dependency_ordering(dep_severed, guarded);
  bool dep_replayable = false;
  if (!dep_violation.pass()) {
    TraceViolation v;
    v.position = dep_violation.details.value("position", std::size_t{0});
    for (const auto& l : dep_violation.details.at("trace"))
      v.trace.push_back(TransitionLabel::from_json(l));
    dep_replayable = replays(dep_severed, v);
  }
  safety("dependency-mutant", !dep_violation.pass() && dep_replayable);

  safety("confined-clean", check_confinement(fx::confined_tool_term()).empty());
  safety("leak-found", check_confinement(fx::leaky_term()).size() == 1);

  auto warned = check_inert_descriptions(fx::innocent_search_registry());
  safety("poisoned-advisory",
         warned.pass() && warned.details.contains("advisory_warnings"));

  McpRegistry inert_reg = fx::innocent_search_registry();
  const auto* tool = as<ToolT>(inert_reg.tools[0]);
  TermPtr mutant =
      mk_par(inert_reg.tools[0],
             mk_tool_call(ToolCallT{tool->description, {}, false, {}}));
  safety("string-in-code",
         !check_inert_descriptions(inert_reg, mutant).pass());

  // Both trace checks agree with brute-force path enumeration.
  bool oracle_agree =
      check_approval_ordering(write_lts, write_reg).pass() ==
          approval_ordering_by_paths(write_lts, write_reg).pass() &&
      check_approval_ordering(severed, write_reg).pass() ==
          approval_ordering_by_paths(severed, write_reg).pass() &&
      check_dependency_ordering(dep_lts, guarded).pass() ==
          dependency_ordering_by_paths(dep_lts, guarded).pass() &&
      check_dependency_ordering(dep_severed, guarded).pass() ==
          dependency_ordering_by_paths(dep_severed, guarded).pass();
  if (!expect(oracle_agree, detail,
              "trace checks disagree with path enumeration"))
    return false;

  if (passed != 8 && detail.empty())
    detail = std::to_string(passed) + "/8 safety checks passed";
  return passed == 8;
}

}  // namespace

int main() {
  criterion(1, "rule fixtures match hand-derived successor sets", rule_fixtures,
            1.0);
  criterion(2, "200-intent weak-bisimulation instance suite",
            instance_bisim_suite, 30.0);
  criterion(3, "refinement agrees with the oracle on 500 random pairs",
            oracle_agreement, 60.0);
  criterion(4, "trace-equivalence suite and the separating pair", trace_suite);
  criterion(5, "reverse-mapping gap regressions", gap_regressions);
  criterion(6, "extended round trips on 1000+1000 generated terms",
            extended_round_trips, 30.0);
  criterion(7, "necessity matrix for the metadata fields", necessity_matrix);
  criterion(8, "semantic-density anchors and rule fixtures", rule_anchors);
  criterion(9, "progressive-disclosure token budget", token_budget);
  criterion(10, "safety suite over the security encodings", safety_suite);
  criterion(11,
            "universal claims are covered by instance suites only (by design)",
            [](std::string& detail) {
              detail =
                  "bisimulation and bijection theorems hold universally only "
                  "on paper; this artifact checks seeded instance corpora and "
                  "the structural preconditions";
              return true;
            });

  if (g_failures == 0) {
    std::puts("acceptance: all criteria pass");
  } else {
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
  }
  return g_failures;
}
