#include "doctest.h"
#include "helpers.hpp"
#include "protocheck/fixtures.hpp"
#include "protocheck/security.hpp"
#include "protocheck/typecheck.hpp"

using namespace protocheck;
namespace fx = fixtures;

namespace {

/// A hand-built violating system: call straight to execute, no approval.
Lts severed_approval_lts() {
  Lts lts;
  lts.states = {fx::delete_user_tool(false, false),
                mk_tool_call(ToolCallT{"delete_user",
                                       {{"user_id", Literal::text("u1")}},
                                       false,
                                       {}}),
                mk_result(Literal::text("ok"), "delete_user")};
  lts.transitions = {
      Transition{0,
                 TransitionLabel::call("delete_user",
                                       {{"user_id", Literal::text("u1")}}),
                 1},
      Transition{1, TransitionLabel::execute("delete_user"), 2},
  };
  return lts;
}

TraceViolation violation_of(const VerificationReport& r) {
  TraceViolation v;
  v.property = r.details.value("property", std::string{});
  v.position = r.details.value("position", std::size_t{0});
  for (const auto& l : r.details.at("trace"))
    v.trace.push_back(TransitionLabel::from_json(l));
  return v;
}

}  // namespace

TEST_CASE("the write-approval encoding passes; a severed guard fails") {
  McpRegistry reg = fx::delete_user_registry(true, true);
  Lts good = build_lts(registry_process(reg), default_universe_for(reg));
  CHECK(check_approval_ordering(good, reg).pass());
  CHECK(approval_ordering_by_paths(good, reg).pass());

  Lts bad = severed_approval_lts();
  auto r = check_approval_ordering(bad, reg);
  CHECK(!r.pass());
  TraceViolation v = violation_of(r);
  CHECK(v.trace.size() == 2);
  CHECK(v.position == 1);
  CHECK(replays(bad, v));
  // The oracle finds the same violation.
  CHECK(!approval_ordering_by_paths(bad, reg).pass());
}

TEST_CASE("an ungated write tool in the built system fails the check") {
  // The encoding omits the handshake (plain tool), but the registry says the
  // tool is delete-capable: every execute runs unapproved.
  McpRegistry plain = fx::delete_user_registry(false, false);
  Lts lts = build_lts(registry_process(plain), default_universe_for(plain));
  McpRegistry declared = fx::delete_user_registry(true, true);
  auto r = check_approval_ordering(lts, declared);
  CHECK(!r.pass());
  CHECK(replays(lts, violation_of(r)));
}

TEST_CASE("approvals are tracked per pending call, not globally") {
  // Two independent write tools in parallel: every interleaving must pair
  // each execute with its own approval.
  McpRegistry reg;
  reg.tools.push_back(fx::delete_user_tool(true, true));
  {
    ToolT t = *as<ToolT>(reg.tools[0]);
    t.name = "purge_logs";
    t.description = "Removes old log entries";
    reg.tools.push_back(mk_tool(std::move(t)));
  }
  ExploreConfig cfg = default_universe_for(reg);
  Lts lts = build_lts(registry_process(reg), cfg);
  CHECK(lts.states.size() > 10);  // real interleaving, not a toy chain
  CHECK(check_approval_ordering(lts, reg).pass());
  CHECK(approval_ordering_by_paths(lts, reg, 100000, 64).pass());
}

TEST_CASE("the dependency handshake passes; the severed pair fails") {
  McpRegistry guarded = fx::dependent_pair_registry(true);
  ExploreConfig cfg = fx::dependent_pair_config(guarded);
  Lts good = build_lts(registry_process(guarded), cfg);
  CHECK(check_dependency_ordering(good, guarded).pass());
  CHECK(dependency_ordering_by_paths(good, guarded).pass());

  // Same pair without the synchronization, checked against the declaration.
  McpRegistry unguarded = fx::dependent_pair_registry(false);
  Lts bad = build_lts(registry_process(unguarded),
                      fx::dependent_pair_config(unguarded));
  auto r = check_dependency_ordering(bad, guarded);
  CHECK(!r.pass());
  TraceViolation v = violation_of(r);
  CHECK(v.trace[v.position].kind == TransitionLabel::Kind::Execute);
  CHECK(v.trace[v.position].name == "process_payment");
  bool producer_before = false;
  for (std::size_t i = 0; i < v.position; ++i)
    producer_before = producer_before ||
                      (v.trace[i].kind == TransitionLabel::Kind::Execute &&
                       v.trace[i].name == "create_order");
  CHECK(!producer_before);
  CHECK(replays(bad, v));
  CHECK(!dependency_ordering_by_paths(bad, guarded).pass());
}

TEST_CASE("three-tool chain orders, permuted encoding does not") {
  McpRegistry chain = fx::payment_registry();
  ExploreConfig cfg = default_universe_for(chain);
  Bindings only{{"order_id", Literal::text("o1")}};
  for (auto& [name, maps] : cfg.param_universe) {
    (void)name;
    maps = {only};
  }
  Lts lts = build_lts(registry_process(chain), cfg);
  CHECK(check_dependency_ordering(lts, chain).pass());
  // The full three-strand interleaving exceeds the path-enumeration budget;
  // the oracle is only meant for small path spaces.
  CHECK_THROWS_AS(dependency_ordering_by_paths(lts, chain, 10000, 64),
                  TooLarge);

  // Remove the guards from the encoding and keep the declarations.
  McpRegistry loose = chain;
  for (auto& t : loose.tools) {
    ToolT tool = *as<ToolT>(t);
    tool.metadata->dependencies = std::vector<Dependency>{};
    t = mk_tool(std::move(tool));
  }
  Lts bad = build_lts(registry_process(loose), cfg);
  auto r = check_dependency_ordering(bad, chain);
  CHECK(!r.pass());
  CHECK(replays(bad, violation_of(r)));
}

TEST_CASE("truncated systems are inconclusive, never certified") {
  McpRegistry reg = fx::delete_user_registry(true, true);
  ExploreConfig cfg = default_universe_for(reg);
  cfg.max_states = 2;
  Lts lts = build_lts(registry_process(reg), cfg);
  REQUIRE(lts.truncated);
  CHECK(check_approval_ordering(lts, reg).status ==
        VerificationReport::Status::Inconclusive);
  CHECK(check_dependency_ordering(lts, reg).status ==
        VerificationReport::Status::Inconclusive);
}

TEST_CASE("confinement: the confined pattern is clean, the leak is found") {
  CHECK(check_confinement(fx::confined_tool_term()).empty());

  auto findings = check_confinement(fx::leaky_term());
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].channel == "key");
  CHECK(findings[0].leak_path.find("result.output") != std::string::npos);

  // Internal use next to an independent component stays clean.
  TermPtr par = mk_restrict(
      "key", mk_par(mk_tool_call(ToolCallT{
                        "lookup", {{"auth", Literal::chan("key")}}, false, {}}),
                    mk_tool_call(ToolCallT{"other", {}, false, {}})));
  CHECK(check_confinement(par).empty());

  // A free channel in a result is not a confinement finding.
  CHECK(check_confinement(mk_result(Literal::chan("public"))).empty());

  // Resource contents are emitted on read and count as an escape.
  TermPtr res_leak =
      mk_restrict("key", mk_resource("file:///x", Literal::chan("key")));
  CHECK(check_confinement(res_leak).size() == 1);

  // The report wrapper states the syntactic reduction up front.
  auto report = confinement_report(fx::leaky_term());
  CHECK(!report.pass());
  CHECK(report.note.find("no name passing") != std::string::npos);
}

TEST_CASE("confinement findings are stable under canonicalization") {
  std::vector<TermPtr> terms = {
      fx::confined_tool_term(),
      fx::leaky_term(),
      mk_restrict("a", mk_par(mk_result(Literal::chan("a")),
                              mk_restrict("b", mk_result(Literal::chan("b"))))),
  };
  for (const auto& t : terms) {
    CHECK(check_confinement(t).size() ==
          check_confinement(canonicalize(t)).size());
  }
}

TEST_CASE("inert descriptions: sort check plus advisory markers") {
  // Clean registry: no violations, no warnings.
  McpRegistry clean;
  clean.tools.push_back(fx::create_issue_tool());
  auto r = check_inert_descriptions(clean);
  CHECK(r.pass());
  CHECK(!r.details.contains("advisory_warnings"));

  // The poisoned description passes the sort check with a warning.
  auto warned = check_inert_descriptions(fx::innocent_search_registry());
  CHECK(warned.pass());
  REQUIRE(warned.details.contains("advisory_warnings"));
  CHECK(warned.details["advisory_warnings"].size() == 1);

  // Using a description string as a call name is a sort violation.
  McpRegistry reg = fx::innocent_search_registry();
  const auto* tool = as<ToolT>(reg.tools[0]);
  TermPtr mutant = mk_par(
      reg.tools[0],
      mk_tool_call(ToolCallT{tool->description, {}, false, {}}));
  auto failed = check_inert_descriptions(reg, mutant);
  CHECK(!failed.pass());
  REQUIRE(failed.details.contains("violations"));
  CHECK(failed.details["violations"].size() == 1);
}

TEST_CASE("type-correct boundary declarations imply safe encodings") {
  // Bridge to the typechecker: when the boundary rule holds, the built
  // system satisfies approval ordering; when it is violated, the system
  // fails the trace check too.
  McpRegistry good = fx::delete_user_registry(true, true);
  Lts lts = build_lts(registry_process(good), default_universe_for(good));
  CHECK(check_approval_ordering(lts, good).pass());

  McpRegistry bad = fx::delete_user_registry(true, false);
  Lts bad_lts = build_lts(registry_process(bad), default_universe_for(bad));
  CHECK(!check_approval_ordering(bad_lts, bad).pass());
}

TEST_CASE("declared dependency graphs imply ordered executions") {
  // Bridge from the relationship rule: a passing graph yields encodings the
  // ordering check accepts.
  McpRegistry chain = fx::payment_registry();
  REQUIRE(check_p5(chain).pass);
  ExploreConfig cfg = default_universe_for(chain);
  Bindings only{{"order_id", Literal::text("o1")}};
  for (auto& [name, maps] : cfg.param_universe) {
    (void)name;
    maps = {only};
  }
  Lts lts = build_lts(registry_process(chain), cfg);
  CHECK(check_dependency_ordering(lts, chain).pass());
}
