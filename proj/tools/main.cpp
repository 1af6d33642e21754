// protocheck: process-calculus verification toolkit for agent tool protocols.
//
// Subcommands: parse, lts, map, bisim, traces, typecheck, tokens, verify,
// demo. Exit codes: 0 pass/success, 1 property failure (witness printed),
// 2 input/usage error, 3 inconclusive (truncated state space).

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "protocheck/equivalence.hpp"
#include "protocheck/fixtures.hpp"
#include "protocheck/generate.hpp"
#include "protocheck/mapping.hpp"
#include "protocheck/parse.hpp"
#include "protocheck/security.hpp"
#include "protocheck/typecheck.hpp"

using namespace protocheck;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInconclusive = 3;

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ToolkitError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ToolkitError("cannot open output file: " + path);
  out << text;
}

enum class InputKind { TermText, TermJson, Manifest, SgdSchema };

InputKind sniff(const std::string& text) {
  auto pos = text.find_first_not_of(" \t\r\n");
  if (pos == std::string::npos || text[pos] != '{') return InputKind::TermText;
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) return InputKind::TermText;
  if (j.contains("tools")) return InputKind::Manifest;
  if (j.contains("intents")) return InputKind::SgdSchema;
  if (j.contains("kind")) return InputKind::TermJson;
  throw ToolkitError("cannot tell what this JSON document is");
}

int status_to_exit(const VerificationReport& r) {
  switch (r.status) {
    case VerificationReport::Status::Pass:
      return kExitPass;
    case VerificationReport::Status::Fail:
      return kExitFail;
    case VerificationReport::Status::Inconclusive:
      return kExitInconclusive;
  }
  return kExitUsage;
}

struct GlobalOpts {
  std::string format = "text";
  std::uint64_t seed = 42;
  std::size_t max_states = 10000;
  int repl_bound = 2;
  std::string mode = "weak";
  bool unify_errors = false;
};

// ---------------------------------------------------------------------------
// demo: replay of the worked examples, one pass/fail row each
// ---------------------------------------------------------------------------

struct DemoRow {
  std::string name;
  bool ok = false;
  std::string note;
};

std::vector<DemoRow> run_demo(std::uint64_t seed) {
  namespace fx = fixtures;
  std::vector<DemoRow> rows;
  auto row = [&](const std::string& name, bool ok, std::string note = "") {
    rows.push_back(DemoRow{name, ok, std::move(note)});
  };

  // Dialogue side: invoke/execute/result behavior of the booking intent.
  {
    ExploreConfig cfg = fx::book_flight_config();
    auto succ = sgd_step(fx::book_flight_intent(), cfg);
    bool ok_step = false, err_step = false;
    for (const auto& [l, t] : succ) {
      if (l.kind == TransitionLabel::Kind::Invoke && is<ExecuteT>(t))
        ok_step = true;
      const auto* e = as<ErrorTermT>(t);
      if (e && e->error_type == "MissingSlots" && e->message == "date")
        err_step = true;
    }
    row("book-flight invoke with full parameters reaches execution", ok_step);
    row("book-flight invoke missing the date reports MissingSlots{date}",
        err_step);

    Lts lts = build_lts(fx::book_flight_intent(), cfg);
    auto ts = traces(lts, 4);
    bool found = false;
    for (const auto& seq : ts.sequences) {
      if (seq.size() == 3 && seq[0].kind == TransitionLabel::Kind::Invoke &&
          seq[1].kind == TransitionLabel::Kind::Execute &&
          seq[2].kind == TransitionLabel::Kind::Result)
        found = true;
    }
    row("book-flight trace includes invoke.execute.result", found);
  }

  // Tool side: call/validate/execute/result for the issue tool.
  {
    ExploreConfig cfg = fx::create_issue_config();
    Lts lts = build_lts(fx::create_issue_tool(), cfg);
    auto ts = traces(lts, 4);
    bool found = false, errfound = false;
    for (const auto& seq : ts.sequences) {
      if (seq.size() == 4 && seq[0].kind == TransitionLabel::Kind::Call &&
          seq[1].kind == TransitionLabel::Kind::Tau &&
          seq[2].kind == TransitionLabel::Kind::Execute &&
          seq[3].kind == TransitionLabel::Kind::Result)
        found = true;
      if (seq.size() == 3 && seq[1].kind == TransitionLabel::Kind::Tau &&
          seq[2].kind == TransitionLabel::Kind::Error &&
          seq[2].error_type == "ValidationError")
        errfound = true;
    }
    row("create-issue trace includes call.tau.execute.result", found);
    row("create-issue call missing title raises ValidationError", errfound);
  }

  // Resource read.
  {
    ExploreConfig cfg;
    auto succ = mcp_step(fx::log_resource(), cfg);
    row("resource read emits its content",
        succ.size() == 1 && succ[0].first.kind == TransitionLabel::Kind::Read);
  }

  // Forward mapping image.
  {
    TermPtr image = sgd_to_mcp(fx::enum_flight_intent());
    const auto* tool = as<ToolT>(image);
    bool ok =
        tool && tool->schema.required == std::vector<std::string>{"origin"};
    if (ok) {
      const auto& p = tool->schema.properties.at("origin");
      ok = p.enum_values && *p.enum_values == fx::airports();
    }
    row("forward image carries the origin enum", ok);
    row("forward image of the null process is the null process",
        is<NilT>(sgd_to_mcp(mk_nil())));
  }

  // Behavioral equivalence of an intent and its image.
  {
    ExploreConfig cfg = fx::book_flight_config();
    Lts a = build_lts(fx::book_flight_intent(), cfg);
    Lts b = build_lts(sgd_to_mcp(fx::book_flight_intent()), cfg);
    auto weak = bisimilar(a, b, BisimMode::Weak, /*unify_errors=*/true);
    auto strong = bisimilar(a, b, BisimMode::Strong, /*unify_errors=*/true);
    row("intent and image are weakly bisimilar", weak.equivalent);
    row("strong mode distinguishes them (validation is a silent step)",
        !strong.equivalent);
    auto tr = trace_equivalent(a, b, 6, true);
    row("intent and image are trace-equivalent", tr.equivalent);
  }

  // Reverse-mapping gaps.
  {
    MapOutcome o = mcp_to_sgd(fx::delete_user_tool(false, false));
    bool ok = o.mapped();
    if (ok) {
      const auto* intent = as<IntentT>(*o.term);
      ok = intent && intent->transactional == TriBool::Unknown &&
           !o.warnings.empty() &&
           o.warnings.front().field == LossField::Transactionality;
    }
    row("reverse-mapped tool has unknown transactionality plus a loss record",
        ok);

    MapOutcome r = mcp_to_sgd(fx::log_resource());
    row("resource has no dialogue equivalent",
        !r.mapped() && r.undefined == UndefinedReason::NoSgdEquivalentResource);

    MapOutcome n = mcp_to_sgd(fx::negotiation_term());
    row("capability negotiation has no dialogue equivalent",
        !n.mapped() &&
            n.undefined == UndefinedReason::NoSgdEquivalentInitialize);
  }

  // Lossy round trip and non-injectivity.
  {
    auto rep =
        round_trip_report(fx::create_order_intent(), RoundTripMode::Plain);
    bool ok = !rep.identity && rep.diff.size() == 1 &&
              rep.diff[0].field == "transactional";
    row("plain round trip loses exactly the transactionality flag", ok);

    auto [m1, m2] = fx::transfer_funds_pair();
    auto o1 = mcp_to_sgd(m1), o2 = mcp_to_sgd(m2);
    row("same-schema tools collapse to one structural image",
        o1.mapped() && o2.mapped() && !term_eq(m1, m2) &&
            structural_eq(*o1.term, *o2.term));
  }

  // Five-principle rules.
  {
    TypecheckConfig cfg;
    row("bare type-echo description has density 0",
        semantic_density("departure") == 0.0);
    row("worked example description has density 0.3 exactly",
        semantic_density(fx::iata_description()) == 0.3);

    TermPtr unapproved = fx::delete_user_tool(true, false);
    auto p2 = check_p2(*as<ToolT>(unapproved));
    row("delete-capable tool without approval fails the boundary rule",
        !p2.pass);

    McpRegistry reg;
    reg.tools.push_back(fx::fetch_user_data_tool());
    reg.tools.push_back(fx::use_cached_data_tool());
    auto p3 = check_p3(*as<ToolT>(reg.tools[0]), reg);
    row("documented failure modes pass the recovery rule", p3.pass);

    TermPtr search = fx::search_repositories_tool();
    auto p4 = check_p4(*as<ToolT>(search), cfg);
    row("published two-level example fails its own strict summary bound "
        "(arithmetic reported)",
        !p4.pass && p4.details.contains("summary_tokens"));

    auto p5 = check_p5(fx::payment_registry());
    row("payment chain dependency declarations pass", p5.pass);

    McpRegistry cyc = fx::dependent_pair_registry(true);
    {
      // Make the pair mutually required: a two-cycle.
      const auto* a = as<ToolT>(cyc.tools[0]);
      ToolT t = *a;
      t.metadata->dependencies =
          std::vector<Dependency>{{"process_payment", DepRelation::Requires}};
      cyc.tools[0] = mk_tool(std::move(t));
    }
    auto p5c = check_p5(cyc);
    row("mutually-required pair fails with a two-cycle witness",
        !p5c.pass && p5c.details.contains("cycle"));
  }

  // Extended mapping round trips and necessity.
  {
    TermPtr intent = fx::book_flight_intent();
    TermPtr image = sgd_to_mcp_plus(intent);
    row("extended round trip is the identity on the booking intent",
        term_eq(mcp_plus_to_sgd(image), intent));
    const auto* tool = as<ToolT>(image);
    ToolT stripped = *tool;
    stripped.metadata->side_effects.reset();
    bool threw = false;
    try {
      mcp_plus_to_sgd(mk_tool(std::move(stripped)));
    } catch (const MissingMetadata& e) {
      threw = e.field == "side_effects";
    }
    row("stripping side_effects makes inversion fail naming the field", threw);
  }

  // Security encodings.
  {
    McpRegistry reg = fx::delete_user_registry(true, true);
    ExploreConfig cfg = default_universe_for(reg);
    Lts lts = build_lts(registry_process(reg), cfg);
    auto approval = check_approval_ordering(lts, reg);
    row("write-approval encoding satisfies approval-before-execute",
        approval.pass());
    auto ts = traces(lts, 5);
    bool cancel = false;
    for (const auto& seq : ts.sequences) {
      if (seq.size() == 4 && seq[2].kind == TransitionLabel::Kind::Approval &&
          !seq[2].confirm && seq[3].kind == TransitionLabel::Kind::Result &&
          seq[3].output == Literal::text("cancelled"))
        cancel = true;
    }
    row("declined approval ends in a cancelled result, never execute", cancel);

    McpRegistry pair = fx::dependent_pair_registry(true);
    ExploreConfig pcfg = fx::dependent_pair_config(pair);
    Lts plts = build_lts(registry_process(pair), pcfg);
    row("dependency handshake satisfies required-before-dependent",
        check_dependency_ordering(plts, pair).pass());

    row("confined-credential pattern yields zero findings",
        check_confinement(fx::confined_tool_term()).empty());
    row("credential in a result payload yields one finding",
        check_confinement(fx::leaky_term()).size() == 1);

    auto inert = check_inert_descriptions(fx::innocent_search_registry());
    row("poisoned description passes the sort check with an advisory warning",
        inert.pass() && inert.details.contains("advisory_warnings"));
  }

  // Token budget.
  {
    McpRegistry reg;
    for (int i = 0; i < 50; ++i) {
      ToolT t;
      t.name = "tool_" + std::to_string(i);
      std::string desc;
      for (int w = 0; w < 100; ++w) desc += "w" + std::to_string(w) + " ";
      t.description = desc;
      ToolMetadata m;
      std::string summary;
      for (int w = 0; w < 9; ++w) summary += "s" + std::to_string(w) + " ";
      m.summary = summary;
      m.side_effects = SideEffects::Read;
      m.requires_approval = false;
      m.failure_modes =
          std::vector<FailureMode>{{"ServiceDown", RecoveryStrategy::retry(1)}};
      m.dependencies = std::vector<Dependency>{};
      t.metadata = std::move(m);
      reg.tools.push_back(mk_tool(std::move(t)));
    }
    TypecheckConfig cfg;
    auto report = token_report(reg, cfg);
    row("two-level disclosure prices the 50-tool corpus under one fifth",
        report.flag && report.ratio <= 0.20,
        "ratio=" + format_ratio(report.ratio));
  }

  // Seeded instance corpora.
  {
    auto intents = gen::random_intents(20, seed);
    ExploreConfig cfg = gen::matched_universe(intents);
    bool all = true;
    for (const auto& intent : intents) {
      Lts a = build_lts(intent, cfg);
      Lts b = build_lts(sgd_to_mcp(intent), cfg);
      all = all && bisimilar(a, b, BisimMode::Weak, true).equivalent;
    }
    row("20 seeded intents are weakly bisimilar to their images", all);

    gen::IntentOptions opts;
    opts.annotate = true;
    auto annotated = gen::random_intents(100, seed + 1, opts);
    bool id = true;
    for (const auto& intent : annotated)
      id = id && term_eq(mcp_plus_to_sgd(sgd_to_mcp_plus(intent)), intent);
    row("100 seeded annotated intents survive the extended round trip", id);
  }

  return rows;
}

// ---------------------------------------------------------------------------
// subcommand implementations
// ---------------------------------------------------------------------------

int cmd_parse(const std::string& input, const std::string& out_format,
              const std::string& out_path) {
  std::string text = read_file(input);
  InputKind kind = sniff(text);
  TermPtr term;
  if (kind == InputKind::TermJson) {
    term = term_from_json(Json::parse(text));
  } else if (kind == InputKind::TermText) {
    term = parse_term(text);
  } else {
    throw ToolkitError("input is a registry document, not a term");
  }
  if (out_format == "json") {
    write_output(out_path, term_to_json(term).dump(2) + "\n");
  } else {
    write_output(out_path, print_term(term) + "\n");
  }
  return kExitPass;
}

ExploreConfig config_for_input(const std::string& text, InputKind kind,
                               TermPtr& term, const GlobalOpts& g,
                               const std::string& params_path) {
  ExploreConfig cfg;
  switch (kind) {
    case InputKind::Manifest: {
      McpRegistry reg = parse_mcp_manifest(text);
      cfg = default_universe_for(reg);
      term = registry_process(reg);
      break;
    }
    case InputKind::SgdSchema: {
      SgdRegistry reg = parse_sgd_schema(text);
      cfg = default_universe_for(reg);
      term = registry_process(reg);
      break;
    }
    case InputKind::TermJson:
      term = term_from_json(Json::parse(text));
      cfg = default_universe_for_term(term);
      break;
    case InputKind::TermText:
      term = parse_term(text);
      cfg = default_universe_for_term(term);
      break;
  }
  if (!params_path.empty()) {
    Json j = Json::parse(read_file(params_path));
    for (auto it = j.begin(); it != j.end(); ++it) {
      std::vector<Bindings> maps;
      for (const auto& m : it.value()) maps.push_back(bindings_from_json(m));
      cfg.param_universe[it.key()] = std::move(maps);
    }
  }
  cfg.max_states = g.max_states;
  cfg.repl_unfold_bound = g.repl_bound;
  return cfg;
}

int cmd_lts(const std::string& input, const GlobalOpts& g,
            const std::string& params_path, const std::string& out_path,
            const std::string& dot_path) {
  std::string text = read_file(input);
  TermPtr term;
  ExploreConfig cfg = config_for_input(text, sniff(text), term, g, params_path);
  Lts lts = build_lts(term, cfg);
  if (!dot_path.empty()) write_output(dot_path, lts.to_dot());
  write_output(out_path, lts.to_json().dump(2) + "\n");
  return lts.truncated ? kExitInconclusive : kExitPass;
}

int cmd_traces(const std::string& input, std::size_t max_len,
               const GlobalOpts& g) {
  std::string text = read_file(input);
  Lts lts = Lts::from_json(Json::parse(text));
  auto ts = traces(lts, max_len);
  if (g.format == "json") {
    Json arr = Json::array();
    for (const auto& seq : ts.sequences) {
      Json s = Json::array();
      for (const auto& l : seq) s.push_back(l.to_json());
      arr.push_back(s);
    }
    Json out{{"partial", ts.partial}, {"traces", arr}};
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& seq : ts.sequences) {
      if (seq.empty()) {
        std::cout << "<empty>\n";
        continue;
      }
      for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i) std::cout << " . ";
        std::cout << seq[i].print();
      }
      std::cout << "\n";
    }
    if (ts.partial) std::cout << "(partial: state space was truncated)\n";
  }
  return ts.partial ? kExitInconclusive : kExitPass;
}

int cmd_map(const std::string& input, const std::string& dir, bool plus,
            const std::string& out_path, const GlobalOpts& g) {
  std::string text = read_file(input);
  if (dir == "sgd-to-mcp") {
    SgdRegistry reg = parse_sgd_schema(text);
    McpRegistry mapped = map_sgd_registry(reg, plus);
    write_output(out_path, emit_manifest(mapped));
    for (const auto& w : reg.warnings) std::cerr << "warning: " << w << "\n";
    return kExitPass;
  }
  McpRegistry reg = parse_mcp_manifest(text);
  SgdMapResult result = map_mcp_registry(reg, plus);
  if (!result.registry) {
    Json report{{"undefined", undefined_reason_name(*result.undefined)}};
    if (g.format == "json") {
      std::cout << report.dump(2) << "\n";
    } else {
      std::cout << "mapping undefined: "
                << undefined_reason_name(*result.undefined) << "\n";
    }
    return kExitFail;
  }
  write_output(out_path, emit_sgd_schema(*result.registry));
  for (const auto& w : result.warnings)
    std::cerr << "loss: " << loss_field_name(w.field) << ": " << w.detail
              << "\n";
  return kExitPass;
}

int cmd_bisim(const std::string& a_path, const std::string& b_path,
              const GlobalOpts& g) {
  Lts a = Lts::from_json(Json::parse(read_file(a_path)));
  Lts b = Lts::from_json(Json::parse(read_file(b_path)));
  BisimMode mode = g.mode == "strong" ? BisimMode::Strong : BisimMode::Weak;
  auto verdict = bisimilar(a, b, mode, g.unify_errors);
  if (g.format == "json") {
    std::cout << verdict.to_json().dump(2) << "\n";
  } else {
    std::cout << (verdict.equivalent ? "equivalent" : "not equivalent");
    if (verdict.inconclusive) std::cout << " (inconclusive: truncated input)";
    std::cout << "\n";
    if (verdict.pair_witness)
      std::cout << "witness: " << verdict.to_json()["pair_witness"].dump()
                << "\n";
  }
  if (verdict.inconclusive) return kExitInconclusive;
  return verdict.equivalent ? kExitPass : kExitFail;
}

int cmd_typecheck(const std::string& input, const TypecheckConfig& cfg,
                  const GlobalOpts& g) {
  McpRegistry reg = parse_mcp_manifest(read_file(input));
  auto report = typecheck_registry(reg, cfg);
  if (g.format == "json") {
    std::cout << report.to_json().dump(2) << "\n";
  } else {
    std::cout << report.to_text();
  }
  return report.pass ? kExitPass : kExitFail;
}

int cmd_tokens(const std::string& input, const TypecheckConfig& cfg,
               const GlobalOpts& g) {
  McpRegistry reg = parse_mcp_manifest(read_file(input));
  auto report = token_report(reg, cfg);
  if (g.format == "json") {
    std::cout << report.to_json().dump(2) << "\n";
  } else {
    std::cout << "baseline=" << report.baseline
              << " progressive=" << report.progressive
              << " ratio=" << format_ratio(report.ratio)
              << (report.flag ? " under-0.2" : " not-under-0.2") << "\n";
    if (report.degenerate)
      std::cout << "warning: degenerate input (empty descriptions)\n";
  }
  return kExitPass;
}

int cmd_verify(const std::string& input, const std::string& property,
               const GlobalOpts& g, const std::string& params_path) {
  std::string text = read_file(input);
  InputKind kind = sniff(text);

  McpRegistry reg;
  TermPtr term;
  if (kind == InputKind::Manifest) {
    reg = parse_mcp_manifest(text);
    term = registry_process(reg);
  } else if (kind == InputKind::TermJson) {
    term = term_from_json(Json::parse(text));
  } else if (kind == InputKind::TermText) {
    term = parse_term(text);
  } else {
    throw ToolkitError("verify expects a manifest or a term");
  }

  auto want = [&](const char* p) { return property == "all" || property == p; };

  std::vector<VerificationReport> reports;
  if (want("approval") || want("deps")) {
    TermPtr lts_term = term;
    ExploreConfig cfg = config_for_input(text, kind, lts_term, g, params_path);
    Lts lts = build_lts(lts_term, cfg);
    if (want("approval")) reports.push_back(check_approval_ordering(lts, reg));
    if (want("deps")) reports.push_back(check_dependency_ordering(lts, reg));
  }
  if (want("confine")) reports.push_back(confinement_report(term));
  if (want("inert")) reports.push_back(check_inert_descriptions(reg, term));

  if (g.format == "json") {
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(r.to_json());
    std::cout << arr.dump(2) << "\n";
  } else {
    for (const auto& r : reports) std::cout << r.to_text();
  }

  int exit = kExitPass;
  for (const auto& r : reports) {
    int e = status_to_exit(r);
    if (e == kExitFail) return kExitFail;
    if (e == kExitInconclusive) exit = kExitInconclusive;
  }
  return exit;
}

int cmd_demo(const GlobalOpts& g) {
  auto rows = run_demo(g.seed);
  bool all = true;
  if (g.format == "json") {
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json j{{"name", r.name}, {"pass", r.ok}};
      if (!r.note.empty()) j["note"] = r.note;
      arr.push_back(j);
      all = all && r.ok;
    }
    std::cout << Json{{"rows", arr}, {"pass", all}}.dump(2) << "\n";
  } else {
    for (const auto& r : rows) {
      std::cout << (r.ok ? "PASS" : "FAIL") << "  " << r.name;
      if (!r.note.empty()) std::cout << "  [" << r.note << "]";
      std::cout << "\n";
      all = all && r.ok;
    }
    std::cout << (all ? "all rows pass" : "SOME ROWS FAILED") << "\n";
  }
  return all ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "process-calculus verification toolkit for agent tool protocols"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--format", g.format, "output format: text|json")
      ->envname("PROTOCHECK_FORMAT")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", g.seed, "seed for generated corpora")
      ->envname("PROTOCHECK_SEED");
  app.add_option("--max-states", g.max_states, "state budget for exploration")
      ->envname("PROTOCHECK_MAX_STATES");
  app.add_option("--repl-bound", g.repl_bound, "replication unfolding bound")
      ->envname("PROTOCHECK_REPL_BOUND");
  app.add_option("--mode", g.mode, "bisimulation mode: weak|strong")
      ->envname("PROTOCHECK_MODE")
      ->check(CLI::IsMember({"weak", "strong"}));
  app.add_flag("--unify-errors", g.unify_errors,
               "put the missing-slots and validation error types in one class")
      ->envname("PROTOCHECK_UNIFY_ERRORS");

  std::string input, out_path, dot_path, params_path;

  auto* parse_cmd = app.add_subcommand("parse", "parse a term and print it");
  std::string parse_out = "text";
  parse_cmd
      ->add_option("input", input, "term file (text or JSON), - for stdin")
      ->required();
  parse_cmd->add_option("--out", parse_out, "output form: text|json")
      ->check(CLI::IsMember({"text", "json"}));
  parse_cmd->add_option("-o,--output", out_path, "output file");

  auto* lts_cmd = app.add_subcommand(
      "lts", "build the transition system of a term, manifest or schema");
  lts_cmd->add_option("input", input, "input file")->required();
  lts_cmd->add_option("--params", params_path,
                      "JSON file: name -> list of parameter maps");
  lts_cmd->add_option("-o,--output", out_path, "output file (default stdout)");
  lts_cmd->add_option("--dot", dot_path, "also write a Graphviz rendering");

  auto* traces_cmd = app.add_subcommand("traces", "list label sequences");
  std::size_t max_len = 6;
  traces_cmd->add_option("input", input, "transition-system JSON file")
      ->required();
  traces_cmd->add_option("--max-len", max_len, "maximum trace length");

  auto* map_cmd = app.add_subcommand("map", "map a registry between calculi");
  std::string dir;
  bool plus = false;
  map_cmd->add_option("input", input, "registry file")->required();
  map_cmd->add_option("--dir", dir, "sgd-to-mcp | mcp-to-sgd")
      ->required()
      ->check(CLI::IsMember({"sgd-to-mcp", "mcp-to-sgd"}));
  map_cmd->add_flag("--plus", plus, "use the metadata-preserving mapping");
  map_cmd->add_option("-o,--output", out_path, "output file");

  auto* bisim_cmd = app.add_subcommand(
      "bisim", "check two transition systems for bisimilarity");
  std::string b_path;
  bisim_cmd->add_option("a", input, "first system (JSON)")->required();
  bisim_cmd->add_option("b", b_path, "second system (JSON)")->required();

  TypecheckConfig tc;
  auto* typecheck_cmd =
      app.add_subcommand("typecheck", "check the five principles");
  typecheck_cmd->add_option("input", input, "manifest file")->required();
  typecheck_cmd->add_option("--tau", tc.tau, "semantic-density threshold");
  typecheck_cmd->add_option("--summary-ratio", tc.summary_ratio,
                            "summary/description token ratio");
  typecheck_cmd->add_option("-k,--invoked-fraction", tc.invoked_fraction,
                            "fraction of tools priced at full detail");

  auto* tokens_cmd = app.add_subcommand("tokens", "two-level token budget");
  tokens_cmd->add_option("input", input, "manifest file")->required();
  tokens_cmd->add_option("-k,--invoked-fraction", tc.invoked_fraction,
                         "fraction of tools priced at full detail");

  auto* verify_cmd = app.add_subcommand("verify", "security trace checks");
  std::string property = "all";
  verify_cmd->add_option("input", input, "manifest or term file")->required();
  verify_cmd
      ->add_option("--property", property, "approval|deps|confine|inert|all")
      ->check(CLI::IsMember({"approval", "deps", "confine", "inert", "all"}));
  verify_cmd->add_option("--params", params_path,
                         "JSON file: name -> list of parameter maps");

  auto* demo_cmd = app.add_subcommand(
      "demo", "replay the worked examples and print a pass/fail matrix");

  // Global flags may follow the subcommand (bisim a b --mode strong).
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (parse_cmd->parsed()) return cmd_parse(input, parse_out, out_path);
    if (lts_cmd->parsed())
      return cmd_lts(input, g, params_path, out_path, dot_path);
    if (traces_cmd->parsed()) return cmd_traces(input, max_len, g);
    if (map_cmd->parsed()) return cmd_map(input, dir, plus, out_path, g);
    if (bisim_cmd->parsed()) return cmd_bisim(input, b_path, g);
    if (typecheck_cmd->parsed()) return cmd_typecheck(input, tc, g);
    if (tokens_cmd->parsed()) return cmd_tokens(input, tc, g);
    if (verify_cmd->parsed()) return cmd_verify(input, property, g, params_path);
    if (demo_cmd->parsed()) return cmd_demo(g);
  } catch (const ToolkitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
