#include "protocheck/generate.hpp"

#include <algorithm>
#include <random>

namespace protocheck {
namespace gen {

namespace {

const char* kTypes[] = {"string", "integer", "number", "boolean", "date"};
const char* kErrorTypes[] = {"ValidationError", "AuthError", "ServiceDown",
                             "NotFound", "Timeout"};

std::vector<std::string> maybe_enum(std::mt19937_64& rng) {
  if (rng() % 3 != 0) return {};
  std::vector<std::string> vals;
  std::size_t n = 2 + rng() % 3;
  for (std::size_t i = 0; i < n; ++i)
    vals.push_back("v" + std::to_string(rng() % 90 + 10));
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  return vals;
}

SlotDef random_slot(std::mt19937_64& rng, const std::string& name) {
  SlotDef s;
  s.name = name;
  s.type_name = kTypes[rng() % 5];
  s.description = "Field " + name + " of the request";
  auto vals = maybe_enum(rng);
  // Enum constraints only make sense for text-valued slots here.
  if (!vals.empty()) {
    s.type_name = "string";
    s.possible_values = std::move(vals);
  }
  return s;
}

std::vector<FailureMode> random_failures(std::mt19937_64& rng) {
  std::vector<FailureMode> out;
  std::size_t n = 1 + rng() % 3;
  std::vector<int> picks{0, 1, 2, 3, 4};
  std::shuffle(picks.begin(), picks.end(), rng);
  for (std::size_t i = 0; i < n; ++i) {
    FailureMode f;
    f.error_type = kErrorTypes[picks[i]];
    switch (rng() % 4) {
      case 0:
        f.recovery = RecoveryStrategy::retry(1 + rng() % 4);
        break;
      case 1:
        f.recovery = RecoveryStrategy::fallback("tool_" + std::to_string(rng() % 8));
        break;
      case 2:
        f.recovery = RecoveryStrategy::user_prompt("Please retry the step.");
        break;
      default:
        f.recovery = RecoveryStrategy::abort();
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<Dependency> random_deps(std::mt19937_64& rng) {
  std::vector<Dependency> out;
  std::size_t n = rng() % 3;
  for (std::size_t i = 0; i < n; ++i) {
    Dependency d;
    d.tool_name = "tool_" + std::to_string(rng() % 8);
    switch (rng() % 3) {
      case 0:
        d.relation = DepRelation::Requires;
        break;
      case 1:
        d.relation = DepRelation::ProducesInputFor;
        break;
      default:
        d.relation = DepRelation::ExclusiveWith;
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

std::vector<TermPtr> random_intents(std::size_t n, std::uint64_t seed,
                                    IntentOptions opts) {
  std::mt19937_64 rng(seed);
  std::vector<TermPtr> out;
  for (std::size_t i = 0; i < n; ++i) {
    IntentT intent;
    intent.name = "intent_" + std::to_string(i);
    intent.description = "Performs task " + std::to_string(i) +
                         " of the service. Accepts structured parameters.";
    std::size_t nr = rng() % (opts.max_required + 1);
    std::size_t no = rng() % (opts.max_optional + 1);
    for (std::size_t k = 0; k < nr; ++k)
      intent.required_slots.push_back(
          random_slot(rng, "req_" + std::string(1, char('a' + k))));
    for (std::size_t k = 0; k < no; ++k)
      intent.optional_slots.push_back(
          random_slot(rng, "opt_" + std::string(1, char('a' + k))));
    intent.transactional = (i % 2 == 0) ? TriBool::True : TriBool::False;
    if (opts.annotate) {
      intent.failure_modes = random_failures(rng);
      intent.dependencies = random_deps(rng);
    }
    out.push_back(mk_intent(std::move(intent)));
  }
  return out;
}

ExploreConfig matched_universe(const std::vector<TermPtr>& intents) {
  ExploreConfig cfg;
  for (const auto& t : intents) {
    const auto* intent = as<IntentT>(t);
    if (!intent) continue;
    Bindings ok;
    for (const auto& s : intent->required_slots) {
      if (!s.possible_values.empty()) {
        ok.emplace(s.name, Literal::text(s.possible_values.front()));
      } else if (s.type_name == "integer") {
        ok.emplace(s.name, Literal::integer(7));
      } else if (s.type_name == "number") {
        ok.emplace(s.name, Literal::decimal(2.5));
      } else if (s.type_name == "boolean") {
        ok.emplace(s.name, Literal::boolean(true));
      } else {
        ok.emplace(s.name, Literal::text("value"));
      }
    }
    std::vector<Bindings> maps{ok};
    if (!ok.empty()) {
      Bindings deficient = ok;
      deficient.erase(deficient.begin());
      maps.push_back(std::move(deficient));
    }
    cfg.param_universe[intent->name] = std::move(maps);
  }
  return cfg;
}

std::vector<TermPtr> random_extended_tools(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TermPtr> out;
  for (std::size_t i = 0; i < n; ++i) {
    ToolT tool;
    tool.name = "tool_" + std::to_string(i);
    std::string lead =
        "Handles operation " + std::to_string(i) + " for the service.";
    tool.description = lead + " Accepts structured parameters and returns a "
                              "confirmation payload.";
    std::size_t nr = 1 + rng() % 3;
    std::size_t no = rng() % 3;
    for (std::size_t k = 0; k < nr; ++k) {
      SlotDef s = random_slot(rng, "req_" + std::string(1, char('a' + k)));
      tool.schema.required.push_back(s.name);
      PropertySpec p{s.type_name, s.description, std::nullopt};
      if (!s.possible_values.empty()) p.enum_values = s.possible_values;
      tool.schema.properties.emplace(s.name, std::move(p));
    }
    for (std::size_t k = 0; k < no; ++k) {
      SlotDef s = random_slot(rng, "opt_" + std::string(1, char('a' + k)));
      PropertySpec p{s.type_name, s.description, std::nullopt};
      if (!s.possible_values.empty()) p.enum_values = s.possible_values;
      tool.schema.properties.emplace(s.name, std::move(p));
    }
    bool tx = rng() % 2 == 0;
    ToolMetadata m;
    m.side_effects = tx ? SideEffects::Write : SideEffects::Read;
    m.requires_approval = tx;
    m.failure_modes = random_failures(rng);
    m.summary = lead;  // the description's first sentence
    m.dependencies = random_deps(rng);
    tool.metadata = std::move(m);
    out.push_back(mk_tool(std::move(tool)));
  }
  return out;
}

}  // namespace gen
}  // namespace protocheck
