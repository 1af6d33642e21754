#include "protocheck/typecheck.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <regex>
#include <sstream>

namespace protocheck {

namespace {

constexpr double kEps = 1e-9;

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c));
}

struct RawToken {
  std::string text;
  std::size_t begin = 0;  // character offset
  std::size_t end = 0;
};

std::vector<RawToken> raw_tokens(const std::string& s) {
  std::vector<RawToken> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_word_char(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && is_word_char(s[j])) ++j;
    out.push_back(RawToken{s.substr(i, j - i), i, j});
    i = j;
  }
  return out;
}

}  // namespace

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& t : raw_tokens(s)) {
    std::string w = t.text;
    std::transform(w.begin(), w.end(), w.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    out.push_back(std::move(w));
  }
  return out;
}

namespace {

struct ExampleRegion {
  std::size_t begin = 0;  // just past "e.g."
  std::size_t end = 0;    // at the closing parenthesis (or text end)
  int items = 0;
};

std::vector<ExampleRegion> example_regions(const std::string& s) {
  std::vector<ExampleRegion> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t at = s.find("(e.g.", pos);
    if (at == std::string::npos) break;
    ExampleRegion r;
    r.begin = at + 5;
    std::size_t close = s.find(')', r.begin);
    r.end = close == std::string::npos ? s.size() : close;
    std::string inner = s.substr(r.begin, r.end - r.begin);
    if (!inner.empty() && inner.front() == ',') inner.erase(inner.begin());
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      bool blank = std::all_of(item.begin(), item.end(), [](unsigned char c) {
        return std::isspace(c);
      });
      if (!blank) ++r.items;
    }
    out.push_back(r);
    pos = r.end;
  }
  return out;
}

bool all_caps(const std::string& w) {
  if (w.size() < 2 || w.size() > 5) return false;
  return std::all_of(w.begin(), w.end(), [](unsigned char c) {
    return std::isupper(c);
  });
}

}  // namespace

int entities(const std::string& s) {
  auto regions = example_regions(s);
  auto toks = raw_tokens(s);
  int count = 0;
  for (const auto& r : regions) count += r.items;

  auto inside_region = [&](const RawToken& t) {
    for (const auto& r : regions) {
      if (t.begin >= r.begin && t.end <= r.end) return true;
    }
    return false;
  };
  for (std::size_t i = 0; i < toks.size(); ++i) {
    // A leading acronym names the field's domain; it is not counted as an
    // added example or constraint.
    if (i == 0) continue;
    if (all_caps(toks[i].text) && !inside_region(toks[i])) ++count;
  }

  static const std::regex constraint_re(R"([<>]=?\s*[0-9]+)");
  auto begin = std::sregex_iterator(s.begin(), s.end(), constraint_re);
  count += static_cast<int>(std::distance(begin, std::sregex_iterator()));

  // Double-quoted mentions (enum literals cited in prose).
  std::size_t pos = 0;
  while (true) {
    std::size_t open = s.find('"', pos);
    if (open == std::string::npos) break;
    std::size_t close = s.find('"', open + 1);
    if (close == std::string::npos) break;
    if (close > open + 1) ++count;
    pos = close + 1;
  }
  return count;
}

double semantic_density(const std::string& s) {
  std::size_t n = tokens(s).size();
  if (n == 0) return 0.0;
  return static_cast<double>(entities(s)) / static_cast<double>(n);
}

Json RuleVerdict::to_json() const {
  Json j = Json::object();
  j["pass"] = pass;
  for (auto it = details.begin(); it != details.end(); ++it)
    j[it.key()] = it.value();
  if (!pass && !necessity.empty()) j["necessity"] = necessity;
  return j;
}

namespace {

double rounded(double v) { return std::round(v * 1e6) / 1e6; }

const char* kNecessityP1 =
    "slot semantics cannot be reconstructed from bare type signatures";
const char* kNecessityP2 = "transactionality is unrecoverable from the schema";
const char* kNecessityP3 =
    "error-recovery behavior cannot be reconstructed; equivalence fails on "
    "error paths";
const char* kNecessityP4 =
    "round-trip equivalence is maintained, but discovery cost scales with "
    "full descriptions";
const char* kNecessityP5 =
    "tool-sequencing constraints are lost; ordering becomes implicit";

}  // namespace

RuleVerdict check_p1(const ToolT& tool, const TypecheckConfig& cfg) {
  RuleVerdict v;
  v.principle = "P1";
  v.necessity = kNecessityP1;
  Json failing = Json::object();
  double d = semantic_density(tool.description);
  Json densities = Json::object();
  densities["description"] = rounded(d);
  if (d < cfg.tau - kEps) failing["description"] = rounded(d);
  for (const auto& [name, p] : tool.schema.properties) {
    double pd = semantic_density(p.description);
    densities["properties." + name] = rounded(pd);
    if (pd < cfg.tau - kEps) failing["properties." + name] = rounded(pd);
  }
  v.pass = failing.empty();
  v.details["densities"] = densities;
  v.details["threshold"] = cfg.tau;
  if (!v.pass) v.details["failing"] = failing;
  return v;
}

RuleVerdict check_p2(const ToolT& tool) {
  RuleVerdict v;
  v.principle = "P2";
  v.necessity = kNecessityP2;
  if (!tool.metadata) {
    v.details["reason"] = "not an extended tool: metadata absent";
    return v;
  }
  const ToolMetadata& m = *tool.metadata;
  if (!m.side_effects) {
    v.details["reason"] = "side_effects not declared";
    return v;
  }
  bool mutating = *m.side_effects == SideEffects::Write ||
                  *m.side_effects == SideEffects::Delete;
  bool approved = m.requires_approval.value_or(false);
  v.details["side_effects"] = side_effects_name(*m.side_effects);
  v.details["requires_approval"] = approved;
  if (mutating && !approved) {
    v.details["reason"] = "write-capable tool does not require approval";
    return v;
  }
  v.pass = true;
  return v;
}

RuleVerdict check_p3(const ToolT& tool, const McpRegistry& reg) {
  RuleVerdict v;
  v.principle = "P3";
  v.necessity = kNecessityP3;
  if (!tool.metadata || !tool.metadata->failure_modes) {
    v.details["reason"] = "failure_modes not declared";
    return v;
  }
  const auto& fs = *tool.metadata->failure_modes;
  if (fs.empty()) {
    v.details["reason"] = "failure_modes is empty";
    return v;
  }
  std::set<std::string> types;
  for (const auto& f : fs) {
    if (!types.insert(f.error_type).second) {
      v.details["reason"] = "duplicate error type: " + f.error_type;
      return v;
    }
    if (f.recovery.kind == RecoveryStrategy::Kind::Fallback &&
        !reg.find_tool(f.recovery.target)) {
      v.details["reason"] =
          "fallback target not in registry: " + f.recovery.target;
      return v;
    }
  }
  v.details["count"] = fs.size();
  v.pass = true;
  return v;
}

RuleVerdict check_p4(const ToolT& tool, const TypecheckConfig& cfg) {
  RuleVerdict v;
  v.principle = "P4";
  v.necessity = kNecessityP4;
  if (!tool.metadata || !tool.metadata->summary) {
    v.details["reason"] = "summary not declared";
    return v;
  }
  std::size_t summary_len = tokens(*tool.metadata->summary).size();
  std::size_t desc_len = tokens(tool.description).size();
  double bound = cfg.summary_ratio * static_cast<double>(desc_len);
  v.details["summary_tokens"] = summary_len;
  v.details["description_tokens"] = desc_len;
  v.details["bound"] = rounded(bound);
  if (summary_len == 0) {
    v.details["reason"] = "summary is empty";
    return v;
  }
  if (!(static_cast<double>(summary_len) < bound - kEps)) {
    v.details["reason"] = std::to_string(summary_len) + " tokens is not under " +
                          std::to_string(rounded(bound));
    return v;
  }
  v.pass = true;
  return v;
}

RuleVerdict check_p5(const McpRegistry& reg) {
  RuleVerdict v;
  v.principle = "P5";
  v.necessity = kNecessityP5;

  std::map<std::string, const ToolMetadata*> meta;
  for (const auto& t : reg.tools) {
    const auto* tool = as<ToolT>(t);
    if (!tool) continue;
    if (!tool->metadata || !tool->metadata->dependencies) {
      v.details["reason"] =
          "tool " + tool->name + " declares no dependency list";
      return v;
    }
    meta.emplace(tool->name, &*tool->metadata);
  }

  std::map<std::string, std::vector<std::string>> requires_edges;
  std::set<std::pair<std::string, std::string>> exclusive;
  for (const auto& [name, m] : meta) {
    for (const auto& d : *m->dependencies) {
      if (!meta.count(d.tool_name)) {
        v.details["reason"] = "tool " + name +
                              " depends on unknown tool: " + d.tool_name;
        return v;
      }
      if (d.relation == DepRelation::Requires)
        requires_edges[name].push_back(d.tool_name);
      if (d.relation == DepRelation::ExclusiveWith)
        exclusive.insert({name, d.tool_name});
    }
  }

  for (const auto& [a, b] : exclusive) {
    auto conflicts = [&](const std::string& x, const std::string& y) {
      auto it = requires_edges.find(x);
      return it != requires_edges.end() &&
             std::find(it->second.begin(), it->second.end(), y) !=
                 it->second.end();
    };
    if (conflicts(a, b) || conflicts(b, a)) {
      v.details["reason"] = "tools both required and mutually exclusive";
      v.details["pair"] = Json::array({a, b});
      return v;
    }
  }

  // Cycle detection on the requires-graph.
  std::map<std::string, int> state;  // 0 unvisited, 1 on stack, 2 done
  std::vector<std::string> stack;
  std::vector<std::string> cycle;
  std::function<bool(const std::string&)> visit =
      [&](const std::string& n) -> bool {
    state[n] = 1;
    stack.push_back(n);
    auto it = requires_edges.find(n);
    if (it != requires_edges.end()) {
      for (const auto& m : it->second) {
        if (state[m] == 1) {
          auto pos = std::find(stack.begin(), stack.end(), m);
          cycle.assign(pos, stack.end());
          cycle.push_back(m);
          return false;
        }
        if (state[m] == 0 && !visit(m)) return false;
      }
    }
    stack.pop_back();
    state[n] = 2;
    return true;
  };
  for (const auto& [name, m] : meta) {
    (void)m;
    if (state[name] == 0 && !visit(name)) {
      v.details["reason"] = "requires-graph has a cycle";
      v.details["cycle"] = cycle;
      return v;
    }
  }

  v.pass = true;
  return v;
}

Json TokenReport::to_json() const {
  Json j = Json::object();
  j["baseline"] = baseline;
  j["progressive"] = progressive;
  j["ratio"] = rounded(ratio);
  j["flag"] = flag;
  if (degenerate) j["degenerate"] = true;
  return j;
}

TokenReport token_report(const McpRegistry& reg, const TypecheckConfig& cfg) {
  TokenReport r;
  std::vector<std::size_t> desc_lens;
  for (const auto& t : reg.tools) {
    const auto* tool = as<ToolT>(t);
    if (!tool) continue;
    if (!tool->metadata || !tool->metadata->summary)
      throw MissingSummary(tool->name);
    desc_lens.push_back(tokens(tool->description).size());
    r.progressive += tokens(*tool->metadata->summary).size();
  }
  for (auto n : desc_lens) r.baseline += n;

  // Worst case: the invoked fraction hits the largest descriptions. The
  // ceiling is epsilon-tolerant so k*N at an integer stays that integer.
  std::size_t n = desc_lens.size();
  std::size_t full = static_cast<std::size_t>(
      std::ceil(cfg.invoked_fraction * static_cast<double>(n) - kEps));
  full = std::min(full, n);
  std::sort(desc_lens.rbegin(), desc_lens.rend());
  for (std::size_t i = 0; i < full; ++i) r.progressive += desc_lens[i];

  if (r.baseline == 0) {
    r.degenerate = true;
    r.ratio = 0.0;
  } else {
    r.ratio = static_cast<double>(r.progressive) /
              static_cast<double>(r.baseline);
  }
  r.flag = r.ratio < 0.2;
  return r;
}

TypecheckReport typecheck_registry(const McpRegistry& reg,
                                   const TypecheckConfig& cfg) {
  TypecheckReport report;
  report.pass = true;
  for (const auto& t : reg.tools) {
    const auto* tool = as<ToolT>(t);
    if (!tool) continue;
    ToolReport tr;
    tr.name = tool->name;
    tr.verdicts.push_back(check_p1(*tool, cfg));
    tr.verdicts.push_back(check_p2(*tool));
    tr.verdicts.push_back(check_p3(*tool, reg));
    tr.verdicts.push_back(check_p4(*tool, cfg));
    tr.pass = std::all_of(tr.verdicts.begin(), tr.verdicts.end(),
                          [](const RuleVerdict& v) { return v.pass; });
    report.pass = report.pass && tr.pass;
    report.tools.push_back(std::move(tr));
  }
  report.p5 = check_p5(reg);
  report.pass = report.pass && report.p5.pass;
  try {
    report.token_budget = token_report(reg, cfg);
  } catch (const MissingSummary& e) {
    report.missing_summaries.push_back(e.tool);
  }
  return report;
}

Json TypecheckReport::to_json() const {
  Json j = Json::object();
  j["pass"] = pass;
  Json tools_j = Json::array();
  for (const auto& t : tools) {
    Json tj = Json::object();
    tj["name"] = t.name;
    tj["pass"] = t.pass;
    for (const auto& v : t.verdicts) {
      std::string key = v.principle;
      std::transform(key.begin(), key.end(), key.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      tj[key] = v.to_json();
    }
    tools_j.push_back(tj);
  }
  j["tools"] = tools_j;
  j["p5"] = p5.to_json();
  if (token_budget) j["token_report"] = token_budget->to_json();
  if (!missing_summaries.empty()) {
    j["token_report"] = Json{{"missing_summary", missing_summaries}};
  }
  return j;
}

std::string TypecheckReport::to_text() const {
  std::ostringstream os;
  for (const auto& t : tools) {
    os << t.name << ": ";
    for (std::size_t i = 0; i < t.verdicts.size(); ++i) {
      const auto& v = t.verdicts[i];
      if (i) os << " ";
      os << v.principle << "=" << (v.pass ? "pass" : "FAIL");
    }
    os << "\n";
    for (const auto& v : t.verdicts) {
      if (!v.pass) {
        os << "  " << v.principle << ": "
           << v.details.value("reason", std::string("see details")) << "\n";
        os << "  " << v.principle << " necessity: " << v.necessity << "\n";
      }
    }
  }
  os << "P5=" << (p5.pass ? "pass" : "FAIL");
  if (!p5.pass)
    os << " (" << p5.details.value("reason", std::string{}) << ")";
  os << "\n";
  if (token_budget) {
    os << "token budget: baseline=" << token_budget->baseline
       << " progressive=" << token_budget->progressive << " ratio=";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", token_budget->ratio);
    os << buf << (token_budget->flag ? " (under 0.2)" : " (not under 0.2)")
       << "\n";
  }
  os << (pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace protocheck
