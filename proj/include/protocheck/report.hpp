#pragma once

#include <string>

#include "protocheck/literal.hpp"

namespace protocheck {

/// Outcome of a verification check: pass, fail with structured witness
/// details, or inconclusive when the input state space was truncated.
struct VerificationReport {
  enum class Status { Pass, Fail, Inconclusive };

  Status status = Status::Pass;
  std::string property;
  std::string note;  // scope caveats, stated up front
  Json details = Json::object();

  bool pass() const { return status == Status::Pass; }

  Json to_json() const;
  std::string to_text() const;
};

/// Fixed 6-decimal rendering for byte-stable text reports.
std::string format_ratio(double v);

}  // namespace protocheck
