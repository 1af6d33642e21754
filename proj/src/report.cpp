#include "protocheck/report.hpp"

#include <cstdio>
#include <sstream>

namespace protocheck {

Json VerificationReport::to_json() const {
  Json j = Json::object();
  switch (status) {
    case Status::Pass:
      j["status"] = "pass";
      break;
    case Status::Fail:
      j["status"] = "fail";
      break;
    case Status::Inconclusive:
      j["status"] = "inconclusive";
      break;
  }
  j["property"] = property;
  if (!note.empty()) j["note"] = note;
  if (!details.empty()) j["details"] = details;
  return j;
}

std::string VerificationReport::to_text() const {
  std::ostringstream os;
  os << property << ": ";
  switch (status) {
    case Status::Pass:
      os << "pass";
      break;
    case Status::Fail:
      os << "FAIL";
      break;
    case Status::Inconclusive:
      os << "inconclusive";
      break;
  }
  os << "\n";
  if (!note.empty()) os << "  note: " << note << "\n";
  if (!details.empty()) os << "  " << details.dump() << "\n";
  return os.str();
}

std::string format_ratio(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace protocheck
