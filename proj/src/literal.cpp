#include "protocheck/literal.hpp"

#include "protocheck/errors.hpp"

namespace protocheck {

Literal Literal::text(std::string s) {
  Literal l;
  l.kind_ = Kind::Text;
  l.s_ = std::move(s);
  return l;
}

Literal Literal::integer(std::int64_t v) {
  Literal l;
  l.kind_ = Kind::Int;
  l.i_ = v;
  return l;
}

Literal Literal::decimal(double v) {
  Literal l;
  l.kind_ = Kind::Dec;
  l.d_ = v;
  return l;
}

Literal Literal::boolean(bool v) {
  Literal l;
  l.kind_ = Kind::Bool;
  l.b_ = v;
  return l;
}

Literal Literal::chan(std::string name) {
  Literal l;
  l.kind_ = Kind::Chan;
  l.s_ = std::move(name);
  return l;
}

Literal Literal::var(std::string name) {
  Literal l;
  l.kind_ = Kind::Var;
  l.s_ = std::move(name);
  return l;
}

bool Literal::operator<(const Literal& other) const {
  if (kind_ != other.kind_) return kind_ < other.kind_;
  switch (kind_) {
    case Kind::Int:
      return i_ < other.i_;
    case Kind::Dec:
      return d_ < other.d_;
    case Kind::Bool:
      return b_ < other.b_;
    default:
      return s_ < other.s_;
  }
}

Json Literal::to_json() const {
  switch (kind_) {
    case Kind::Text:
      return s_;
    case Kind::Int:
      return i_;
    case Kind::Dec:
      return d_;
    case Kind::Bool:
      return b_;
    case Kind::Chan:
      return Json{{"$chan", s_}};
    case Kind::Var:
      return Json{{"$var", s_}};
  }
  return nullptr;
}

Literal Literal::from_json(const Json& j) {
  if (j.is_string()) return text(j.get<std::string>());
  if (j.is_boolean()) return boolean(j.get<bool>());
  if (j.is_number_integer()) return integer(j.get<std::int64_t>());
  if (j.is_number_float()) return decimal(j.get<double>());
  if (j.is_object()) {
    if (j.contains("$chan")) return chan(j.at("$chan").get<std::string>());
    if (j.contains("$var")) return var(j.at("$var").get<std::string>());
  }
  throw ToolkitError("not a literal: " + j.dump());
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  out += '"';
  return out;
}

}  // namespace

std::string Literal::print() const {
  switch (kind_) {
    case Kind::Text:
      return quote(s_);
    case Kind::Int:
      return std::to_string(i_);
    case Kind::Dec:
      return Json(d_).dump();  // shortest round-trip rendering
    case Kind::Bool:
      return b_ ? "true" : "false";
    case Kind::Chan:
      return "@" + s_;
    case Kind::Var:
      return "?" + s_;
  }
  return "";
}

Json bindings_to_json(const Bindings& b) {
  Json j = Json::object();
  for (const auto& [k, v] : b) j[k] = v.to_json();
  return j;
}

Bindings bindings_from_json(const Json& j) {
  if (!j.is_object()) throw ToolkitError("bindings must be a JSON object");
  Bindings b;
  for (auto it = j.begin(); it != j.end(); ++it) {
    b.emplace(it.key(), Literal::from_json(it.value()));
  }
  return b;
}

std::string encode_bindings(const Bindings& b) {
  return bindings_to_json(b).dump();
}

Bindings decode_bindings(const std::string& text) {
  return bindings_from_json(Json::parse(text));
}

}  // namespace protocheck
