#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace protocheck {

using Json = nlohmann::json;

/// Values that may appear in slot bindings, call parameters and
/// result payloads: text, integers, decimals, booleans, dates-as-text,
/// plus two artifact extensions. Channel references (@name) are what the
/// confinement check tracks; slot variables (?name) are the targets of
/// collect-slot substitution.
class Literal {
 public:
  enum class Kind { Text, Int, Dec, Bool, Chan, Var };

  Literal() = default;

  static Literal text(std::string s);
  static Literal integer(std::int64_t v);
  static Literal decimal(double v);
  static Literal boolean(bool v);
  static Literal chan(std::string name);
  static Literal var(std::string name);

  Kind kind() const { return kind_; }
  const std::string& str() const { return s_; }  // Text payload or name
  std::int64_t int_value() const { return i_; }
  double dec_value() const { return d_; }
  bool bool_value() const { return b_; }

  bool is_chan() const { return kind_ == Kind::Chan; }
  bool is_var() const { return kind_ == Kind::Var; }

  friend bool operator==(const Literal&, const Literal&) = default;
  bool operator<(const Literal& other) const;

  Json to_json() const;
  static Literal from_json(const Json& j);

  /// Term-syntax rendering ("text", 3, 3.5, true, @chan, ?var).
  std::string print() const;

 private:
  Kind kind_ = Kind::Text;
  std::string s_;
  std::int64_t i_ = 0;
  double d_ = 0.0;
  bool b_ = false;
};

using Bindings = std::map<std::string, Literal>;

Json bindings_to_json(const Bindings& b);
Bindings bindings_from_json(const Json& j);

/// Canonical JSON text of a binding map (sorted keys). decode(encode(b)) == b.
std::string encode_bindings(const Bindings& b);
Bindings decode_bindings(const std::string& text);

}  // namespace protocheck
