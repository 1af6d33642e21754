#include "protocheck/parse.hpp"

#include <cctype>
#include <optional>
#include <vector>

namespace protocheck {

namespace {

enum class Tok {
  Ident,
  String,
  Int,
  Dec,
  Punct,  // one of ( ) { } [ ] | ! . , : = @ ?
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t int_value = 0;
  double dec_value = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }

  Token next() {
    Token t = current_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(current_.line, current_.col, msg);
  }

 private:
  void advance() {
    skip_ws();
    current_ = Token{};
    current_.line = line_;
    current_.col = col_;
    if (pos_ >= src_.size()) {
      current_.kind = Tok::End;
      return;
    }
    char c = src_[pos_];
    if (c == '"') {
      lex_string();
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '#') {
      // '#' identifiers are the canonical restriction binder names.
      std::string id;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_' || src_[pos_] == '#' || src_[pos_] == '\'')) {
        id += take();
      }
      current_.kind = Tok::Ident;
      current_.text = std::move(id);
      return;
    }
    static const std::string puncts = "(){}[]|!.,:=@?";
    if (puncts.find(c) != std::string::npos) {
      current_.kind = Tok::Punct;
      current_.text = std::string(1, take());
      return;
    }
    throw SyntaxError(line_, col_, std::string("unexpected character '") + c +
                                       "'");
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') take();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else {
        break;
      }
    }
  }

  void lex_string() {
    int l = line_, c0 = col_;
    take();  // opening quote
    std::string out;
    while (true) {
      if (pos_ >= src_.size()) throw SyntaxError(l, c0, "unterminated string");
      char c = take();
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= src_.size()) throw SyntaxError(l, c0, "unterminated string");
        char e = take();
        switch (e) {
          case 'n':
            out += '\n';
            break;
          case 't':
            out += '\t';
            break;
          case '"':
            out += '"';
            break;
          case '\\':
            out += '\\';
            break;
          default:
            throw SyntaxError(line_, col_, "unknown escape in string");
        }
      } else {
        out += c;
      }
    }
    current_.kind = Tok::String;
    current_.text = std::move(out);
  }

  void lex_number() {
    std::string num;
    if (src_[pos_] == '-') num += take();
    bool is_dec = false;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '.')) {
      if (src_[pos_] == '.') {
        if (pos_ + 1 >= src_.size() ||
            !std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))
          break;  // trailing '.' belongs to prefix syntax, not the number
        is_dec = true;
      }
      num += take();
    }
    if (is_dec) {
      current_.kind = Tok::Dec;
      current_.dec_value = std::stod(num);
    } else {
      current_.kind = Tok::Int;
      current_.int_value = std::stoll(num);
    }
    current_.text = std::move(num);
  }

  char take() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token current_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  TermPtr parse() {
    TermPtr t = parse_par();
    if (lex_.peek().kind != Tok::End)
      lex_.fail("trailing input after term");
    return t;
  }

 private:
  Lexer lex_;

  bool at_punct(const char* p) const {
    return lex_.peek().kind == Tok::Punct && lex_.peek().text == p;
  }

  bool at_ident(const char* kw) const {
    return lex_.peek().kind == Tok::Ident && lex_.peek().text == kw;
  }

  void expect_punct(const char* p) {
    if (!at_punct(p)) lex_.fail(std::string("expected '") + p + "'");
    lex_.next();
  }

  std::string expect_ident(const char* what) {
    if (lex_.peek().kind != Tok::Ident)
      lex_.fail(std::string("expected ") + what);
    return lex_.next().text;
  }

  std::string expect_string(const char* what) {
    if (lex_.peek().kind != Tok::String)
      lex_.fail(std::string("expected string (") + what + ")");
    return lex_.next().text;
  }

  std::int64_t expect_int(const char* what) {
    if (lex_.peek().kind != Tok::Int)
      lex_.fail(std::string("expected integer (") + what + ")");
    return lex_.next().int_value;
  }

  TermPtr parse_par() {
    TermPtr left = parse_prefix();
    if (at_punct("|")) {
      lex_.next();
      // Right-fold so a|b|c mirrors the canonical right-nested chain.
      return mk_par(std::move(left), parse_par());
    }
    return left;
  }

  TermPtr parse_prefix() {
    if (at_punct("(")) {
      lex_.next();
      if (at_ident("new")) {
        lex_.next();
        std::string chan = expect_ident("channel name");
        expect_punct(")");
        return mk_restrict(std::move(chan), parse_prefix());
      }
      TermPtr inner = parse_par();
      expect_punct(")");
      return inner;
    }
    if (at_punct("!") || at_ident("bang")) {
      lex_.next();
      int budget = -1;
      if (at_punct("[")) {  // explicit unfolding budget: ![2] P
        lex_.next();
        budget = static_cast<int>(expect_int("unfolding budget"));
        expect_punct("]");
      }
      return mk_repl(parse_prefix(), budget);
    }
    return parse_atom();
  }

  Literal parse_literal() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Tok::String:
        return Literal::text(lex_.next().text);
      case Tok::Int:
        return Literal::integer(lex_.next().int_value);
      case Tok::Dec:
        return Literal::decimal(lex_.next().dec_value);
      case Tok::Punct:
        if (t.text == "@") {
          lex_.next();
          return Literal::chan(expect_ident("channel name"));
        }
        if (t.text == "?") {
          lex_.next();
          return Literal::var(expect_ident("slot variable"));
        }
        break;
      case Tok::Ident:
        if (t.text == "true") {
          lex_.next();
          return Literal::boolean(true);
        }
        if (t.text == "false") {
          lex_.next();
          return Literal::boolean(false);
        }
        break;
      default:
        break;
    }
    lex_.fail("expected literal");
  }

  Bindings parse_bindings() {
    expect_punct("{");
    Bindings b;
    while (!at_punct("}")) {
      std::string key = expect_ident("binding name");
      expect_punct(":");
      Literal v = parse_literal();
      if (!b.emplace(std::move(key), std::move(v)).second)
        lex_.fail("duplicate binding key");
      if (at_punct(",")) lex_.next();
    }
    expect_punct("}");
    return b;
  }

  std::vector<std::string> parse_string_list() {
    expect_punct("[");
    std::vector<std::string> out;
    while (!at_punct("]")) {
      out.push_back(expect_string("list entry"));
      if (at_punct(",")) lex_.next();
    }
    expect_punct("]");
    return out;
  }

  // Slot declarations shared by intents, tools and validate schemas.
  void parse_slot_decls(std::vector<SlotDef>& required,
                        std::vector<SlotDef>& optional_slots) {
    std::set<std::string> seen;
    while (at_ident("required") || at_ident("optional")) {
      bool is_required = lex_.next().text == "required";
      const Token& name_tok = lex_.peek();
      SlotDef s;
      s.name = expect_ident("slot name");
      if (!seen.insert(s.name).second)
        throw DuplicateSlotError(name_tok.line, name_tok.col,
                                 "duplicate slot: " + s.name);
      expect_punct(":");
      s.type_name = expect_ident("slot type");
      if (lex_.peek().kind == Tok::String) s.description = lex_.next().text;
      if (at_ident("in")) {
        lex_.next();
        s.possible_values = parse_string_list();
        std::set<std::string> distinct(s.possible_values.begin(),
                                       s.possible_values.end());
        if (distinct.size() != s.possible_values.size())
          throw DuplicateSlotError(name_tok.line, name_tok.col,
                                   "repeated value for slot: " + s.name);
      }
      (is_required ? required : optional_slots).push_back(std::move(s));
    }
  }

  RecoveryStrategy parse_recovery() {
    std::string kw = expect_ident("recovery strategy");
    if (kw == "retry")
      return RecoveryStrategy::retry(static_cast<int>(expect_int("retries")));
    if (kw == "fallback")
      return RecoveryStrategy::fallback(expect_string("fallback tool"));
    if (kw == "user_prompt")
      return RecoveryStrategy::user_prompt(expect_string("prompt message"));
    if (kw == "abort") return RecoveryStrategy::abort();
    lex_.fail("unknown recovery strategy: " + kw);
  }

  std::vector<FailureMode> parse_failures() {
    expect_punct("[");
    std::vector<FailureMode> out;
    while (!at_punct("]")) {
      FailureMode f;
      f.error_type = expect_ident("error type");
      f.recovery = parse_recovery();
      out.push_back(std::move(f));
      if (at_punct(",")) lex_.next();
    }
    expect_punct("]");
    return out;
  }

  std::vector<Dependency> parse_deps() {
    expect_punct("[");
    std::vector<Dependency> out;
    while (!at_punct("]")) {
      Dependency d;
      d.relation = relation_from_name(expect_ident("dependency relation"));
      d.tool_name = expect_string("dependency target");
      out.push_back(std::move(d));
      if (at_punct(",")) lex_.next();
    }
    expect_punct("]");
    return out;
  }

  JsonSchema parse_schema_block() {
    expect_punct("{");
    std::vector<SlotDef> req, opt;
    parse_slot_decls(req, opt);
    expect_punct("}");
    JsonSchema s;
    for (const auto& slot : req) {
      s.required.push_back(slot.name);
      PropertySpec p{slot.type_name, slot.description, std::nullopt};
      if (!slot.possible_values.empty()) p.enum_values = slot.possible_values;
      s.properties.emplace(slot.name, std::move(p));
    }
    for (const auto& slot : opt) {
      PropertySpec p{slot.type_name, slot.description, std::nullopt};
      if (!slot.possible_values.empty()) p.enum_values = slot.possible_values;
      if (!s.properties.emplace(slot.name, std::move(p)).second)
        lex_.fail("duplicate property: " + slot.name);
    }
    return s;
  }

  ToolMetadata parse_meta_block() {
    expect_punct("{");
    ToolMetadata m;
    while (!at_punct("}")) {
      std::string kw = expect_ident("metadata field");
      if (kw == "side_effects") {
        m.side_effects = side_effects_from_name(expect_ident("side effect"));
      } else if (kw == "requires_approval") {
        std::string v = expect_ident("true or false");
        if (v != "true" && v != "false") lex_.fail("expected true or false");
        m.requires_approval = v == "true";
      } else if (kw == "summary") {
        m.summary = expect_string("summary");
      } else if (kw == "failure_modes") {
        m.failure_modes = parse_failures();
      } else if (kw == "dependencies") {
        m.dependencies = parse_deps();
      } else {
        lex_.fail("unknown metadata field: " + kw);
      }
    }
    expect_punct("}");
    return m;
  }

  void parse_gates(bool& gate_approval, std::vector<std::string>& gate_requires) {
    while (true) {
      if (at_ident("needs_approval")) {
        lex_.next();
        gate_approval = true;
      } else if (at_ident("after")) {
        lex_.next();
        gate_requires = parse_string_list();
      } else {
        break;
      }
    }
  }

  TermPtr parse_atom() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::Int && t.text == "0") {
      lex_.next();
      return mk_nil();
    }
    if (t.kind != Tok::Ident) lex_.fail("expected a process term");
    std::string kw = t.text;

    if (kw == "nil") {
      lex_.next();
      return mk_nil();
    }
    if (kw == "intent") {
      lex_.next();
      IntentT i;
      i.name = expect_string("intent name");
      i.description = expect_string("intent description");
      if (at_ident("transactional")) {
        lex_.next();
        i.transactional = TriBool::True;
      } else if (at_ident("non_transactional")) {
        lex_.next();
        i.transactional = TriBool::False;
      }
      expect_punct("{");
      parse_slot_decls(i.required_slots, i.optional_slots);
      if (at_ident("failures")) {
        lex_.next();
        i.failure_modes = parse_failures();
      }
      if (at_ident("deps")) {
        lex_.next();
        i.dependencies = parse_deps();
      }
      expect_punct("}");
      return mk_intent(std::move(i));
    }
    if (kw == "collect") {
      lex_.next();
      std::string slot = expect_ident("slot name");
      expect_punct("=");
      Literal v = parse_literal();
      expect_punct(".");
      return mk_collect(std::move(slot), std::move(v), parse_prefix());
    }
    if (kw == "exec") {
      lex_.next();
      std::string name = expect_string("intent name");
      return mk_execute(std::move(name), parse_bindings());
    }
    if (kw == "tool") {
      lex_.next();
      ToolT tool;
      tool.name = expect_string("tool name");
      tool.description = expect_string("tool description");
      tool.schema = parse_schema_block();
      if (at_ident("meta")) {
        lex_.next();
        tool.metadata = parse_meta_block();
      }
      return mk_tool(std::move(tool));
    }
    if (kw == "resource") {
      lex_.next();
      std::string uri = expect_string("resource uri");
      return mk_resource(std::move(uri), parse_literal());
    }
    if (kw == "prompt") {
      lex_.next();
      std::string tmpl = expect_string("prompt template");
      return mk_prompt(std::move(tmpl), parse_bindings());
    }
    if (kw == "init") {
      lex_.next();
      expect_punct("{");
      std::vector<std::string> caps;
      while (!at_punct("}")) {
        caps.push_back(expect_ident("capability"));
        if (at_punct(",")) lex_.next();
      }
      expect_punct("}");
      return mk_initialize(std::move(caps));
    }
    if (kw == "tools") {
      lex_.next();
      expect_punct("[");
      std::vector<TermPtr> list;
      while (!at_punct("]")) {
        list.push_back(parse_par());
        if (at_punct(",")) lex_.next();
      }
      expect_punct("]");
      std::vector<std::string> caps;
      if (at_ident("caps")) {
        lex_.next();
        expect_punct("{");
        while (!at_punct("}")) {
          caps.push_back(expect_ident("capability"));
          if (at_punct(",")) lex_.next();
        }
        expect_punct("}");
      }
      return mk_tools_list(std::move(list), std::move(caps));
    }
    if (kw == "call") {
      lex_.next();
      ToolCallT c;
      c.name = expect_string("tool name");
      c.params = parse_bindings();
      parse_gates(c.gate_approval, c.gate_requires);
      return mk_tool_call(std::move(c));
    }
    if (kw == "validate") {
      lex_.next();
      ValidateT v;
      v.pending_name = expect_string("pending tool name");
      v.params = parse_bindings();
      v.schema = parse_schema_block();
      parse_gates(v.gate_approval, v.gate_requires);
      return mk_validate(std::move(v));
    }
    if (kw == "result") {
      lex_.next();
      Literal out = parse_literal();
      std::string producer;
      if (at_ident("from")) {
        lex_.next();
        producer = expect_string("producer");
      }
      return mk_result(std::move(out), std::move(producer));
    }
    if (kw == "error") {
      lex_.next();
      std::string type = expect_ident("error type");
      return mk_error(std::move(type), expect_string("error message"));
    }
    throw UnknownVariantError(t.line, t.col, "unknown term keyword: " + kw);
  }
};

}  // namespace

TermPtr parse_term(const std::string& source) {
  Parser p(source);
  return p.parse();
}

}  // namespace protocheck
