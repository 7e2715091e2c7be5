#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "iakr/constraint.hpp"
#include "iakr/core.hpp"

namespace iakr {

// Constraint files:
//   file        := schema-decl stmt*
//   schema-decl := "schema" IDENT ":" IDENT+ ";"
//   stmt        := "key" "(" IDENT* ")" ";"
//                | "ind" "(" IDENT* ";" IDENT* ")" ";"
// Identifiers match [A-Za-z][A-Za-z0-9_]*, '#' starts a comment running to
// end of line, and whitespace is insignificant.

namespace detail {

struct Token {
  enum Kind { Ident, Colon, Semi, LParen, RParen, End } kind;
  std::string text;
  int line;
  int col;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_blank();
    int line = line_, col = col_;
    if (pos_ >= src_.size()) return {Token::End, "", line, col};
    char c = src_[pos_];
    if (c == ':') { bump(); return {Token::Colon, ":", line, col}; }
    if (c == ';') { bump(); return {Token::Semi, ";", line, col}; }
    if (c == '(') { bump(); return {Token::LParen, "(", line, col}; }
    if (c == ')') { bump(); return {Token::RParen, ")", line, col}; }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string text;
      while (pos_ < src_.size()) {
        char d = src_[pos_];
        if (!std::isalnum(static_cast<unsigned char>(d)) && d != '_') break;
        text += d;
        bump();
      }
      return {Token::Ident, std::move(text), line, col};
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }

private:
  void skip_blank() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }
  void bump() {
    if (src_[pos_] == '\n') { ++line_; col_ = 1; } else { ++col_; }
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
public:
  explicit Parser(std::string_view src) : lex_(src) { advance(); }

  ConstraintSet file() {
    Schema schema = schema_decl();
    ConstraintSet out(schema);
    while (cur_.kind != Token::End) out.insert(stmt(schema));
    return out;
  }

  Constraint query(const Schema& schema) {
    Constraint c = stmt_body(schema);
    if (cur_.kind == Token::Semi) advance();
    expect(Token::End, "end of query");
    return c;
  }

private:
  Schema schema_decl() {
    keyword("schema");
    std::string name = ident("schema name");
    expect(Token::Colon, "':'");
    std::vector<std::string> attrs;
    while (cur_.kind == Token::Ident) attrs.push_back(ident("attribute"));
    if (attrs.empty()) fail("expected at least one attribute");
    expect(Token::Semi, "';'");
    try {
      return Schema(std::move(name), std::move(attrs));
    } catch (const ValidationError& e) {
      fail(e.what());
    }
  }

  Constraint stmt(const Schema& schema) {
    Constraint c = stmt_body(schema);
    expect(Token::Semi, "';'");
    return c;
  }

  Constraint stmt_body(const Schema& schema) {
    if (cur_.kind != Token::Ident) fail("expected 'key' or 'ind'");
    if (cur_.text == "key") {
      advance();
      expect(Token::LParen, "'('");
      AttrSet x = attr_list(schema);
      expect(Token::RParen, "')'");
      return Constraint::key(x);
    }
    if (cur_.text == "ind") {
      advance();
      expect(Token::LParen, "'('");
      AttrSet x = attr_list(schema);
      expect(Token::Semi, "';'");
      AttrSet y = attr_list(schema);
      expect(Token::RParen, "')'");
      return Constraint::independence(x, y);
    }
    fail("expected 'key' or 'ind'");
  }

  AttrSet attr_list(const Schema& schema) {
    AttrSet s;
    while (cur_.kind == Token::Ident) {
      int i = schema.find(cur_.text);
      if (i < 0) fail("unknown attribute '" + cur_.text + "'");
      s |= AttrSet::single(i);
      advance();
    }
    return s;
  }

  void keyword(const std::string& word) {
    if (cur_.kind != Token::Ident || cur_.text != word) fail("expected '" + word + "'");
    advance();
  }
  std::string ident(const std::string& what) {
    if (cur_.kind != Token::Ident) fail("expected " + what);
    std::string t = cur_.text;
    advance();
    return t;
  }
  void expect(Token::Kind k, const std::string& what) {
    if (cur_.kind != k) fail("expected " + what);
    if (k != Token::End) advance();
  }
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, cur_.line, cur_.col); }
  void advance() { cur_ = lex_.next(); }

  Lexer lex_;
  Token cur_;
};

}  // namespace detail

/// Parses a constraint file into a schema-carrying constraint set.
inline ConstraintSet parse_constraints(std::string_view text) {
  return detail::Parser(text).file();
}

/// Parses one statement, e.g. "key(A B)" or "ind(A ; B)"; the trailing
/// semicolon is optional.
inline Constraint parse_query(std::string_view text, const Schema& schema) {
  return detail::Parser(text).query(schema);
}

/// Canonical text: schema line, then keys, then independence atoms, each in
/// stored order. parse(print(parse(x))) == parse(x).
inline std::string print_constraints(const ConstraintSet& cs) {
  const Schema& s = cs.schema();
  std::string out = "schema " + s.name() + ":";
  for (const auto& a : s.attrs()) out += " " + a;
  out += ";\n";
  for (const auto& c : cs) out += c.format(s) + ";\n";
  return out;
}

}  // namespace iakr
