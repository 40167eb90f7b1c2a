#ifndef HYREP_PARSE_HPP
#define HYREP_PARSE_HPP

#include <cctype>
#include <string>
#include <vector>

#include "hyrep/errors.hpp"
#include "hyrep/formula.hpp"

namespace hyrep {

// Recursive-descent parser for the formula surface syntax:
//
//   sentence := (('exists'|'forall') var '.')+ body
//   body     := iff,  with precedence  ! > X,F,G > U > & > | > -> > <->
//   primary  := 'true' | 'false' | prop '[' var ']' | '(' body ')'
//
// '#' starts a line comment. X, F, G and U are reserved words.
namespace detail {

struct Token {
  enum Kind {
    Ident, Exists, Forall, True, False,
    Not, And, Or, Implies, Iff, Next, Ev, Glob, Until,
    LParen, RParen, LBracket, RBracket, Dot, End,
  } kind;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : src_(text) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) {
      t.kind = Token::End;
      return t;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
              src_[pos_] == '\'')) {
        word += src_[pos_];
        advance();
      }
      t.text = word;
      if (word == "exists") t.kind = Token::Exists;
      else if (word == "forall") t.kind = Token::Forall;
      else if (word == "true") t.kind = Token::True;
      else if (word == "false") t.kind = Token::False;
      else if (word == "X") t.kind = Token::Next;
      else if (word == "F") t.kind = Token::Ev;
      else if (word == "G") t.kind = Token::Glob;
      else if (word == "U") t.kind = Token::Until;
      else t.kind = Token::Ident;
      return t;
    }
    switch (c) {
      case '!': advance(); t.kind = Token::Not; return t;
      case '&': advance(); t.kind = Token::And; return t;
      case '|': advance(); t.kind = Token::Or; return t;
      case '(': advance(); t.kind = Token::LParen; return t;
      case ')': advance(); t.kind = Token::RParen; return t;
      case '[': advance(); t.kind = Token::LBracket; return t;
      case ']': advance(); t.kind = Token::RBracket; return t;
      case '.': advance(); t.kind = Token::Dot; return t;
      case '-':
        advance();
        if (pos_ < src_.size() && src_[pos_] == '>') {
          advance();
          t.kind = Token::Implies;
          return t;
        }
        fail(t, "expected '>' after '-'");
      case '<':
        advance();
        if (pos_ + 1 < src_.size() && src_[pos_] == '-' && src_[pos_ + 1] == '>') {
          advance();
          advance();
          t.kind = Token::Iff;
          return t;
        }
        fail(t, "expected '->' after '<'");
      default:
        fail(t, std::string("unexpected character '") + c + "'");
    }
    return t;  // unreachable
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const Token& at, const std::string& msg) {
    throw Error(ErrorCode::SyntaxError,
                msg + " at " + std::to_string(at.line) + ":" + std::to_string(at.col));
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class FormulaParser {
 public:
  explicit FormulaParser(const std::string& text) : lex_(text) { shift(); }

  HyperFormula parse_sentence() {
    HyperFormula f;
    while (cur_.kind == Token::Exists || cur_.kind == Token::Forall) {
      Quantifier q = cur_.kind == Token::Exists ? Quantifier::Exists : Quantifier::Forall;
      shift();
      expect(Token::Ident, "trace variable name");
      std::string var = cur_.text;
      shift();
      expect(Token::Dot, "'.'");
      shift();
      f.prefix.emplace_back(q, std::move(var));
    }
    if (f.prefix.empty()) fail("expected 'exists' or 'forall'");
    f.body = parse_iff();
    expect(Token::End, "end of input");
    validate_formula(f);
    return f;
  }

  LtlBody parse_body_only() {
    LtlBody b = parse_iff();
    expect(Token::End, "end of input");
    return b;
  }

 private:
  LtlBody parse_iff() {
    LtlBody l = parse_implies();
    if (cur_.kind == Token::Iff) {
      shift();
      return mk_iff(std::move(l), parse_iff());
    }
    return l;
  }

  LtlBody parse_implies() {
    LtlBody l = parse_or();
    if (cur_.kind == Token::Implies) {
      shift();
      return mk_implies(std::move(l), parse_implies());
    }
    return l;
  }

  LtlBody parse_or() {
    LtlBody l = parse_and();
    if (cur_.kind == Token::Or) {
      shift();
      return mk_or(std::move(l), parse_or());
    }
    return l;
  }

  LtlBody parse_and() {
    LtlBody l = parse_until();
    if (cur_.kind == Token::And) {
      shift();
      return mk_and(std::move(l), parse_and());
    }
    return l;
  }

  LtlBody parse_until() {
    LtlBody l = parse_unary();
    if (cur_.kind == Token::Until) {
      shift();
      return mk_until(std::move(l), parse_until());  // right-associative
    }
    return l;
  }

  LtlBody parse_unary() {
    switch (cur_.kind) {
      case Token::Not: shift(); return mk_not(parse_unary());
      case Token::Next: shift(); return mk_next(parse_unary());
      case Token::Ev: shift(); return mk_eventually(parse_unary());
      case Token::Glob: shift(); return mk_globally(parse_unary());
      default: return parse_primary();
    }
  }

  LtlBody parse_primary() {
    switch (cur_.kind) {
      case Token::True:
        shift();
        return mk_true();
      case Token::False:
        shift();
        return mk_false();
      case Token::LParen: {
        shift();
        LtlBody b = parse_iff();
        expect(Token::RParen, "')'");
        shift();
        return b;
      }
      case Token::Ident: {
        std::string prop = cur_.text;
        shift();
        expect(Token::LBracket, "'[' after proposition name");
        shift();
        expect(Token::Ident, "trace variable inside '[ ]'");
        std::string var = cur_.text;
        shift();
        expect(Token::RBracket, "']'");
        shift();
        return mk_atom(std::move(prop), std::move(var));
      }
      default:
        fail("expected a formula");
    }
    return nullptr;  // unreachable
  }

  void shift() { cur_ = lex_.next(); }

  void expect(Token::Kind k, const std::string& what) {
    if (cur_.kind != k) fail("expected " + what);
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw Error(ErrorCode::SyntaxError,
                msg + " at " + std::to_string(cur_.line) + ":" + std::to_string(cur_.col));
  }

  Lexer lex_;
  Token cur_;
};

}  // namespace detail

inline HyperFormula parse_formula(const std::string& text) {
  detail::FormulaParser p(text);
  return p.parse_sentence();
}

inline LtlBody parse_body(const std::string& text) {
  detail::FormulaParser p(text);
  return p.parse_body_only();
}

}  // namespace hyrep

#endif
