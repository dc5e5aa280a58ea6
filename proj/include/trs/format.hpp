#pragma once

// Reader and printer for the parenthesised problem format:
//
//   (VAR x y)
//   (RULES
//     f(x,y) -> g(x)
//     alpha : and(x,T) -> x
//   )
//   (EQUATIONS
//     f(x,x) == x
//   )
//   (COMMENT free text)
//
// Identifiers are maximal runs of characters other than whitespace, `(`,
// `)` and `,`; the arrows `->` and `==` split identifier runs. An identifier
// is a variable exactly when it is declared in a VAR section.

#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "trs/error.hpp"
#include "trs/term.hpp"

namespace trs {

struct ProblemFile {
  std::vector<std::string> variables;
  std::vector<Rule> rules;
  std::vector<Equation> equations;
  std::vector<std::string> comments;

  /// Signature over rules and equations, in order of first occurrence.
  std::vector<Symbol> signature() const {
    std::vector<Symbol> sig;
    std::map<std::string, std::size_t> arity;
    for (const auto& r : rules) {
      detail::collect_symbols(r.lhs, sig, arity, "rules");
      detail::collect_symbols(r.rhs, sig, arity, "rules");
    }
    for (const auto& e : equations) {
      detail::collect_symbols(e.lhs, sig, arity, "equations");
      detail::collect_symbols(e.rhs, sig, arity, "equations");
    }
    return sig;
  }

  Trs trs() const { return Trs(rules, signature()); }

  friend bool operator==(const ProblemFile&, const ProblemFile&) = default;
};

namespace detail {

class Lexer {
 public:
  enum class Kind { LParen, RParen, Comma, Ident, End };
  struct Token {
    Kind kind;
    std::string text;
    int line;
    int column;
    std::size_t offset;
  };

  explicit Lexer(std::string_view src) : src_(src) {}

  Token peek(std::size_t k = 0) {
    while (buffer_.size() <= k) buffer_.push_back(scan());
    return buffer_[k];
  }
  Token next() {
    Token t = peek();
    buffer_.erase(buffer_.begin());
    return t;
  }

  [[noreturn]] void fail(const Token& at, const std::string& what) const {
    std::string where = "line " + std::to_string(at.line) + ", column " + std::to_string(at.column);
    throw Error("syntax-error", "syntax error at " + where + ": " + what, where);
  }

  /// Raw text from the current position up to (not including) the `)` that
  /// closes the currently open section. Consumes that `)`.
  std::string raw_until_close() {
    if (!buffer_.empty()) {
      pos_ = buffer_.front().offset;
      line_ = buffer_.front().line;
      col_ = buffer_.front().column;
      buffer_.clear();
    }
    std::size_t start = pos_;
    int depth = 0;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '(') ++depth;
      if (c == ')') {
        if (depth == 0) {
          std::string text(src_.substr(start, pos_ - start));
          advance();
          return text;
        }
        --depth;
      }
      advance();
    }
    fail(Token{Kind::End, "", line_, col_, pos_}, "unterminated section");
  }

 private:
  void advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
      ++col_;
    }
  }

  static bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
  static bool is_delim(char c) { return c == '(' || c == ')' || c == ',' || is_space(c); }
  bool arrow_at(std::size_t i) const {
    return i + 1 < src_.size() && ((src_[i] == '-' && src_[i + 1] == '>') || (src_[i] == '=' && src_[i + 1] == '='));
  }

  Token scan() {
    while (pos_ < src_.size() && is_space(src_[pos_])) advance();
    Token t{Kind::End, "", line_, col_, pos_};
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (c == '(' || c == ')' || c == ',') {
      t.kind = c == '(' ? Kind::LParen : c == ')' ? Kind::RParen : Kind::Comma;
      t.text = std::string(1, c);
      advance();
      return t;
    }
    t.kind = Kind::Ident;
    if (arrow_at(pos_)) {
      t.text = std::string(src_.substr(pos_, 2));
      advance();
      advance();
      return t;
    }
    std::size_t start = pos_;
    while (pos_ < src_.size() && !is_delim(src_[pos_]) && !arrow_at(pos_)) advance();
    t.text = std::string(src_.substr(start, pos_ - start));
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  std::vector<Token> buffer_;
};

class ProblemParser {
 public:
  using Kind = Lexer::Kind;

  ProblemParser(std::string_view text, std::set<std::string> vars) : lex_(text), vars_(std::move(vars)) {}

  Term term() {
    auto tok = lex_.next();
    if (tok.kind != Kind::Ident || tok.text == "->" || tok.text == "==")
      lex_.fail(tok, "expected a term, found '" + tok.text + "'");
    bool is_var = vars_.contains(tok.text);
    if (lex_.peek().kind != Kind::LParen) return is_var ? Term::var(tok.text) : Term::app(tok.text);
    if (is_var) lex_.fail(tok, "variable " + tok.text + " applied to arguments");
    lex_.next();
    std::vector<Term> args;
    if (lex_.peek().kind == Kind::RParen) {
      lex_.next();
      return Term::app(tok.text);
    }
    while (true) {
      args.push_back(term());
      auto sep = lex_.next();
      if (sep.kind == Kind::RParen) break;
      if (sep.kind != Kind::Comma) lex_.fail(sep, "expected ',' or ')' in arguments of " + tok.text);
    }
    return Term::app(tok.text, std::move(args));
  }

  Lexer::Token expect_end() {
    auto tok = lex_.peek();
    if (tok.kind != Kind::End) lex_.fail(tok, "unexpected trailing input '" + tok.text + "'");
    return tok;
  }

  ProblemFile problem() {
    ProblemFile out;
    std::set<std::string> declared;
    int sections = 0;
    while (lex_.peek().kind != Kind::End) {
      auto open = lex_.next();
      if (open.kind != Kind::LParen) lex_.fail(open, "expected '(' to open a section");
      auto kw = lex_.next();
      if (kw.kind != Kind::Ident) lex_.fail(kw, "expected a section keyword");
      ++sections;
      if (kw.text == "VAR") {
        while (lex_.peek().kind == Kind::Ident) {
          auto v = lex_.next();
          if (declared.insert(v.text).second) out.variables.push_back(v.text);
          vars_.insert(v.text);
        }
        close(kw.text);
      } else if (kw.text == "RULES") {
        while (lex_.peek().kind != Kind::RParen && lex_.peek().kind != Kind::End) {
          auto start = lex_.peek();
          std::string id = rule_id();
          Term l = term();
          arrow("->");
          Term r = term();
          Rule rule{l, r, id};
          std::string label = id.empty() ? "#" + std::to_string(out.rules.size() + 1) : id;
          try {
            validate_rule(rule, label);
          } catch (const Error& e) {
            throw Error(e.code(), e.what() + std::string(" at line ") + std::to_string(start.line),
                        "line " + std::to_string(start.line));
          }
          out.rules.push_back(std::move(rule));
        }
        close(kw.text);
      } else if (kw.text == "EQUATIONS") {
        while (lex_.peek().kind != Kind::RParen && lex_.peek().kind != Kind::End) {
          Term l = term();
          arrow("==");
          Term r = term();
          out.equations.push_back(Equation{l, r});
        }
        close(kw.text);
      } else if (kw.text == "COMMENT") {
        out.comments.push_back(lex_.raw_until_close());
      } else if (kw.text == "THEORY") {
        std::string body = lex_.raw_until_close();
        std::string theory;
        for (char c : body)
          if (std::isalpha(static_cast<unsigned char>(c))) {
            theory += c;
          } else if (!theory.empty()) {
            break;
          }
        if (theory.empty()) theory = "THEORY";
        throw Error("unsupported-theory",
                    "THEORY sections are not supported (found " + theory + "); rewriting modulo " + theory +
                        " is not implemented",
                    theory);
      } else {
        lex_.fail(kw, "unknown section '" + kw.text + "'");
      }
    }
    if (sections == 0) lex_.fail(lex_.peek(), "empty problem");
    // arities must agree across the whole file
    (void)out.signature();
    for (std::size_t i = 0; i < out.rules.size(); ++i)
      if (!out.rules[i].id.empty())
        for (std::size_t j = 0; j < i; ++j)
          if (out.rules[j].id == out.rules[i].id)
            throw Error("duplicate-rule-id", "rule id " + out.rules[i].id + " is used twice");
    return out;
  }

 private:
  std::string rule_id() {
    auto a = lex_.peek(0);
    auto b = lex_.peek(1);
    if (a.kind == Kind::Ident && b.kind == Kind::Ident && b.text == ":" && lex_.peek(2).kind != Kind::LParen &&
        a.text != "->" && !vars_.contains(a.text)) {
      lex_.next();
      lex_.next();
      return a.text;
    }
    return {};
  }
  void arrow(const std::string& which) {
    auto tok = lex_.next();
    if (tok.kind != Kind::Ident || tok.text != which) lex_.fail(tok, "expected '" + which + "', found '" + tok.text + "'");
  }
  void close(const std::string& section) {
    auto tok = lex_.next();
    if (tok.kind != Kind::RParen) lex_.fail(tok, "expected ')' to close " + section + ", found '" + tok.text + "'");
  }

  Lexer lex_;
  std::set<std::string> vars_;
};

}  // namespace detail

inline ProblemFile parse_problem(std::string_view text) { return detail::ProblemParser(text, {}).problem(); }

inline Term parse_term(std::string_view text, const std::set<std::string>& vars = {}) {
  detail::ProblemParser p(text, vars);
  Term t = p.term();
  p.expect_end();
  return t;
}

inline std::string print_term(const Term& t) { return to_string(t); }

inline std::string print_problem(const ProblemFile& p) {
  std::string out = "(VAR";
  for (const auto& v : p.variables) out += " " + v;
  out += ")\n(RULES\n";
  for (const auto& r : p.rules) {
    out += "  ";
    if (!r.id.empty()) out += r.id + " : ";
    out += to_string(r.lhs) + " -> " + to_string(r.rhs) + "\n";
  }
  out += ")\n";
  if (!p.equations.empty()) {
    out += "(EQUATIONS\n";
    for (const auto& e : p.equations) out += "  " + to_string(e.lhs) + " == " + to_string(e.rhs) + "\n";
    out += ")\n";
  }
  for (const auto& c : p.comments) out += "(COMMENT" + c + ")\n";
  return out;
}

/// Problem file for a rule list, declaring exactly the variables used.
inline ProblemFile make_problem(const std::vector<Rule>& rules, const std::vector<Equation>& equations = {}) {
  ProblemFile p;
  std::set<std::string> seen;
  auto add = [&](const Term& t) {
    for (const auto& x : variables(t))
      if (seen.insert(x).second) p.variables.push_back(x);
  };
  for (const auto& r : rules) {
    add(r.lhs);
    add(r.rhs);
  }
  for (const auto& e : equations) {
    add(e.lhs);
    add(e.rhs);
  }
  p.rules = rules;
  p.equations = equations;
  return p;
}

/// Reads a term whose variables are those of `problem`.
inline Term parse_term_for(std::string_view text, const ProblemFile& problem) {
  return parse_term(text, std::set<std::string>(problem.variables.begin(), problem.variables.end()));
}

}  // namespace trs
