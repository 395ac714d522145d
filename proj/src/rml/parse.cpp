#include <cctype>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lowr/rml/ast.hpp"

namespace lowr::rml {

namespace {

enum class Tok {
  Ident, NatNum, RealNum_, KwLet, KwRec, KwIn, KwIf, KwThen, KwElse, KwFun,
  KwTrue, KwFalse, LParen, RParen, Comma, Dot, Colon, Lt, Plus, Minus, Star,
  Slash, Eq, Arrow, End,
};

struct Token {
  Tok tok;
  Pos pos;
  std::string text;  // Ident
  unsigned long long nat = 0;
  Rat rat;
};

const std::set<std::string>& builtin_names() {
  static const std::set<std::string> s = {
      "exp", "log", "ln",  "sin",       "sqrt",      "succ",   "pred",
      "zero", "fst", "snd", "nat_to_real", "bernoulli", "uniform"};
  return s;
}

struct Lexer {
  const std::string& src;
  size_t i = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& s) : src(s) {}

  Pos here() const { return Pos{line, col}; }

  void advance() {
    if (i < src.size() && src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  }

  void skip_space() {
    for (;;) {
      while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i])))
        advance();
      if (i + 1 < src.size() && src[i] == '-' && src[i + 1] == '-') {
        while (i < src.size() && src[i] != '\n') advance();
        continue;
      }
      return;
    }
  }

  Token next() {
    skip_space();
    Pos p = here();
    if (i >= src.size()) return {Tok::End, p, "", 0, Rat(0)};
    char c = src[i];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string w;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) ||
              src[i] == '_')) {
        w += src[i];
        advance();
      }
      if (w == "let") return {Tok::KwLet, p, w, 0, Rat(0)};
      if (w == "rec") return {Tok::KwRec, p, w, 0, Rat(0)};
      if (w == "in") return {Tok::KwIn, p, w, 0, Rat(0)};
      if (w == "if") return {Tok::KwIf, p, w, 0, Rat(0)};
      if (w == "then") return {Tok::KwThen, p, w, 0, Rat(0)};
      if (w == "else") return {Tok::KwElse, p, w, 0, Rat(0)};
      if (w == "fun") return {Tok::KwFun, p, w, 0, Rat(0)};
      if (w == "true") return {Tok::KwTrue, p, w, 0, Rat(0)};
      if (w == "false") return {Tok::KwFalse, p, w, 0, Rat(0)};
      return {Tok::Ident, p, w, 0, Rat(0)};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (i < src.size() &&
             std::isdigit(static_cast<unsigned char>(src[i]))) {
        digits += src[i];
        advance();
      }
      // A dot only continues the number when a digit follows; "1." before an
      // identifier is the nat 1 and then a Dot token (rec binder syntax).
      if (i + 1 < src.size() && src[i] == '.' &&
          std::isdigit(static_cast<unsigned char>(src[i + 1]))) {
        advance();
        std::string frac;
        while (i < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[i]))) {
          frac += src[i];
          advance();
        }
        Token t{Tok::RealNum_, p, "", 0, Rat(0)};
        t.rat = *rat_parse(digits + "." + frac);
        return t;
      }
      Token t{Tok::NatNum, p, "", 0, Rat(0)};
      t.nat = std::stoull(digits);
      return t;
    }
    switch (c) {
      case '(': advance(); return {Tok::LParen, p, "", 0, Rat(0)};
      case ')': advance(); return {Tok::RParen, p, "", 0, Rat(0)};
      case ',': advance(); return {Tok::Comma, p, "", 0, Rat(0)};
      case '.': advance(); return {Tok::Dot, p, "", 0, Rat(0)};
      case ':': advance(); return {Tok::Colon, p, "", 0, Rat(0)};
      case '<': advance(); return {Tok::Lt, p, "", 0, Rat(0)};
      case '+': advance(); return {Tok::Plus, p, "", 0, Rat(0)};
      case '*': advance(); return {Tok::Star, p, "", 0, Rat(0)};
      case '/': advance(); return {Tok::Slash, p, "", 0, Rat(0)};
      case '=': advance(); return {Tok::Eq, p, "", 0, Rat(0)};
      case '-':
        advance();
        if (i < src.size() && src[i] == '>') {
          advance();
          return {Tok::Arrow, p, "", 0, Rat(0)};
        }
        return {Tok::Minus, p, "", 0, Rat(0)};
      default:
        throw RmlError(p, std::string("unexpected character '") + c + "'");
    }
  }
};

// Replaces free occurrences of variable x by a copy of r. Used by the
// let rec desugaring; r only contains generated names, so capture is
// impossible.
TermPtr subst_var(const TermPtr& t, const std::string& x, const TermPtr& r) {
  switch (t->kind) {
    case TermKind::Var:
      return t->name == x ? r : t;
    case TermKind::Lam:
      if (t->name == x) return t;
      break;
    case TermKind::Let: {
      TermPtr m1 = subst_var(t->m1, x, r);
      TermPtr m2 = t->name == x ? t->m2 : subst_var(t->m2, x, r);
      if (m1 == t->m1 && m2 == t->m2) return t;
      Term out = *t;
      out.m1 = m1;
      out.m2 = m2;
      return mk_term(std::move(out));
    }
    case TermKind::Rec:
      if (t->name == x || t->name2 == x) return t;
      break;
    default:
      break;
  }
  Term out = *t;
  bool changed = false;
  for (TermPtr Term::*f : {&Term::m1, &Term::m2, &Term::m3}) {
    if (out.*f) {
      TermPtr sub = subst_var(out.*f, x, r);
      if (sub != out.*f) changed = true;
      out.*f = sub;
    }
  }
  return changed ? mk_term(std::move(out)) : t;
}

struct Parser {
  Lexer lex;
  Token cur;

  explicit Parser(const std::string& s) : lex(s) { cur = lex.next(); }

  void bump() { cur = lex.next(); }

  void expect(Tok t, const char* what) {
    if (cur.tok != t) throw RmlError(cur.pos, std::string("expected ") + what);
    bump();
  }

  std::string expect_ident(const char* what) {
    if (cur.tok != Tok::Ident)
      throw RmlError(cur.pos, std::string("expected ") + what);
    if (builtin_names().count(cur.text))
      throw RmlError(cur.pos, "'" + cur.text + "' is reserved");
    std::string s = cur.text;
    bump();
    return s;
  }

  // type := tprod ('->' type)?   tprod := tatom ('*' tatom)*
  TypePtr parse_type() {
    TypePtr lhs = parse_type_prod();
    if (cur.tok == Tok::Arrow) {
      bump();
      return t_arrow(lhs, parse_type());
    }
    return lhs;
  }

  TypePtr parse_type_prod() {
    TypePtr lhs = parse_type_atom();
    while (cur.tok == Tok::Star) {
      bump();
      lhs = t_prod(lhs, parse_type_atom());
    }
    return lhs;
  }

  TypePtr parse_type_atom() {
    if (cur.tok == Tok::Ident && cur.text == "N") { bump(); return t_nat(); }
    if (cur.tok == Tok::Ident && cur.text == "B") { bump(); return t_bool(); }
    if (cur.tok == Tok::Ident && cur.text == "R") { bump(); return t_real(); }
    if (cur.tok == Tok::NatNum && cur.nat == 1) { bump(); return t_unit(); }
    if (cur.tok == Tok::LParen) {
      bump();
      TypePtr t = parse_type();
      expect(Tok::RParen, "')'");
      return t;
    }
    throw RmlError(cur.pos, "expected a type (N, B, R, 1)");
  }

  TermPtr parse_term() {
    Pos p = cur.pos;
    switch (cur.tok) {
      case Tok::KwLet: {
        bump();
        if (cur.tok == Tok::KwRec) {
          bump();
          std::string x = expect_ident("binder after 'let rec'");
          expect(Tok::Colon, "':' (let rec needs a type annotation)");
          TypePtr ty = parse_type();
          expect(Tok::Eq, "'='");
          TermPtr body = parse_term();
          expect(Tok::KwIn, "'in'");
          TermPtr rest = parse_term();
          // let rec x : T = M in N
          //   ==>  let x = rec(%x : 1 -> T, %u : 1. M[x := %x ()]) () in N
          std::string f = "%" + x;
          TermPtr self = mk_term(
              {TermKind::App, p, "", "", {}, {}, 0, Rat(0),
               mk_term({TermKind::Var, p, f, "", {}, {}, 0, Rat(0), {}, {}, {}}),
               mk_term({TermKind::UnitLit, p, "", "", {}, {}, 0, Rat(0), {}, {}, {}}),
               {}});
          TermPtr rec = mk_term({TermKind::Rec, p, f, "%u",
                                 t_arrow(t_unit(), ty), t_unit(), 0, Rat(0),
                                 subst_var(body, x, self), {}, {}});
          TermPtr app = mk_term(
              {TermKind::App, p, "", "", {}, {}, 0, Rat(0), rec,
               mk_term({TermKind::UnitLit, p, "", "", {}, {}, 0, Rat(0), {}, {}, {}}),
               {}});
          return mk_term(
              {TermKind::Let, p, x, "", {}, {}, 0, Rat(0), app, rest, {}});
        }
        std::string x = expect_ident("binder after 'let'");
        expect(Tok::Eq, "'='");
        TermPtr m = parse_term();
        expect(Tok::KwIn, "'in'");
        TermPtr n = parse_term();
        return mk_term({TermKind::Let, p, x, "", {}, {}, 0, Rat(0), m, n, {}});
      }
      case Tok::KwFun: {
        bump();
        std::string x = expect_ident("parameter after 'fun'");
        expect(Tok::Colon, "':'");
        // The annotation stops before '->' so it cannot swallow the body
        // separator; arrow types go in parentheses: fun f : (R -> R) -> ...
        TypePtr ty = parse_type_prod();
        expect(Tok::Arrow, "'->'");
        TermPtr body = parse_term();
        return mk_term(
            {TermKind::Lam, p, x, "", ty, {}, 0, Rat(0), body, {}, {}});
      }
      case Tok::KwIf: {
        bump();
        TermPtr c = parse_term();
        expect(Tok::KwThen, "'then'");
        TermPtr a = parse_term();
        expect(Tok::KwElse, "'else'");
        TermPtr b = parse_term();
        return mk_term({TermKind::If, p, "", "", {}, {}, 0, Rat(0), c, a, b});
      }
      default:
        return parse_cmp();
    }
  }

  TermPtr parse_cmp() {
    Pos p = cur.pos;
    TermPtr lhs = parse_sum();
    if (cur.tok == Tok::Lt) {
      bump();
      TermPtr rhs = parse_sum();
      if (cur.tok == Tok::Lt)
        throw RmlError(cur.pos, "'<' does not associate");
      return mk_term({TermKind::Lt, p, "", "", {}, {}, 0, Rat(0), lhs, rhs, {}});
    }
    return lhs;
  }

  TermPtr parse_sum() {
    TermPtr lhs = parse_prod();
    for (;;) {
      if (cur.tok == Tok::Plus || cur.tok == Tok::Minus) {
        TermKind k = cur.tok == Tok::Plus ? TermKind::Add : TermKind::Sub;
        Pos p = cur.pos;
        bump();
        TermPtr rhs = parse_prod();
        lhs = mk_term({k, p, "", "", {}, {}, 0, Rat(0), lhs, rhs, {}});
      } else {
        return lhs;
      }
    }
  }

  TermPtr parse_prod() {
    TermPtr lhs = parse_unary();
    for (;;) {
      if (cur.tok == Tok::Star || cur.tok == Tok::Slash) {
        TermKind k = cur.tok == Tok::Star ? TermKind::Mul : TermKind::Div;
        Pos p = cur.pos;
        bump();
        TermPtr rhs = parse_unary();
        lhs = mk_term({k, p, "", "", {}, {}, 0, Rat(0), lhs, rhs, {}});
      } else {
        return lhs;
      }
    }
  }

  TermPtr parse_unary() {
    if (cur.tok == Tok::Minus) {
      Pos p = cur.pos;
      bump();
      TermPtr m = parse_unary();
      TermPtr z = mk_term(
          {TermKind::RealLit, p, "", "", {}, {}, 0, Rat(0), {}, {}, {}});
      return mk_term({TermKind::Sub, p, "", "", {}, {}, 0, Rat(0), z, m, {}});
    }
    return parse_app();
  }

  static bool is_unary_builtin(const std::string& s) {
    return s == "exp" || s == "log" || s == "ln" || s == "sin" ||
           s == "sqrt" || s == "succ" || s == "pred" || s == "zero" ||
           s == "fst" || s == "snd" || s == "nat_to_real";
  }

  bool starts_atom() const {
    switch (cur.tok) {
      case Tok::Ident:
      case Tok::NatNum:
      case Tok::RealNum_:
      case Tok::KwTrue:
      case Tok::KwFalse:
      case Tok::LParen:
        return true;
      default:
        return false;
    }
  }

  TermPtr parse_app() {
    Pos p = cur.pos;
    TermPtr head;
    if (cur.tok == Tok::Ident && is_unary_builtin(cur.text)) {
      std::string b = cur.text;
      bump();
      if (!starts_atom())
        throw RmlError(cur.pos, "'" + b + "' needs an argument");
      TermPtr arg = parse_atom();
      TermKind k = b == "exp"    ? TermKind::Exp
                   : b == "log"  ? TermKind::Log
                   : b == "ln"   ? TermKind::Log
                   : b == "sin"  ? TermKind::Sin
                   : b == "sqrt" ? TermKind::Sqrt
                   : b == "succ" ? TermKind::Succ
                   : b == "pred" ? TermKind::Pred
                   : b == "zero" ? TermKind::IsZero
                   : b == "fst"  ? TermKind::Fst
                   : b == "snd"  ? TermKind::Snd
                                 : TermKind::NatToReal;
      head = mk_term({k, p, "", "", {}, {}, 0, Rat(0), arg, {}, {}});
    } else {
      head = parse_atom();
    }
    while (starts_atom()) {
      Pos q = cur.pos;
      TermPtr arg = parse_atom();
      head = mk_term(
          {TermKind::App, q, "", "", {}, {}, 0, Rat(0), head, arg, {}});
    }
    return head;
  }

  TermPtr parse_atom() {
    Pos p = cur.pos;
    switch (cur.tok) {
      case Tok::Ident: {
        if (cur.text == "bernoulli") {
          bump();
          return mk_term(
              {TermKind::Bernoulli, p, "", "", {}, {}, 0, Rat(0), {}, {}, {}});
        }
        if (cur.text == "uniform") {
          bump();
          return mk_term(
              {TermKind::Uniform, p, "", "", {}, {}, 0, Rat(0), {}, {}, {}});
        }
        if (builtin_names().count(cur.text))
          throw RmlError(p, "'" + cur.text + "' needs an argument");
        std::string x = cur.text;
        bump();
        return mk_term(
            {TermKind::Var, p, x, "", {}, {}, 0, Rat(0), {}, {}, {}});
      }
      case Tok::NatNum: {
        unsigned long long v = cur.nat;
        bump();
        return mk_term(
            {TermKind::NatLit, p, "", "", {}, {}, v, Rat(0), {}, {}, {}});
      }
      case Tok::RealNum_: {
        Rat v = cur.rat;
        bump();
        return mk_term(
            {TermKind::RealLit, p, "", "", {}, {}, 0, v, {}, {}, {}});
      }
      case Tok::KwTrue:
        bump();
        return mk_term(
            {TermKind::TrueLit, p, "", "", {}, {}, 0, Rat(0), {}, {}, {}});
      case Tok::KwFalse:
        bump();
        return mk_term(
            {TermKind::FalseLit, p, "", "", {}, {}, 0, Rat(0), {}, {}, {}});
      case Tok::KwRec:
        bump();
        return parse_rec(p);
      case Tok::LParen: {
        bump();
        if (cur.tok == Tok::RParen) {
          bump();
          return mk_term(
              {TermKind::UnitLit, p, "", "", {}, {}, 0, Rat(0), {}, {}, {}});
        }
        TermPtr m = parse_term();
        if (cur.tok == Tok::Comma) {
          bump();
          TermPtr n = parse_term();
          expect(Tok::RParen, "')'");
          return mk_term(
              {TermKind::Pair, p, "", "", {}, {}, 0, Rat(0), m, n, {}});
        }
        expect(Tok::RParen, "')'");
        return m;
      }
      default:
        throw RmlError(p, "expected a term");
    }
  }

  // 'rec' already consumed; parses the rest of rec(f : T, x : S. M).
  TermPtr parse_rec(Pos p) {
    expect(Tok::LParen, "'(' after rec");
    std::string f = expect_ident("function name");
    expect(Tok::Colon, "':'");
    TypePtr tf = parse_type();
    expect(Tok::Comma, "','");
    std::string x = expect_ident("argument name");
    expect(Tok::Colon, "':'");
    TypePtr tx = parse_type();
    expect(Tok::Dot, "'.'");
    TermPtr body = parse_term();
    expect(Tok::RParen, "')'");
    return mk_term({TermKind::Rec, p, f, x, tf, tx, 0, Rat(0), body, {}, {}});
  }
};

}  // namespace

TermPtr parse(const std::string& src) {
  Parser p(src);
  TermPtr t = p.parse_term();
  if (p.cur.tok != Tok::End)
    throw RmlError(p.cur.pos, "trailing input after the program term");
  return t;
}

}  // namespace lowr::rml
