#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "lowr/rat.hpp"

namespace lowr::rml {

struct Pos {
  int line = 0;
  int col = 0;
};

// A parse or type error carrying a source position.
struct RmlError : std::runtime_error {
  Pos pos;
  RmlError(Pos p, const std::string& msg)
      : std::runtime_error(std::to_string(p.line) + ":" +
                           std::to_string(p.col) + ": " + msg),
        pos(p) {}
};

enum class TypeKind { Nat, Bool, Real, Unit, Prod, Arrow };

struct RmlType;
using TypePtr = std::shared_ptr<const RmlType>;

struct RmlType {
  TypeKind kind;
  TypePtr a, b;  // Prod and Arrow children
};

inline TypePtr t_nat() {
  static TypePtr t = std::make_shared<RmlType>(RmlType{TypeKind::Nat, {}, {}});
  return t;
}
inline TypePtr t_bool() {
  static TypePtr t = std::make_shared<RmlType>(RmlType{TypeKind::Bool, {}, {}});
  return t;
}
inline TypePtr t_real() {
  static TypePtr t = std::make_shared<RmlType>(RmlType{TypeKind::Real, {}, {}});
  return t;
}
inline TypePtr t_unit() {
  static TypePtr t = std::make_shared<RmlType>(RmlType{TypeKind::Unit, {}, {}});
  return t;
}
inline TypePtr t_prod(TypePtr a, TypePtr b) {
  return std::make_shared<RmlType>(
      RmlType{TypeKind::Prod, std::move(a), std::move(b)});
}
inline TypePtr t_arrow(TypePtr a, TypePtr b) {
  return std::make_shared<RmlType>(
      RmlType{TypeKind::Arrow, std::move(a), std::move(b)});
}

inline bool type_eq(const TypePtr& x, const TypePtr& y) {
  if (x.get() == y.get()) return true;
  if (x->kind != y->kind) return false;
  if (x->kind == TypeKind::Prod || x->kind == TypeKind::Arrow)
    return type_eq(x->a, y->a) && type_eq(x->b, y->b);
  return true;
}

// Prints with minimal parentheses: -> is right associative and binds looser
// than *.
inline std::string type_str(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::Nat: return "N";
    case TypeKind::Bool: return "B";
    case TypeKind::Real: return "R";
    case TypeKind::Unit: return "1";
    case TypeKind::Prod: {
      auto wrap = [](const TypePtr& s) {
        std::string w = type_str(s);
        if (s->kind == TypeKind::Prod || s->kind == TypeKind::Arrow)
          return "(" + w + ")";
        return w;
      };
      return wrap(t->a) + " * " + wrap(t->b);
    }
    case TypeKind::Arrow: {
      std::string lhs = type_str(t->a);
      if (t->a->kind == TypeKind::Arrow) lhs = "(" + lhs + ")";
      return lhs + " -> " + type_str(t->b);
    }
  }
  return "?";
}

enum class TermKind {
  Var,
  NatLit,
  RealLit,
  TrueLit,
  FalseLit,
  UnitLit,
  Lam,   // fun name : ty1 -> m1
  App,   // m1 m2
  Let,   // let name = m1 in m2
  Rec,   // rec(name : ty1, name2 : ty2. m1)
  If,    // if m1 then m2 else m3
  Pair,  // (m1, m2)
  Fst,
  Snd,
  Lt,  // m1 < m2
  Add,
  Sub,
  Mul,
  Div,
  Exp,
  Log,
  Sin,
  Sqrt,
  Succ,
  Pred,
  IsZero,  // zero(m1)
  NatToReal,
  Bernoulli,
  Uniform,
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  TermKind kind;
  Pos pos;
  std::string name;   // Var / Lam param / Let binder / Rec function name
  std::string name2;  // Rec argument name
  TypePtr ty1, ty2;
  unsigned long long nat = 0;  // NatLit
  Rat rat;                     // RealLit
  TermPtr m1, m2, m3;
};

inline TermPtr mk_term(Term t) {
  return std::make_shared<const Term>(std::move(t));
}

// Parse a complete program (one closed term followed by end of input).
// Throws RmlError on malformed input.
TermPtr parse(const std::string& src);

// Type synthesis for closed terms; throws RmlError.
TypePtr typecheck(const TermPtr& t);

}  // namespace lowr::rml
