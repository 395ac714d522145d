#include <memory>
#include <string>
#include <utility>

#include "lowr/rml/ast.hpp"

namespace lowr::rml {

namespace {

struct Ctx {
  std::string name;
  TypePtr ty;
  const Ctx* next;
};

const TypePtr* lookup(const Ctx* ctx, const std::string& x) {
  for (; ctx; ctx = ctx->next)
    if (ctx->name == x) return &ctx->ty;
  return nullptr;
}

TypePtr synth(const TermPtr& t, const Ctx* ctx);

TypePtr check_real2(const TermPtr& t, const Ctx* ctx, const char* op) {
  TypePtr a = synth(t->m1, ctx);
  TypePtr b = synth(t->m2, ctx);
  if (a->kind != TypeKind::Real || b->kind != TypeKind::Real)
    throw RmlError(t->pos, std::string(op) + " expects R operands, got " +
                               type_str(a) + " and " + type_str(b));
  return t_real();
}

TypePtr check_unary(const TermPtr& t, const Ctx* ctx, TypeKind arg,
                    TypePtr result, const char* op) {
  TypePtr a = synth(t->m1, ctx);
  if (a->kind != arg)
    throw RmlError(t->pos,
                   std::string(op) + " expects " +
                       type_str(arg == TypeKind::Real ? t_real() : t_nat()) +
                       ", got " + type_str(a));
  return result;
}

TypePtr synth(const TermPtr& t, const Ctx* ctx) {
  switch (t->kind) {
    case TermKind::Var: {
      const TypePtr* ty = lookup(ctx, t->name);
      if (!ty) throw RmlError(t->pos, "unbound variable '" + t->name + "'");
      return *ty;
    }
    case TermKind::NatLit: return t_nat();
    case TermKind::RealLit: return t_real();
    case TermKind::TrueLit:
    case TermKind::FalseLit: return t_bool();
    case TermKind::UnitLit: return t_unit();
    case TermKind::Lam: {
      Ctx ext{t->name, t->ty1, ctx};
      return t_arrow(t->ty1, synth(t->m1, &ext));
    }
    case TermKind::App: {
      TypePtr f = synth(t->m1, ctx);
      TypePtr a = synth(t->m2, ctx);
      if (f->kind != TypeKind::Arrow)
        throw RmlError(t->pos, "applied term has type " + type_str(f) +
                                   ", not a function");
      if (!type_eq(f->a, a))
        throw RmlError(t->pos, "argument has type " + type_str(a) +
                                   " but the function expects " +
                                   type_str(f->a));
      return f->b;
    }
    case TermKind::Let: {
      TypePtr m = synth(t->m1, ctx);
      Ctx ext{t->name, m, ctx};
      return synth(t->m2, &ext);
    }
    case TermKind::Rec: {
      if (t->ty1->kind != TypeKind::Arrow)
        throw RmlError(t->pos, "rec function must have an arrow type, got " +
                                   type_str(t->ty1));
      if (!type_eq(t->ty1->a, t->ty2))
        throw RmlError(t->pos, "rec argument type " + type_str(t->ty2) +
                                   " does not match the domain of " +
                                   type_str(t->ty1));
      Ctx f{t->name, t->ty1, ctx};
      Ctx x{t->name2, t->ty2, &f};
      TypePtr body = synth(t->m1, &x);
      if (!type_eq(body, t->ty1->b))
        throw RmlError(t->pos, "rec body has type " + type_str(body) +
                                   " but the annotation promises " +
                                   type_str(t->ty1->b));
      return t->ty1;
    }
    case TermKind::If: {
      TypePtr c = synth(t->m1, ctx);
      if (c->kind != TypeKind::Bool)
        throw RmlError(t->pos,
                       "if condition has type " + type_str(c) + ", not B");
      TypePtr a = synth(t->m2, ctx);
      TypePtr b = synth(t->m3, ctx);
      if (!type_eq(a, b))
        throw RmlError(t->pos, "if branches have types " + type_str(a) +
                                   " and " + type_str(b));
      return a;
    }
    case TermKind::Pair:
      return t_prod(synth(t->m1, ctx), synth(t->m2, ctx));
    case TermKind::Fst: {
      TypePtr p = synth(t->m1, ctx);
      if (p->kind != TypeKind::Prod)
        throw RmlError(t->pos, "fst expects a pair, got " + type_str(p));
      return p->a;
    }
    case TermKind::Snd: {
      TypePtr p = synth(t->m1, ctx);
      if (p->kind != TypeKind::Prod)
        throw RmlError(t->pos, "snd expects a pair, got " + type_str(p));
      return p->b;
    }
    case TermKind::Lt: {
      TypePtr a = synth(t->m1, ctx);
      TypePtr b = synth(t->m2, ctx);
      if (a->kind != TypeKind::Real || b->kind != TypeKind::Real)
        throw RmlError(t->pos, "< compares R values, got " + type_str(a) +
                                   " and " + type_str(b));
      return t_bool();
    }
    case TermKind::Add: return check_real2(t, ctx, "+");
    case TermKind::Sub: return check_real2(t, ctx, "-");
    case TermKind::Mul: return check_real2(t, ctx, "*");
    case TermKind::Div: return check_real2(t, ctx, "/");
    case TermKind::Exp:
      return check_unary(t, ctx, TypeKind::Real, t_real(), "exp");
    case TermKind::Log:
      return check_unary(t, ctx, TypeKind::Real, t_real(), "log");
    case TermKind::Sin:
      return check_unary(t, ctx, TypeKind::Real, t_real(), "sin");
    case TermKind::Sqrt:
      return check_unary(t, ctx, TypeKind::Real, t_real(), "sqrt");
    case TermKind::Succ:
      return check_unary(t, ctx, TypeKind::Nat, t_nat(), "succ");
    case TermKind::Pred:
      return check_unary(t, ctx, TypeKind::Nat, t_nat(), "pred");
    case TermKind::IsZero:
      return check_unary(t, ctx, TypeKind::Nat, t_bool(), "zero");
    case TermKind::NatToReal:
      return check_unary(t, ctx, TypeKind::Nat, t_real(), "nat_to_real");
    case TermKind::Bernoulli: return t_bool();
    case TermKind::Uniform: return t_real();
  }
  throw RmlError(t->pos, "malformed term");
}

}  // namespace

TypePtr typecheck(const TermPtr& t) { return synth(t, nullptr); }

}  // namespace lowr::rml
