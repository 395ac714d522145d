#include <memory>
#include <random>
#include <string>
#include <utility>

#include "lowr/interval.hpp"
#include "lowr/rml/sample.hpp"

namespace lowr::rml {

namespace {

struct SEnvNode;
using SEnvPtr = std::shared_ptr<const SEnvNode>;

struct SEnvNode {
  std::string name;
  SVal val;
  SEnvPtr next;
};

SEnvPtr sext(SEnvPtr env, std::string name, SVal v) {
  return std::make_shared<const SEnvNode>(
      SEnvNode{std::move(name), std::move(v), std::move(env)});
}

}  // namespace

struct SVal::ClosureRep {
  TermPtr node;  // Lam or Rec
  SEnvPtr env;
};

namespace {

struct OutOfSteps {};
struct DomainFault {};

constexpr long kOraclePrec = 48;

Rat mid_of(Rat lo, Rat hi) { return (lo + hi) / 2; }

struct Runner {
  std::mt19937_64 rng;
  long steps_left;

  SVal eval(const TermPtr& t, const SEnvPtr& env) {
    if (--steps_left < 0) throw OutOfSteps{};
    switch (t->kind) {
      case TermKind::Var: {
        for (const SEnvNode* n = env.get(); n; n = n->next.get())
          if (n->name == t->name) return n->val;
        throw DomainFault{};  // unreachable on typechecked programs
      }
      case TermKind::NatLit: {
        SVal v{};
        v.tag = SVal::Tag::Nat;
        v.nat = t->nat;
        return v;
      }
      case TermKind::RealLit: {
        SVal v{};
        v.tag = SVal::Tag::Real;
        v.real = t->rat;
        return v;
      }
      case TermKind::TrueLit:
      case TermKind::FalseLit: {
        SVal v{};
        v.tag = SVal::Tag::Bool;
        v.b = t->kind == TermKind::TrueLit;
        return v;
      }
      case TermKind::UnitLit: {
        SVal v{};
        v.tag = SVal::Tag::Unit;
        return v;
  }
      case TermKind::Lam:
      case TermKind::Rec: {
        SVal v{};
        v.tag = SVal::Tag::Fun;
        v.fun = std::make_shared<const SVal::ClosureRep>(
            SVal::ClosureRep{t, env});
        return v;
      }
      case TermKind::App: {
        SVal f = eval(t->m1, env);
        SVal a = eval(t->m2, env);
        return apply(f, a);
      }
      case TermKind::Let: {
        SVal v = eval(t->m1, env);
        return eval(t->m2, sext(env, t->name, std::move(v)));
      }
      case TermKind::If: {
        SVal c = eval(t->m1, env);
        return eval(c.b ? t->m2 : t->m3, env);
      }
      case TermKind::Pair: {
        SVal a = eval(t->m1, env);
        SVal b = eval(t->m2, env);
        SVal v{};
        v.tag = SVal::Tag::Pair;
        v.fst = std::make_shared<const SVal>(std::move(a));
        v.snd = std::make_shared<const SVal>(std::move(b));
        return v;
      }
      case TermKind::Fst: return *eval(t->m1, env).fst;
      case TermKind::Snd: return *eval(t->m1, env).snd;
      case TermKind::Lt: {
        SVal a = eval(t->m1, env);
        SVal b = eval(t->m2, env);
        SVal v{};
        v.tag = SVal::Tag::Bool;
        v.b = a.real < b.real;  // ties resolve to false
        return v;
      }
      case TermKind::Add:
      case TermKind::Sub:
      case TermKind::Mul:
      case TermKind::Div: {
        SVal a = eval(t->m1, env);
        SVal b = eval(t->m2, env);
        SVal v{};
        v.tag = SVal::Tag::Real;
        switch (t->kind) {
          case TermKind::Add: v.real = a.real + b.real; break;
          case TermKind::Sub: v.real = a.real - b.real; break;
          case TermKind::Mul: v.real = a.real * b.real; break;
          default:
            if (b.real == 0) throw DomainFault{};
            v.real = a.real / b.real;
        }
        return v;
      }
      case TermKind::Exp: return unary_real(t, env, UnaryFn::Exp);
      case TermKind::Log: return unary_real(t, env, UnaryFn::Log);
      case TermKind::Sin: return unary_real(t, env, UnaryFn::Sin);
      case TermKind::Sqrt: return unary_real(t, env, UnaryFn::Sqrt);
      case TermKind::Succ:
      case TermKind::Pred:
      case TermKind::IsZero:
      case TermKind::NatToReal: {
        SVal a = eval(t->m1, env);
        SVal v{};
        switch (t->kind) {
          case TermKind::Succ:
            v.tag = SVal::Tag::Nat;
            v.nat = a.nat + 1;
            break;
          case TermKind::Pred:
            v.tag = SVal::Tag::Nat;
            v.nat = a.nat == 0 ? 0 : a.nat - 1;
            break;
          case TermKind::IsZero:
            v.tag = SVal::Tag::Bool;
            v.b = a.nat == 0;
            break;
          default:
            v.tag = SVal::Tag::Real;
            v.real = rat_from_u64(a.nat);
        }
        return v;
      }
      case TermKind::Bernoulli: {
        SVal v{};
        v.tag = SVal::Tag::Bool;
        v.b = (rng() & 1) == 1;
        return v;
      }
      case TermKind::Uniform: {
        SVal v{};
        v.tag = SVal::Tag::Real;
        v.real = rat_from_u64(rng()) / pow2(64);
        return v;
      }
    }
    throw DomainFault{};
  }

  enum class UnaryFn { Exp, Log, Sin, Sqrt };

  SVal unary_real(const TermPtr& t, const SEnvPtr& env, UnaryFn fn) {
    SVal a = eval(t->m1, env);
    const Rat& q = a.real;
    SVal v{};
    v.tag = SVal::Tag::Real;
    switch (fn) {
      case UnaryFn::Exp:
        v.real = mid_of(kernels::exp_lower(q, kOraclePrec),
                        kernels::exp_upper(q, kOraclePrec));
        break;
      case UnaryFn::Log:
        if (q <= 0) throw DomainFault{};
        v.real = mid_of(kernels::log_lower(q, kOraclePrec),
                        kernels::log_upper(q, kOraclePrec));
        break;
      case UnaryFn::Sin:
        v.real = mid_of(kernels::sin_lower(q, kOraclePrec),
                        kernels::sin_upper(q, kOraclePrec));
        break;
      case UnaryFn::Sqrt:
        if (q < 0) throw DomainFault{};
        v.real = mid_of(kernels::sqrt_lower(q, kOraclePrec),
                        kernels::sqrt_upper(q, kOraclePrec));
        break;
    }
    return v;
  }

  SVal apply(const SVal& f, const SVal& a) {
    const TermPtr& node = f.fun->node;
    if (node->kind == TermKind::Lam)
      return eval(node->m1, sext(f.fun->env, node->name, a));
    // rec(g : T, x : S. M): the closure re-enters with itself bound to g.
    SEnvPtr env = sext(f.fun->env, node->name, f);
    return eval(node->m1, sext(std::move(env), node->name2, a));
  }
};

}  // namespace

std::optional<SVal> sample(const TermPtr& t, unsigned long long seed,
                           long max_steps) {
  Runner r{std::mt19937_64(seed), max_steps};
  try {
    return r.eval(t, nullptr);
  } catch (OutOfSteps&) {
    return std::nullopt;
  } catch (DomainFault&) {
    return std::nullopt;
  }
}

}  // namespace lowr::rml
