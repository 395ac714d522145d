#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <utility>

#include "lowr/rml/denote.hpp"

namespace lowr::rml {

namespace {

using GV = GiryMeasure<Val>;

// Kleene iterates of rec terms, shared globally. C_0 is the bottom closure
// and C_i runs the body with the recursive name bound to C_{i-1} and inner
// recursion depth i, so an iterate is a function of (term, environment
// identity, level) alone. Queries at successive fuels then reuse every
// iterate below the new one, together with all approximation state cached
// inside it. Entries pin their term and environment so pointer keys stay
// valid for the life of the process.
struct RecKey {
  const Term* term;
  const EnvNode* env;
  Fuel level;
  bool operator<(const RecKey& o) const {
    return std::tie(term, env, level) < std::tie(o.term, o.env, o.level);
  }
};

struct RecEntry {
  std::shared_ptr<Closure> closure;
  TermPtr term_pin;
  EnvPtr env_pin;
};

std::shared_ptr<Closure> rec_iterate(const TermPtr& t, const EnvPtr& env,
                                     Fuel level) {
  static std::mutex mu;
  static std::map<RecKey, RecEntry> table;
  RecKey key{t.get(), env.get(), level};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = table.find(key);
    if (it != table.end()) return it->second.closure;
  }
  std::shared_ptr<Closure> c;
  if (level == 0) {
    c = std::make_shared<Closure>([](const Val&) { return g_bottom<Val>(); });
  } else {
    std::shared_ptr<Closure> prev = rec_iterate(t, env, level - 1);
    c = std::make_shared<Closure>([t, env, level, prev](const Val& a) {
      EnvPtr inner = env_extend(env_extend(env, t->name, Val::fun(prev)),
                                t->name2, a);
      return denote(t->m1, inner, level);
    });
  }
  std::lock_guard<std::mutex> lock(mu);
  auto [it, fresh] = table.emplace(key, RecEntry{c, t, env});
  (void)fresh;
  return it->second.closure;
}

GV real1(const GV& m, RealNum (*op)(const RealNum&)) {
  return g_bind(m, [op](const Val& v) {
    return g_unit(Val::real(op(v.as_real())));
  });
}

}  // namespace

GiryMeasure<Val> denote_lt(const RealNum& x, const RealNum& y) {
  // Constant boxes decide (or stay undecided) identically at every fuel, so
  // the comparison is a point mass or the zero measure outright. Dyadic box
  // scans resolve almost all their cells here.
  if (x.is_constant() && y.is_constant()) {
    if (x.box().hi < y.box().lo) return g_unit(Val::boolean(true));
    if (y.box().hi < x.box().lo) return g_unit(Val::boolean(false));
    return g_bottom<Val>();
  }
  // One sticky scan shared by both directions: a decision reached at any
  // fuel is a fact about the two reals and never reverses, which keeps the
  // routed integral monotone even through non-nested fallback enclosures.
  struct Decide {
    RealNum x, y;
    std::mutex mu;
    Fuel next = 0;
    int verdict = 0;
    Fuel at = -1;
    int sticky(Fuel n) {
      std::lock_guard<std::mutex> lock(mu);
      if (verdict != 0 && at <= n) return verdict;
      while (next <= n) {
        int d = lt_decide(x, y, next);
        if (d != 0) {
          verdict = d;
          at = next;
          return d;
        }
        ++next;
      }
      return 0;
    }
  };
  auto dec = std::make_shared<Decide>();
  dec->x = x;
  dec->y = y;
  return GV([dec](const Observable<Val>& f) {
    LowerRealNN on_true = f(Val::boolean(true));
    LowerRealNN on_false = f(Val::boolean(false));
    return LowerRealNN::from_fn([dec, on_true, on_false](Fuel n) {
      int d = dec->sticky(n);
      if (d > 0) return on_true.approx(n);
      if (d < 0) return on_false.approx(n);
      return Rat(0);
    });
  });
}

GiryMeasure<Val> denote(const TermPtr& t, const EnvPtr& env, Fuel rec_fuel) {
  switch (t->kind) {
    case TermKind::Var: return g_unit(env_lookup(env, t->name));
    case TermKind::NatLit: return g_unit(Val::nat(t->nat));
    case TermKind::RealLit:
      return g_unit(Val::real(RealNum::from_rat(t->rat)));
    case TermKind::TrueLit: return g_unit(Val::boolean(true));
    case TermKind::FalseLit: return g_unit(Val::boolean(false));
    case TermKind::UnitLit: return g_unit(Val::unit());
    case TermKind::Lam: {
      TermPtr body = t->m1;
      std::string x = t->name;
      Fuel fuel = rec_fuel;
      auto c = std::make_shared<Closure>([body, x, env, fuel](const Val& a) {
        return denote(body, env_extend(env, x, a), fuel);
      });
      return g_unit(Val::fun(std::move(c)));
    }
    case TermKind::App: {
      GV mf = denote(t->m1, env, rec_fuel);
      TermPtr arg = t->m2;
      Fuel fuel = rec_fuel;
      return g_bind(mf, [arg, env, fuel](const Val& f) {
        return g_bind(denote(arg, env, fuel), [f](const Val& a) {
          return f.as_fun()->apply(a);
        });
      });
    }
    case TermKind::Let: {
      GV m = denote(t->m1, env, rec_fuel);
      TermPtr body = t->m2;
      std::string x = t->name;
      Fuel fuel = rec_fuel;
      return g_bind(m, [body, x, env, fuel](const Val& v) {
        return denote(body, env_extend(env, x, v), fuel);
      });
    }
    case TermKind::Rec:
      return g_unit(Val::fun(rec_iterate(t, env, rec_fuel)));
    case TermKind::If: {
      GV mc = denote(t->m1, env, rec_fuel);
      TermPtr yes = t->m2, no = t->m3;
      Fuel fuel = rec_fuel;
      return g_bind(mc, [yes, no, env, fuel](const Val& c) {
        return denote(c.as_bool() ? yes : no, env, fuel);
      });
    }
    case TermKind::Pair: {
      GV ma = denote(t->m1, env, rec_fuel);
      TermPtr rhs = t->m2;
      Fuel fuel = rec_fuel;
      return g_bind(ma, [rhs, env, fuel](const Val& a) {
        // Strength: the settled left component rides along the right one.
        return g_map(denote(rhs, env, fuel),
                     [a](const Val& b) { return Val::pair(a, b); });
      });
    }
    case TermKind::Fst:
      return g_bind(denote(t->m1, env, rec_fuel), [](const Val& p) {
        return g_unit(p.as_pair().first);
      });
    case TermKind::Snd:
      return g_bind(denote(t->m1, env, rec_fuel), [](const Val& p) {
        return g_unit(p.as_pair().second);
      });
    case TermKind::Lt: {
      GV ma = denote(t->m1, env, rec_fuel);
      TermPtr rhs = t->m2;
      Fuel fuel = rec_fuel;
      return g_bind(ma, [rhs, env, fuel](const Val& a) {
        return g_bind(denote(rhs, env, fuel), [a](const Val& b) {
          return denote_lt(a.as_real(), b.as_real());
        });
      });
    }
    case TermKind::Add:
    case TermKind::Sub:
    case TermKind::Mul:
    case TermKind::Div: {
      TermKind k = t->kind;
      GV ma = denote(t->m1, env, rec_fuel);
      TermPtr rhs = t->m2;
      Fuel fuel = rec_fuel;
      return g_bind(ma, [k, rhs, env, fuel](const Val& a) {
        return g_bind(denote(rhs, env, fuel), [k, a](const Val& b) {
          const RealNum& x = a.as_real();
          const RealNum& y = b.as_real();
          switch (k) {
            case TermKind::Add: return g_unit(Val::real(real_add(x, y)));
            case TermKind::Sub: return g_unit(Val::real(real_sub(x, y)));
            case TermKind::Mul: return g_unit(Val::real(real_mul(x, y)));
            default:
              // Division is defined away from zero; the quotient's mass
              // waits for the divisor to separate from 0.
              return g_restrict(cert_nonzero_sier(y),
                                g_unit(Val::real(real_div(x, y))));
          }
        });
      });
    }
    case TermKind::Exp: return real1(denote(t->m1, env, rec_fuel), real_exp);
    case TermKind::Sin: return real1(denote(t->m1, env, rec_fuel), real_sin);
    case TermKind::Log:
      return g_bind(denote(t->m1, env, rec_fuel), [](const Val& v) {
        const RealNum& x = v.as_real();
        return g_restrict(cert_pos_sier(x), g_unit(Val::real(real_log(x))));
      });
    case TermKind::Sqrt:
      return g_bind(denote(t->m1, env, rec_fuel), [](const Val& v) {
        const RealNum& x = v.as_real();
        return g_restrict(cert_nonneg_sier(x), g_unit(Val::real(real_sqrt(x))));
      });
    case TermKind::Succ:
      return g_bind(denote(t->m1, env, rec_fuel), [](const Val& v) {
        return g_unit(Val::nat(v.as_nat() + 1));
      });
    case TermKind::Pred:
      return g_bind(denote(t->m1, env, rec_fuel), [](const Val& v) {
        return g_unit(Val::nat(v.as_nat() == 0 ? 0 : v.as_nat() - 1));
      });
    case TermKind::IsZero:
      return g_bind(denote(t->m1, env, rec_fuel), [](const Val& v) {
        return g_unit(Val::boolean(v.as_nat() == 0));
      });
    case TermKind::NatToReal:
      return g_bind(denote(t->m1, env, rec_fuel), [](const Val& v) {
        return g_unit(Val::real(RealNum::from_rat(rat_from_u64(v.as_nat()))));
      });
    case TermKind::Bernoulli:
      return g_from_weights<Val>(
          {{Val::boolean(true), Rat(1, 2)}, {Val::boolean(false), Rat(1, 2)}});
    case TermKind::Uniform:
      return g_map(g_uniform01(),
                   [](const RealNum& r) { return Val::real(r); });
  }
  throw std::logic_error("malformed term in denote");
}

}  // namespace lowr::rml
