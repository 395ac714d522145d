#pragma once

#include <cassert>
#include <functional>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "lowr/observable.hpp"
#include "lowr/rat.hpp"
#include "lowr/real_open.hpp"

namespace lowr {

// A lower integral: a functional on observables. Linearity, monotonicity and
// omega-continuity are properties of the instances constructed below, not of
// the type.
template <class A>
using Integral = std::function<LowerRealNN(const Observable<A>&)>;

// A finitely-supported sub-probability valuation: atoms with nonnegative
// rational weights summing to at most 1.
template <class A>
struct DiscreteValuation {
  std::vector<std::pair<A, Rat>> atoms;

  Rat total() const {
    Rat s(0);
    for (const auto& aw : atoms) s += aw.second;
    return s;
  }

  // mu(U): the weight of the atoms whose membership has fired by each fuel.
  LowerRealNN measure_of(const OpenSet<A>& u) const {
    std::vector<std::pair<Sier, Rat>> fired;
    fired.reserve(atoms.size());
    for (const auto& aw : atoms) fired.emplace_back(u.member(aw.first), aw.second);
    return LowerRealNN::from_fn([fired](Fuel n) {
      Rat s(0);
      for (const auto& f : fired)
        if (f.first.approx(n)) s += f.second;
      return s;
    });
  }
};

// The Lebesgue valuation on formal opens of the line, evaluated on general
// open sets by dyadic exhaustion: at fuel n the certified union C_n collects,
// for every level k <= n, the open level-k boxes inside the window
// (-2^k, 2^k) whose certificate fires at fuel k. C_n is cached incrementally
// per measure_of call.
class LebesgueValuation {
 public:
  LowerRealNN measure_of(const OpenSet<RealNum>& u) const {
    struct State {
      OpenSet<RealNum> u;
      std::mutex mu;
      std::vector<RatOpenSet> covers;  // covers[k] = C_k
      explicit State(OpenSet<RealNum> uu) : u(std::move(uu)) {}
      RatOpenSet cover(Fuel n) {
        std::lock_guard<std::mutex> lock(mu);
        while (static_cast<Fuel>(covers.size()) <= n) {
          Fuel k = static_cast<Fuel>(covers.size());
          RatOpenSet prev = k == 0 ? ros_empty() : covers[k - 1];
          std::vector<std::pair<Rat, Rat>> found = prev.comps;
          Rat w = pow2(-k);
          long lim = 1L << (2 * k > 40 ? 40 : 2 * k);  // i in [-4^k, 4^k)
          Rat lo = Rat(-lim) * w;
          for (long i = -lim; i < lim; ++i) {
            Rat hi = lo + w;
            if (!ros_contains_open_box(prev, lo, hi) &&
                u.box_cert(RatInterval(lo, hi), k))
              found.emplace_back(lo, hi);
            lo = std::move(hi);
          }
          covers.push_back(ros_normalize(std::move(found)));
        }
        return covers[n];
      }
    };
    auto st = std::make_shared<State>(u);
    return LowerRealNN::from_fn(
        [st](Fuel n) { return lambda_raw(st->cover(n)); });
  }

  // Lambda' on the lattice itself (exact).
  Rat on_lattice(const RatOpenSet& s) const { return lambda_raw(s); }
};

// --- Riesz extension -------------------------------------------------------
//
// The simple-function approximation s_{f,m,n} = sum_{i=1}^{mn} (1/m) *
// mu([f > i/m]) on the grid m = 2^j, n = j, read at fuel j and made monotone
// by a running max over j.

template <class A>
LowerRealNN riesz_extend(const DiscreteValuation<A>& mu,
                         const Observable<A>& f) {
  std::vector<std::pair<LowerRealNN, Rat>> vals;
  vals.reserve(mu.atoms.size());
  for (const auto& aw : mu.atoms) vals.emplace_back(f(aw.first), aw.second);
  return LowerRealNN::from_fn([vals](Fuel k) {
    Rat best(0);
    for (Fuel j = 0; j <= k; ++j) {
      Rat m = pow2(j);
      Rat inv_m = pow2(-j);
      long mn = static_cast<long>(j) << j;
      Rat s(0);
      for (const auto& vw : vals) {
        // This atom contributes w/m for every threshold i/m < f(a), i.e.
        // w * min(#{i >= 1 : i < m v}, mn)/m  with v read at fuel j.
        Rat v = vw.first.approx(j);
        if (v <= 0) continue;
        Rat scaled = v * m;
        Int cnt = rat_ceil(scaled) - 1;
        if (Rat(cnt) > Rat(mn)) cnt = mn;
        if (cnt > 0) s += vw.second * Rat(cnt) * inv_m;
      }
      best = rat_max(best, s);
    }
    return best;
  });
}

// Literal per-threshold evaluation, for cross-checking the closed form above
// at small fuels.
template <class A>
LowerRealNN riesz_extend_literal(const DiscreteValuation<A>& mu,
                                 const Observable<A>& f) {
  return LowerRealNN::from_fn([mu, f](Fuel k) {
    Rat best(0);
    for (Fuel j = 0; j <= k; ++j) {
      Rat m = pow2(j);
      long mn = static_cast<long>(j) << j;
      Rat s(0);
      for (long i = 1; i <= mn; ++i) {
        Rat q = Rat(i) / m;
        s += mu.measure_of(open_superlevel(f, q)).approx(j) / m;
      }
      best = rat_max(best, s);
    }
    return best;
  });
}

// Riesz extension over the Lebesgue valuation. Evaluated by the staircase
// identity: with mu([f > i/m]) read as the level-j certified box union,
// lambda' adds plain widths (dyadic boxes never merge at one level), so the
// threshold sum collapses to one scan:
//   s_{f,2^j,j} = sum_boxes 2^-j * min(#{i >= 1 : i/2^j < ext_box}, j 2^j)/2^j
// where ext_box = f(box).approx(j). The per-threshold form is kept in
// riesz_extend_lebesgue_literal and the two are equated in tests.
inline LowerRealNN riesz_extend(const LebesgueValuation&,
                                const Observable<RealNum>& f) {
  return LowerRealNN::from_fn([f](Fuel k) {
    Rat best(0);
    for (Fuel j = 0; j <= k; ++j) {
      Rat w = pow2(-j);
      long mn = static_cast<long>(j) << j;
      long lim = 1L << (2 * j > 40 ? 40 : 2 * j);
      Rat s(0);
      for (long i = -lim; i < lim; ++i) {
        RatInterval box(Rat(i) * w, Rat(i + 1) * w);
        Rat v = f(RealNum::from_interval(box)).approx(j);
        if (v <= 0) continue;
        Int cnt = rat_ceil(v * pow2(j)) - 1;
        if (Rat(cnt) > Rat(mn)) cnt = mn;
        if (cnt > 0) s += Rat(cnt) * w * w;
      }
      best = rat_max(best, s);
    }
    return best;
  });
}

inline LowerRealNN riesz_extend_lebesgue_literal(
    const LebesgueValuation& mu, const Observable<RealNum>& f) {
  return LowerRealNN::from_fn([mu, f](Fuel k) {
    Rat best(0);
    for (Fuel j = 0; j <= k; ++j) {
      Rat m = pow2(j);
      long mn = static_cast<long>(j) << j;
      Rat s(0);
      for (long i = 1; i <= mn; ++i) {
        Rat q = Rat(i) / m;
        s += mu.measure_of(open_superlevel(f, q)).approx(j) / m;
      }
      best = rat_max(best, s);
    }
    return best;
  });
}

// Restriction of a lower integral to an open set: f |-> I(f * 1_U).
template <class A>
Integral<A> integral_restrict(Integral<A> integral, OpenSet<A> u) {
  return [integral = std::move(integral), u = std::move(u)](
             const Observable<A>& f) { return integral(obs_restrict(f, u)); };
}

// Iterated-integral products of two lower integrals; Fubini says the two
// orders agree.
template <class A, class B>
Integral<std::pair<A, B>> product_fwd(Integral<A> ia, Integral<B> ib) {
  return [ia = std::move(ia),
          ib = std::move(ib)](const Observable<std::pair<A, B>>& f) {
    return ia(Observable<A>([ib, f](const A& a) {
      return ib(Observable<B>(
          [f, a](const B& b) { return f(std::make_pair(a, b)); }));
    }));
  };
}

template <class A, class B>
Integral<std::pair<A, B>> product_bwd(Integral<A> ia, Integral<B> ib) {
  return [ia = std::move(ia),
          ib = std::move(ib)](const Observable<std::pair<A, B>>& f) {
    return ib(Observable<B>([ia, f](const B& b) {
      return ia(Observable<A>(
          [f, b](const A& a) { return f(std::make_pair(a, b)); }));
    }));
  };
}

// 1_{U x V} = 1_U * 1_V pointwise; exposed as a helper for product tests.
template <class A, class B>
Observable<std::pair<A, B>> indicator_product(const OpenSet<A>& u,
                                              const OpenSet<B>& v) {
  return Observable<std::pair<A, B>>([u, v](const std::pair<A, B>& p) {
    Sier su = u.member(p.first), sv = v.member(p.second);
    return LowerRealNN::from_fn([su, sv](Fuel n) {
      return su.approx(n) && sv.approx(n) ? Rat(1) : Rat(0);
    });
  });
}

}  // namespace lowr
