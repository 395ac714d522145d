#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <type_traits>
#include <utility>
#include <vector>

#include "lowr/interval.hpp"
#include "lowr/observable.hpp"
#include "lowr/rat.hpp"

namespace lowr {

// A sub-probability measure on A, represented by its lower integration
// functional. Point masses get their own representation so that the pure
// fragment of a program (the bulk of every integrand evaluation) costs a
// direct function call instead of a deferred closure; g_bind and g_map
// collapse on them by the monad laws.
//
// Integration results are not memoized here. Measures that are integrated
// repeatedly with the same observable (closure application results, per-level
// roots, chain members) are wrapped in g_cached at the point where the reuse
// arises; everything else is integrated once and memoization would only add
// a map insertion per throwaway measure.
template <class A>
class GiryMeasure {
 public:
  using value_type = A;
  using IntegrateFn = std::function<LowerRealNN(const Observable<A>&)>;

  explicit GiryMeasure(IntegrateFn fn)
      : fn_(std::make_shared<const IntegrateFn>(std::move(fn))) {}

  static GiryMeasure point(A a) {
    GiryMeasure m;
    m.point_ = std::make_shared<const A>(std::move(a));
    return m;
  }

  LowerRealNN integrate(const Observable<A>& f) const {
    if (point_) return f(*point_);
    return (*fn_)(f);
  }

  // Total mass, i.e. the integral of the constant 1. Builds a fresh
  // observable per call; callers reading many fuels should call once and
  // keep the LowerRealNN.
  LowerRealNN mass() const {
    return integrate(Observable<A>::constant(Rat(1)));
  }

  const A* as_point() const { return point_.get(); }

 private:
  GiryMeasure() = default;
  std::shared_ptr<const A> point_;
  std::shared_ptr<const IntegrateFn> fn_;
};

// Unit: the point mass at a.
template <class A>
GiryMeasure<A> g_unit(A a) {
  return GiryMeasure<A>::point(std::move(a));
}

// The zero measure.
template <class A>
GiryMeasure<A> g_bottom() {
  return GiryMeasure<A>([](const Observable<A>&) {
    return LowerRealNN::from_rat(Rat(0));
  });
}

// Bind. On a point mass this is the left unit law applied structurally: the
// continuation runs now and its measure is the result. Otherwise the
// observable is passed to the continuation's measures unchanged, keeping its
// identity stable down the whole chain.
template <class A, class K,
          class B = typename std::invoke_result_t<K, const A&>::value_type>
GiryMeasure<B> g_bind(const GiryMeasure<A>& m, K k) {
  if (const A* a = m.as_point()) return k(*a);
  return GiryMeasure<B>([m, k = std::move(k)](const Observable<B>& f) {
    return m.integrate(Observable<A>(
        [k, f](const A& a) { return k(a).integrate(f); }));
  });
}

// Pushforward along h.
template <class A, class H, class B = std::invoke_result_t<H, const A&>>
GiryMeasure<B> g_map(const GiryMeasure<A>& m, H h) {
  if (const A* a = m.as_point()) return g_unit(h(*a));
  return GiryMeasure<B>([m, h = std::move(h)](const Observable<B>& f) {
    return m.integrate(Observable<A>(
        [h, f](const A& a) { return f(h(a)); }));
  });
}

// Memoized integration per observable identity. The entry pins the
// observable so its id cannot be reused by a later allocation, and the
// shared LowerRealNN makes repeated fuel reads hit the same interior state.
template <class A>
GiryMeasure<A> g_cached(GiryMeasure<A> m) {
  struct Memo {
    GiryMeasure<A> m;
    std::mutex mu;
    std::map<const void*, std::pair<Observable<A>, LowerRealNN>> entries;
    explicit Memo(GiryMeasure<A> mm) : m(std::move(mm)) {}
  };
  auto memo = std::make_shared<Memo>(std::move(m));
  return GiryMeasure<A>([memo](const Observable<A>& f) {
    {
      std::lock_guard<std::mutex> lock(memo->mu);
      auto it = memo->entries.find(f.id());
      if (it != memo->entries.end()) return it->second.second;
    }
    LowerRealNN r = memo->m.integrate(f);
    std::lock_guard<std::mutex> lock(memo->mu);
    auto [it, fresh] = memo->entries.emplace(f.id(), std::make_pair(f, r));
    (void)fresh;
    return it->second.second;
  });
}

// Strength: pair a fixed left component with a measure on the right.
template <class A, class B>
GiryMeasure<std::pair<A, B>> g_strength(A a, const GiryMeasure<B>& mb) {
  return g_map(mb, [a = std::move(a)](const B& b) {
    return std::make_pair(a, b);
  });
}

// Product measures by iterated integration, in both orders. Fubini says the
// two agree; tests hold both routes side by side.
template <class A, class B>
GiryMeasure<std::pair<A, B>> g_pair_fwd(const GiryMeasure<A>& ma,
                                        const GiryMeasure<B>& mb) {
  return g_bind(ma, [mb](const A& a) { return g_strength(a, mb); });
}

template <class A, class B>
GiryMeasure<std::pair<A, B>> g_pair_bwd(const GiryMeasure<A>& ma,
                                        const GiryMeasure<B>& mb) {
  auto swapped = g_bind(mb, [ma](const B& b) { return g_strength(b, ma); });
  return g_map(swapped, [](const std::pair<B, A>& p) {
    return std::make_pair(p.second, p.first);
  });
}

// Finite convex combination of point masses; weights must be nonnegative
// with sum at most 1.
template <class A>
GiryMeasure<A> g_from_weights(std::vector<std::pair<A, Rat>> atoms) {
  return GiryMeasure<A>([atoms = std::move(atoms)](const Observable<A>& f) {
    std::vector<std::pair<LowerRealNN, Rat>> vals;
    vals.reserve(atoms.size());
    for (const auto& aw : atoms) vals.emplace_back(f(aw.first), aw.second);
    return LowerRealNN::from_fn([vals](Fuel n) {
      Rat s(0);
      for (const auto& vw : vals) s += vw.second * vw.first.approx(n);
      return s;
    });
  });
}

// Restriction by an open condition: mass flows only once the condition has
// fired. Until then every integral reads 0, so a partial operation guarded
// this way denotes the sub-probability point mass it should. A guard that is
// already settled collapses away.
template <class A>
GiryMeasure<A> g_restrict(Sier s, const GiryMeasure<A>& m) {
  int k = s.known();
  if (k > 0) return m;
  if (k < 0) return g_bottom<A>();
  return GiryMeasure<A>([s = std::move(s), m](const Observable<A>& f) {
    LowerRealNN inner = m.integrate(f);
    return LowerRealNN::from_fn([s, inner](Fuel n) {
      return s.approx(n) ? inner.approx(n) : Rat(0);
    });
  });
}

// Least upper bound of an increasing chain, by dovetailing. Members are
// cached: the fuel loop revisits each of them once per read.
template <class A>
GiryMeasure<A> g_kleene_lub(std::function<GiryMeasure<A>(int)> chain) {
  struct Chain {
    std::function<GiryMeasure<A>(int)> mk;
    std::mutex mu;
    std::vector<GiryMeasure<A>> elems;
    GiryMeasure<A> at(int i) {
      std::lock_guard<std::mutex> lock(mu);
      while (static_cast<int>(elems.size()) <= i)
        elems.push_back(g_cached(mk(static_cast<int>(elems.size()))));
      return elems[i];
    }
  };
  auto ch = std::make_shared<Chain>();
  ch->mk = std::move(chain);
  return GiryMeasure<A>([ch](const Observable<A>& f) {
    return LowerRealNN::from_fn([ch, f](Fuel n) {
      Rat best(0);
      for (int i = 0; i <= n; ++i)
        best = rat_max(best, ch->at(i).integrate(f).approx(n));
      return best;
    });
  });
}

// The uniform distribution on (0,1): lower Riemann sums over the dyadic
// partition at level j, with the integrand read on each cell through its
// interval embedding. The cell reads lag two fuel steps behind the partition
// level; any read fuel keeps the sum a lower bound, and the lagged family is
// still cofinal, so the supremum is unchanged while deep rows get much
// cheaper. Levels are computed once and kept, and the running max makes the
// result monotone without assuming the level sums are.
inline GiryMeasure<RealNum> g_uniform01() {
  return GiryMeasure<RealNum>([](const Observable<RealNum>& f) {
    struct State {
      Observable<RealNum> f;
      std::mutex mu;
      std::vector<Rat> best;
      explicit State(Observable<RealNum> ff) : f(std::move(ff)) {}
      Rat get(Fuel k) {
        std::lock_guard<std::mutex> lock(mu);
        while (static_cast<Fuel>(best.size()) <= k) {
          Fuel j = static_cast<Fuel>(best.size());
          Fuel read = j >= 2 ? j - 2 : 0;
          Rat w = pow2(-j);
          Rat s(0);
          for (long i = 0; i < (1L << j); ++i) {
            RatInterval cell(Rat(i) * w, Rat(i + 1) * w);
            s += f(RealNum::from_interval(cell)).approx(read);
          }
          s *= w;
          best.push_back(best.empty() ? s : rat_max(best.back(), s));
        }
        return best[k];
      }
    };
    auto st = std::make_shared<State>(f);
    return LowerRealNN::from_fn([st](Fuel k) { return st->get(k); });
  });
}

}  // namespace lowr
