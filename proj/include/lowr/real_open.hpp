#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <vector>

#include "lowr/interval.hpp"
#include "lowr/lower_real.hpp"
#include "lowr/rat.hpp"

namespace lowr {

// A finite union of disjoint open rational intervals in canonical form:
// components sorted, a_i < b_i <= a_{i+1}. Touching components are kept
// separate (they are distinct components of the open set; their union is
// not an interval).
struct RatOpenSet {
  std::vector<std::pair<Rat, Rat>> comps;

  bool empty() const { return comps.empty(); }
  size_t size() const { return comps.size(); }
};

inline RatOpenSet ros_empty() { return {}; }

inline RatOpenSet ros_interval(const Rat& a, const Rat& b) {
  RatOpenSet r;
  if (a < b) r.comps.emplace_back(a, b);
  return r;
}

// Canonical form from an arbitrary finite list: drop empties, sort, merge
// strict overlaps. (b == next a stays two components.)
inline RatOpenSet ros_normalize(std::vector<std::pair<Rat, Rat>> ivs) {
  RatOpenSet r;
  ivs.erase(std::remove_if(ivs.begin(), ivs.end(),
                           [](const auto& p) { return !(p.first < p.second); }),
            ivs.end());
  std::sort(ivs.begin(), ivs.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  for (auto& iv : ivs) {
    if (!r.comps.empty() && iv.first < r.comps.back().second) {
      if (iv.second > r.comps.back().second)
        r.comps.back().second = iv.second;
    } else {
      r.comps.push_back(iv);
    }
  }
  return r;
}

inline RatOpenSet ros_union(const RatOpenSet& x, const RatOpenSet& y) {
  std::vector<std::pair<Rat, Rat>> all = x.comps;
  all.insert(all.end(), y.comps.begin(), y.comps.end());
  return ros_normalize(std::move(all));
}

inline RatOpenSet ros_inter(const RatOpenSet& x, const RatOpenSet& y) {
  std::vector<std::pair<Rat, Rat>> out;
  // Two-pointer sweep over the sorted component lists.
  size_t i = 0, j = 0;
  while (i < x.comps.size() && j < y.comps.size()) {
    const auto& a = x.comps[i];
    const auto& b = y.comps[j];
    Rat lo = rat_max(a.first, b.first);
    Rat hi = rat_min(a.second, b.second);
    if (lo < hi) out.emplace_back(lo, hi);
    if (a.second <= b.second)
      ++i;
    else
      ++j;
  }
  RatOpenSet r;
  r.comps = std::move(out);
  return r;
}

// The Lebesgue pre-valuation on the lattice of finite interval unions.
inline Rat lambda_raw(const RatOpenSet& x) {
  Rat s(0);
  for (const auto& c : x.comps) s += c.second - c.first;
  return s;
}

// Shrink every component by eps on both sides, dropping the ones that die.
// Canonical form is preserved.
inline RatOpenSet ros_shrink(const RatOpenSet& x, const Rat& eps) {
  RatOpenSet r;
  for (const auto& c : x.comps) {
    Rat a = c.first + eps, b = c.second - eps;
    if (a < b) r.comps.emplace_back(a, b);
  }
  return r;
}

// Point-set inclusion of canonical sets: every component fits inside one
// component of y.
inline bool ros_subset(const RatOpenSet& x, const RatOpenSet& y) {
  size_t j = 0;
  for (const auto& c : x.comps) {
    while (j < y.comps.size() && y.comps[j].second < c.second) ++j;
    if (j >= y.comps.size()) return false;
    if (!(y.comps[j].first <= c.first && c.second <= y.comps[j].second))
      return false;
  }
  return true;
}

inline bool ros_contains(const RatOpenSet& x, const Rat& q) {
  for (const auto& c : x.comps)
    if (c.first < q && q < c.second) return true;
  return false;
}

// Is the closed box [lo, hi] inside the open set? (Strict at both ends; a
// connected box must land in a single component.)
inline bool ros_contains_box(const RatOpenSet& x, const RatInterval& box) {
  for (const auto& c : x.comps)
    if (c.first < box.lo && box.hi < c.second) return true;
  return false;
}

// Is the open box (lo, hi) inside the open set?
inline bool ros_contains_open_box(const RatOpenSet& x, const Rat& lo,
                                  const Rat& hi) {
  if (!(lo < hi)) return true;
  for (const auto& c : x.comps)
    if (c.first <= lo && hi <= c.second) return true;
  return false;
}

// An open of the real line presented as a fuel-indexed increasing chain of
// finite interval unions; its points are the points of some stage.
class FormalOpen {
 public:
  // chain must be increasing under inclusion; memoized per fuel.
  static FormalOpen from_fn(std::function<RatOpenSet(Fuel)> chain) {
    FormalOpen f;
    f.impl_ = std::make_shared<Impl>();
    f.impl_->fn = std::move(chain);
    return f;
  }

  static FormalOpen from_set(const RatOpenSet& s) {
    return from_fn([s](Fuel) { return s; });
  }

  RatOpenSet approx(Fuel n) const {
    return impl_->cache.get(n, [this](Fuel m) { return impl_->fn(m); });
  }

 private:
  struct Impl {
    std::function<RatOpenSet(Fuel)> fn;
    detail::FuelCache<RatOpenSet> cache;
  };
  std::shared_ptr<Impl> impl_;
};

// Lebesgue measure of a formal open, as a lower real: the stages' values.
inline LowerRealNN fopen_lebesgue(const FormalOpen& u) {
  return LowerRealNN::from_fn([u](Fuel n) { return lambda_raw(u.approx(n)); });
}

}  // namespace lowr
