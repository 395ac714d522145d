#pragma once

#include <cassert>
#include <functional>
#include <memory>
#include <utility>

#include "lowr/lower_real.hpp"
#include "lowr/rat.hpp"
#include "lowr/sier.hpp"

namespace lowr {

// Closed rational interval [lo, hi], lo <= hi.
struct RatInterval {
  Rat lo, hi;

  RatInterval() : lo(0), hi(0) {}
  RatInterval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
    assert(lo <= hi);
  }
  static RatInterval point(const Rat& q) { return RatInterval(q, q); }

  Rat width() const { return hi - lo; }
  Rat mid() const { return (lo + hi) / 2; }
  bool contains(const Rat& q) const { return lo <= q && q <= hi; }
  bool contains_zero() const { return lo <= 0 && 0 <= hi; }
};

inline RatInterval iv_add(const RatInterval& x, const RatInterval& y) {
  return RatInterval(x.lo + y.lo, x.hi + y.hi);
}

inline RatInterval iv_sub(const RatInterval& x, const RatInterval& y) {
  return RatInterval(x.lo - y.hi, x.hi - y.lo);
}

inline RatInterval iv_neg(const RatInterval& x) {
  return RatInterval(-x.hi, -x.lo);
}

inline RatInterval iv_mul(const RatInterval& x, const RatInterval& y) {
  Rat a = x.lo * y.lo, b = x.lo * y.hi, c = x.hi * y.lo, d = x.hi * y.hi;
  return RatInterval(rat_min(rat_min(a, b), rat_min(c, d)),
                     rat_max(rat_max(a, b), rat_max(c, d)));
}

// Quotient when the divisor is separated from zero; callers handle the
// straddling case (see real_div).
inline RatInterval iv_div_nonzero(const RatInterval& x, const RatInterval& y) {
  assert(!y.contains_zero());
  Rat a = x.lo / y.lo, b = x.lo / y.hi, c = x.hi / y.lo, d = x.hi / y.hi;
  return RatInterval(rat_min(rat_min(a, b), rat_min(c, d)),
                     rat_max(rat_max(a, b), rat_max(c, d)));
}

// Intersection of overlapping enclosures of one value.
inline RatInterval iv_meet(const RatInterval& x, const RatInterval& y) {
  Rat lo = rat_max(x.lo, y.lo), hi = rat_min(x.hi, y.hi);
  if (lo <= hi) return RatInterval(lo, hi);
  // Disjoint enclosures of the same value cannot happen for sound inputs;
  // degrade gracefully rather than crash in release builds.
  assert(false && "intersecting disjoint enclosures");
  return x;
}

inline bool iv_subset(const RatInterval& x, const RatInterval& y) {
  return y.lo <= x.lo && x.hi <= y.hi;
}

// A real number presented as a fuel-indexed shrinking interval sequence.
//
// Two evaluation channels:
//  - approx(n): the tight enclosure; elementary functions run their series
//    with slack <= 2^-n.
//  - range(n): a sound but possibly loose enclosure; elementary functions
//    use O(1) rational bounds. For series-free terms the channels coincide
//    (and share one cache).
//
// Comparisons and domain certificates consult range() first and only fall
// back to approx(); that keeps dyadic box scans series-free whenever the
// cheap bounds decide.
class RealNum {
 public:
  RealNum() : cval_(shared_zero()) {}

  static RealNum from_rat(const Rat& q) {
    return RealNum(RatInterval::point(q));
  }

  // A constant interval: the box-embedding used for interval extensions of
  // observables and open-set certificates. Constants carry only their box;
  // dyadic scans construct millions of them.
  static RealNum from_interval(const RatInterval& iv) { return RealNum(iv); }

  static RealNum from_fns(std::function<RatInterval(Fuel)> tight,
                          std::function<RatInterval(Fuel)> range,
                          bool has_elementary) {
    RealNum r(Dynamic{});
    r.impl_->tight = std::move(tight);
    r.impl_->range = std::move(range);
    r.impl_->has_elementary = has_elementary;
    return r;
  }

  static RealNum from_fn(std::function<RatInterval(Fuel)> tight) {
    RealNum r(Dynamic{});
    r.impl_->tight = std::move(tight);
    return r;
  }

  RatInterval approx(Fuel n) const {
    if (cval_) return *cval_;
    return impl_->tight_cache.get(n,
                                  [this](Fuel m) { return impl_->tight(m); });
  }

  RatInterval range(Fuel n) const {
    if (cval_) return *cval_;
    if (!impl_->has_elementary || !impl_->range) return approx(n);
    return impl_->range_cache.get(n,
                                  [this](Fuel m) { return impl_->range(m); });
  }

  bool has_elementary() const { return cval_ ? false : impl_->has_elementary; }
  bool is_constant() const { return cval_ != nullptr; }

  // The fixed enclosure of a constant, without the copy approx() makes.
  // Only meaningful when is_constant().
  const RatInterval& box() const {
    assert(cval_);
    return *cval_;
  }

 private:
  struct Impl {
    std::function<RatInterval(Fuel)> tight;
    std::function<RatInterval(Fuel)> range;
    bool has_elementary = false;
    detail::FuelCache<RatInterval> tight_cache;
    detail::FuelCache<RatInterval> range_cache;
  };
  struct Dynamic {};

  explicit RealNum(const RatInterval& iv)
      : cval_(std::make_shared<const RatInterval>(iv)) {}
  explicit RealNum(Dynamic) : impl_(std::make_shared<Impl>()) {}

  static const std::shared_ptr<const RatInterval>& shared_zero() {
    static const std::shared_ptr<const RatInterval> z =
        std::make_shared<const RatInterval>(RatInterval::point(Rat(0)));
    return z;
  }

  std::shared_ptr<const RatInterval> cval_;
  std::shared_ptr<Impl> impl_;
};

RealNum real_add(const RealNum& x, const RealNum& y);
RealNum real_sub(const RealNum& x, const RealNum& y);
RealNum real_neg(const RealNum& x);
RealNum real_mul(const RealNum& x, const RealNum& y);

// Quotient. While the divisor's enclosure straddles zero the result is the
// whole-line fallback [-2^n, 2^n] for that fuel; it is the caller's job (the
// Giry layer's guarded point masses) not to convert values before the
// divisor separates.
RealNum real_div(const RealNum& x, const RealNum& y);

RealNum real_exp(const RealNum& x);
RealNum real_log(const RealNum& x);
RealNum real_sin(const RealNum& x);
RealNum real_sqrt(const RealNum& x);

// Semi-decided strict comparison: +1 once x < y is certified at fuel n,
// -1 once y < x is certified, 0 while undecided. Monotone in n in the sense
// that a nonzero verdict never reverts.
int lt_decide(const RealNum& x, const RealNum& y, Fuel n);

// The pair of Sierpinski opens (x < y, y < x).
std::pair<Sier, Sier> real_lt(const RealNum& x, const RealNum& y);

// Domain certificates (cheap channel first, tight fallback).
bool cert_pos(const RealNum& x, Fuel n);      // 0 < x
bool cert_nonneg(const RealNum& x, Fuel n);   // 0 <= x
bool cert_nonzero(const RealNum& x, Fuel n);  // 0 outside the enclosure

// Monotone (sticky) forms of the certificates, for use as guards.
Sier cert_pos_sier(const RealNum& x);
Sier cert_nonneg_sier(const RealNum& x);
Sier cert_nonzero_sier(const RealNum& x);

// Interval extension of a real map: evaluate f at the box constant and read
// fuel n. Inclusion-isotone primitives make this a sound enclosure of the
// image of f over the box.
RatInterval interval_extend(const std::function<RealNum(RealNum)>& f,
                            const RatInterval& box, Fuel n);

// Directed point kernels for the elementary functions, exposed for oracle
// tests: each returns a bound with error at most 2^-prec_bits.
namespace kernels {
Rat exp_lower(const Rat& q, long prec_bits);
Rat exp_upper(const Rat& q, long prec_bits);
Rat log_lower(const Rat& q, long prec_bits);  // requires q > 0
Rat log_upper(const Rat& q, long prec_bits);  // requires q > 0
Rat sin_lower(const Rat& q, long prec_bits);
Rat sin_upper(const Rat& q, long prec_bits);
Rat sqrt_lower(const Rat& q, long prec_bits);  // requires q >= 0
Rat sqrt_upper(const Rat& q, long prec_bits);  // requires q >= 0
}  // namespace kernels

}  // namespace lowr
