#include "lowr/interval.hpp"

#include <map>
#include <mutex>

namespace lowr {
namespace kernels {
namespace {

// Working precision adds guard bits beyond the requested error bound.
constexpr long kGuardBits = 8;

// Series for exp on [0, 1/2], directed. Terms are rounded toward the bound
// being computed so operand sizes stay near the working precision.
Rat exp_series_small(const Rat& r, long bits, bool lower) {
  assert(r >= 0 && r <= Rat(1, 2));
  Rat term(1), sum(0);
  long i = 0;
  // Tail of sum_{j>=N} r^j/j! is at most 2 * r^N/N! for r <= 1/2.
  while (term * 2 > pow2(-bits) || i < 2) {
    sum += lower ? dyadic_down(term, bits + 4) : dyadic_up(term, bits + 4);
    ++i;
    term = term * r / i;
    if (i > 200) break;
  }
  if (!lower) sum += dyadic_up(term * 2, bits + 4);
  return sum;
}

Rat exp_pos(const Rat& q, long prec_bits, bool lower) {
  assert(q >= 0);
  long k = 0;
  Rat r = q;
  while (r > Rat(1, 2)) {
    r /= 2;
    ++k;
  }
  // Squaring k times amplifies the relative error ~2^k, and the result is
  // about e^q; budget both into the working precision.
  long mag = 2;
  if (q > 1) mag += static_cast<long>(rat_ceil(q * 2).get_si());
  long bits = prec_bits + 2 * k + mag + kGuardBits;
  Rat v = exp_series_small(r, bits, lower);
  if (v < 0) v = 0;
  for (long j = 0; j < k; ++j) {
    v = v * v;
    v = lower ? dyadic_down(v, bits) : dyadic_up(v, bits);
  }
  return v;
}

// atanh-style series: log m = 2 * sum t^{2i+1}/(2i+1), t = (m-1)/(m+1).
// Requires |t| <= 1/3 + epsilon (m in roughly [1/2, 2]). The power
// recurrence is kept exact; only the accumulated copies are rounded, and the
// tail bound pads both directions (t may be negative for m slightly < 1).
Rat log_series(const Rat& t, long bits, bool lower) {
  Rat t2 = t * t;
  Rat pow = t, sum(0);
  long i = 0;
  Rat tail_factor(9, 4);  // 2/(1-t^2) <= 9/4 for |t| <= 1/3 + eps
  while (true) {
    Rat term = pow / (2 * i + 1);
    sum += lower ? dyadic_down(term, bits + 4) : dyadic_up(term, bits + 4);
    pow = pow * t2;
    ++i;
    if (rat_abs(pow) * tail_factor <= pow2(-bits) || i > 400) break;
  }
  Rat tail = dyadic_up(rat_abs(pow) * tail_factor, bits + 4);
  return lower ? Rat(2 * sum - tail) : Rat(2 * sum + tail);
}

struct Log2Bounds {
  Rat lo, hi;
};

Log2Bounds log2_bounds(long bits) {
  static std::mutex mu;
  static std::map<long, Log2Bounds> memo;
  std::lock_guard<std::mutex> lock(mu);
  auto it = memo.find(bits);
  if (it != memo.end()) return it->second;
  Log2Bounds b{log_series(Rat(1, 3), bits, true),
               log_series(Rat(1, 3), bits, false)};
  memo[bits] = b;
  return b;
}

Rat log_dir(const Rat& q, long prec_bits, bool lower) {
  assert(q > 0);
  long bits = prec_bits + kGuardBits;
  // q = m * 2^e with m in [1, 2).
  long e = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
  Rat m = q * pow2(-e);
  while (m >= 2) {
    m /= 2;
    ++e;
  }
  while (m < 1) {
    m *= 2;
    --e;
  }
  Rat m_d = lower ? dyadic_down(m, bits + 6) : dyadic_up(m, bits + 6);
  Rat t = (m_d - 1) / (m_d + 1);
  Rat s = log_series(t, bits, lower);
  Log2Bounds l2 = log2_bounds(bits);
  Rat shift = (e >= 0) == lower ? Rat(e) * l2.lo : Rat(e) * l2.hi;
  return s + shift;
}

// Taylor series for sin with an exact signed-term recurrence; the tail pads
// both directions, so no reliance on alternation.
Rat sin_dir(const Rat& q, long prec_bits, bool lower) {
  long bits = prec_bits + kGuardBits;
  Rat q2 = q * q;
  Rat term = q, sum(0);
  long i = 0;
  while (true) {
    sum += lower ? dyadic_down(term, bits + 4) : dyadic_up(term, bits + 4);
    ++i;
    term = -term * q2 / ((2 * i) * (2 * i + 1));
    // Stop once the term bounds the tail: (2i+2)(2i+3) >= 2 q^2 makes the
    // remaining terms decay at least geometrically with ratio 1/2.
    if (rat_abs(term) * 2 <= pow2(-bits) &&
        Rat((2 * i + 2) * (2 * i + 3)) >= 2 * q2)
      break;
    if (i > 400) break;
  }
  Rat rem = dyadic_up(rat_abs(term) * 2, bits + 4);
  return lower ? Rat(sum - rem) : Rat(sum + rem);
}

Rat sqrt_dir(const Rat& q, long prec_bits, bool lower) {
  assert(q >= 0);
  if (q == 0) return lower ? Rat(0) : pow2(-prec_bits);
  long b = prec_bits + 2;
  // X = floor(q * 4^b); isqrt gives s with s^2 <= X < (s+1)^2, hence
  // s/2^b <= sqrt(q) <= (s+1)/2^b.
  Int x = rat_floor(q * pow2(2 * b));
  Int s;
  mpz_sqrt(s.get_mpz_t(), x.get_mpz_t());
  return (lower ? Rat(s) : Rat(s + 1)) * pow2(-b);
}

}  // namespace

Rat exp_lower(const Rat& q, long prec_bits) {
  if (q >= 0) return exp_pos(q, prec_bits, true);
  Rat inv = exp_pos(-q, prec_bits + 2, false);
  return dyadic_down(1 / inv, prec_bits + 2);
}

Rat exp_upper(const Rat& q, long prec_bits) {
  if (q >= 0) return exp_pos(q, prec_bits, false);
  Rat inv = exp_pos(-q, prec_bits + 2, true);
  if (inv <= 0) return pow2(prec_bits);  // cannot happen for sound inputs
  return dyadic_up(1 / inv, prec_bits + 2);
}

Rat log_lower(const Rat& q, long prec_bits) { return log_dir(q, prec_bits, true); }
Rat log_upper(const Rat& q, long prec_bits) { return log_dir(q, prec_bits, false); }
Rat sin_lower(const Rat& q, long prec_bits) { return sin_dir(q, prec_bits, true); }
Rat sin_upper(const Rat& q, long prec_bits) { return sin_dir(q, prec_bits, false); }
Rat sqrt_lower(const Rat& q, long prec_bits) { return sqrt_dir(q, prec_bits, true); }
Rat sqrt_upper(const Rat& q, long prec_bits) { return sqrt_dir(q, prec_bits, false); }

}  // namespace kernels

namespace {

RatInterval whole_line(Fuel n) { return RatInterval(-pow2(n), pow2(n)); }

using BinOp = RatInterval (*)(const RatInterval&, const RatInterval&);

RealNum make_bin(const RealNum& x, const RealNum& y, BinOp op) {
  // Two constants fold to a constant; box scans live on this path.
  if (x.is_constant() && y.is_constant())
    return RealNum::from_interval(op(x.box(), y.box()));
  bool elem = x.has_elementary() || y.has_elementary();
  auto tight = [x, y, op](Fuel n) { return op(x.approx(n), y.approx(n)); };
  if (!elem) return RealNum::from_fn(tight);
  auto range = [x, y, op](Fuel n) { return op(x.range(n), y.range(n)); };
  return RealNum::from_fns(tight, range, true);
}

RatInterval div_iv(const RatInterval& x, const RatInterval& y, Fuel n) {
  if (y.contains_zero()) return whole_line(n);
  return iv_div_nonzero(x, y);
}

// Monotone-at-1 clamps for log: log b <= 0 when b <= 1 and log a >= 0 when
// a >= 1, exactly. This keeps sign questions about log answerable without
// running the series.
RatInterval log_clamp(RatInterval iv, const RatInterval& arg) {
  if (arg.hi <= 1 && iv.hi > 0) iv.hi = 0;
  if (arg.lo >= 1 && iv.lo < 0) iv.lo = 0;
  if (iv.lo > iv.hi) iv.lo = iv.hi;
  return iv;
}

RatInterval log_tight_iv(const RatInterval& arg, Fuel n) {
  if (arg.hi <= 0) return whole_line(n);
  if (arg.lo <= 0)
    return log_clamp(
        RatInterval(-pow2(n),
                    rat_max(-pow2(n), kernels::log_upper(arg.hi, n + 2))),
        arg);
  return log_clamp(RatInterval(kernels::log_lower(arg.lo, n + 2),
                               kernels::log_upper(arg.hi, n + 2)),
                   arg);
}

// O(1) rational bounds: 1 - 1/a <= log a <= a - 1.
RatInterval log_cheap_iv(const RatInterval& arg, Fuel n) {
  if (arg.hi <= 0) return whole_line(n);
  Rat hi = arg.hi - 1;
  Rat lo = arg.lo > 0 ? Rat(1 - 1 / arg.lo) : Rat(-pow2(n));
  if (lo < -pow2(n)) lo = -pow2(n);
  if (lo > hi) lo = hi;
  return log_clamp(RatInterval(lo, hi), arg);
}

RatInterval exp_tight_iv(const RatInterval& arg, Fuel n) {
  return RatInterval(kernels::exp_lower(arg.lo, n + 2),
                     kernels::exp_upper(arg.hi, n + 2));
}

// 1 + a <= e^a; e^b <= 1/(1-b) for b <= 0, e^b <= 4^ceil(b) for b > 0.
RatInterval exp_cheap_iv(const RatInterval& arg) {
  Rat lo = rat_max(Rat(0), Rat(1) + arg.lo);
  Rat hi;
  if (arg.hi <= 0)
    hi = Rat(1) / (Rat(1) - arg.hi);
  else
    hi = pow2(2 * static_cast<long>(rat_ceil(arg.hi).get_si()));
  if (hi < lo) hi = lo;
  return RatInterval(lo, hi);
}

RatInterval sin_tight_iv(const RatInterval& arg, Fuel n) {
  RatInterval unit(Rat(-1), Rat(1));
  if (rat_abs(arg.lo) > 8 || rat_abs(arg.hi) > 8) return unit;
  // |sin| is 1-Lipschitz: enclose via the midpoint value plus half-width.
  Rat m = arg.mid();
  Rat half = arg.width() / 2;
  Rat lo = kernels::sin_lower(m, n + 2) - half;
  Rat hi = kernels::sin_upper(m, n + 2) + half;
  return RatInterval(rat_max(lo, Rat(-1)), rat_min(hi, Rat(1)));
}

RatInterval sin_cheap_iv(const RatInterval& arg) {
  Rat m = rat_max(rat_abs(arg.lo), rat_abs(arg.hi));
  Rat bound = rat_min(Rat(1), m);
  return RatInterval(-bound, bound);
}

RatInterval sqrt_iv(const RatInterval& arg, Fuel n, long prec) {
  if (arg.hi < 0) return RatInterval(Rat(0), pow2(n));
  Rat hi = kernels::sqrt_upper(arg.hi, prec);
  Rat lo = arg.lo > 0 ? kernels::sqrt_lower(arg.lo, prec) : Rat(0);
  return RatInterval(lo, hi);
}

}  // namespace

RealNum real_add(const RealNum& x, const RealNum& y) {
  return make_bin(x, y, iv_add);
}
RealNum real_sub(const RealNum& x, const RealNum& y) {
  return make_bin(x, y, iv_sub);
}
RealNum real_mul(const RealNum& x, const RealNum& y) {
  return make_bin(x, y, iv_mul);
}

RealNum real_neg(const RealNum& x) {
  if (x.is_constant()) return RealNum::from_interval(iv_neg(x.box()));
  if (!x.has_elementary())
    return RealNum::from_fn([x](Fuel n) { return iv_neg(x.approx(n)); });
  return RealNum::from_fns([x](Fuel n) { return iv_neg(x.approx(n)); },
                           [x](Fuel n) { return iv_neg(x.range(n)); }, true);
}

RealNum real_div(const RealNum& x, const RealNum& y) {
  // Folding applies only once the divisor is separated from zero; a constant
  // straddling enclosure keeps the fuel-dependent whole-line fallback.
  if (x.is_constant() && y.is_constant() && !y.box().contains_zero())
    return RealNum::from_interval(iv_div_nonzero(x.box(), y.box()));
  bool elem = x.has_elementary() || y.has_elementary();
  auto tight = [x, y](Fuel n) { return div_iv(x.approx(n), y.approx(n), n); };
  if (!elem) return RealNum::from_fn(tight);
  auto range = [x, y](Fuel n) { return div_iv(x.range(n), y.range(n), n); };
  return RealNum::from_fns(tight, range, true);
}

RealNum real_exp(const RealNum& x) {
  return RealNum::from_fns(
      [x](Fuel n) {
        return iv_meet(exp_tight_iv(x.approx(n), n),
                       exp_cheap_iv(x.approx(n)));
      },
      [x](Fuel n) { return exp_cheap_iv(x.range(n)); }, true);
}

RealNum real_log(const RealNum& x) {
  return RealNum::from_fns(
      [x](Fuel n) { return log_tight_iv(x.approx(n), n); },
      [x](Fuel n) { return log_cheap_iv(x.range(n), n); }, true);
}

RealNum real_sin(const RealNum& x) {
  return RealNum::from_fns(
      [x](Fuel n) { return sin_tight_iv(x.approx(n), n); },
      [x](Fuel n) { return sin_cheap_iv(x.range(n)); }, true);
}

RealNum real_sqrt(const RealNum& x) {
  return RealNum::from_fns(
      [x](Fuel n) { return sqrt_iv(x.approx(n), n, n + 2); },
      [x](Fuel n) { return sqrt_iv(x.range(n), n, 8); }, true);
}

int lt_decide(const RealNum& x, const RealNum& y, Fuel n) {
  if (x.is_constant() && y.is_constant()) {
    if (x.box().hi < y.box().lo) return 1;
    if (y.box().hi < x.box().lo) return -1;
    return 0;
  }
  RatInterval a = x.range(n), b = y.range(n);
  if (a.hi < b.lo) return 1;
  if (b.hi < a.lo) return -1;
  if (x.has_elementary() || y.has_elementary()) {
    a = x.approx(n);
    b = y.approx(n);
    if (a.hi < b.lo) return 1;
    if (b.hi < a.lo) return -1;
  }
  return 0;
}

std::pair<Sier, Sier> real_lt(const RealNum& x, const RealNum& y) {
  // Two constant boxes decide (or fail to) identically at every fuel.
  if (x.is_constant() && y.is_constant()) {
    int d = lt_decide(x, y, 0);
    return {Sier::from_bool(d == 1), Sier::from_bool(d == -1)};
  }
  // Sticky: the division fallback makes raw enclosures non-nested, but a
  // separation once observed is a fact about the reals themselves.
  Sier s1 = sier_sticky([x, y](Fuel n) { return lt_decide(x, y, n) == 1; });
  Sier s2 = sier_sticky([x, y](Fuel n) { return lt_decide(x, y, n) == -1; });
  return {s1, s2};
}

Sier cert_pos_sier(const RealNum& x) {
  if (x.is_constant()) return Sier::from_bool(x.box().lo > 0);
  return sier_sticky([x](Fuel n) { return cert_pos(x, n); });
}
Sier cert_nonneg_sier(const RealNum& x) {
  if (x.is_constant()) return Sier::from_bool(x.box().lo >= 0);
  return sier_sticky([x](Fuel n) { return cert_nonneg(x, n); });
}
Sier cert_nonzero_sier(const RealNum& x) {
  if (x.is_constant()) return Sier::from_bool(!x.box().contains_zero());
  return sier_sticky([x](Fuel n) { return cert_nonzero(x, n); });
}

bool cert_pos(const RealNum& x, Fuel n) {
  if (x.range(n).lo > 0) return true;
  if (x.has_elementary() && x.approx(n).lo > 0) return true;
  return false;
}

bool cert_nonneg(const RealNum& x, Fuel n) {
  if (x.range(n).lo >= 0) return true;
  if (x.has_elementary() && x.approx(n).lo >= 0) return true;
  return false;
}

bool cert_nonzero(const RealNum& x, Fuel n) {
  if (!x.range(n).contains_zero()) return true;
  if (x.has_elementary() && !x.approx(n).contains_zero()) return true;
  return false;
}

RatInterval interval_extend(const std::function<RealNum(RealNum)>& f,
                            const RatInterval& box, Fuel n) {
  return f(RealNum::from_interval(box)).approx(n);
}

}  // namespace lowr
