#include "doctest.h"
#include "lowr/interval.hpp"

using namespace lowr;

namespace {

// Two-sided decimal brackets for the reference constants, 20 digits each.
const char* kELo = "2.71828182845904523536";
const char* kEHi = "2.71828182845904523537";
const char* kExp3Lo = "20.08553692318766774092";
const char* kExp3Hi = "20.08553692318766774093";
const char* kExpM1Lo = "0.36787944117144232159";
const char* kExpM1Hi = "0.36787944117144232160";
const char* kLn2Lo = "0.69314718055994530941";
const char* kLn2Hi = "0.69314718055994530942";
const char* kLn3Lo = "1.09861228866810969139";
const char* kLn3Hi = "1.09861228866810969140";
const char* kSin1Lo = "0.84147098480789650665";
const char* kSin1Hi = "0.84147098480789650666";
const char* kSqrt2Lo = "1.41421356237309504880";
const char* kSqrt2Hi = "1.41421356237309504881";

Rat dec(const char* s) { return *rat_parse(s); }

// The kernel pair brackets the reference value and is tight to prec_bits.
void check_kernel(Rat lo, Rat hi, const char* ref_lo, const char* ref_hi,
                  long prec_bits) {
  CHECK(lo <= hi);
  CHECK(lo <= dec(ref_hi));
  CHECK(hi >= dec(ref_lo));
  CHECK(hi - lo <= pow2(1 - prec_bits));
}

}  // namespace

TEST_CASE("rational interval arithmetic") {
  RatInterval a(Rat(1), Rat(2)), b(Rat(-3), Rat(4));
  CHECK(iv_add(a, b).lo == Rat(-2));
  CHECK(iv_add(a, b).hi == Rat(6));
  CHECK(iv_sub(a, b).lo == Rat(-3));
  CHECK(iv_sub(a, b).hi == Rat(5));
  CHECK(iv_mul(a, b).lo == Rat(-6));
  CHECK(iv_mul(a, b).hi == Rat(8));
  CHECK(iv_neg(a).lo == Rat(-2));

  RatInterval c(Rat(1) / 2, Rat(1));
  CHECK(iv_div_nonzero(a, c).lo == Rat(1));
  CHECK(iv_div_nonzero(a, c).hi == Rat(4));

  CHECK(iv_subset(RatInterval(Rat(1), Rat(3) / 2), a));
  CHECK_FALSE(iv_subset(b, a));
  CHECK(b.contains_zero());
  CHECK_FALSE(a.contains_zero());
  CHECK(iv_meet(a, b).lo == Rat(1));
  CHECK(iv_meet(a, b).hi == Rat(2));
}

TEST_CASE("exp kernel against reference digits") {
  check_kernel(kernels::exp_lower(Rat(1), 30), kernels::exp_upper(Rat(1), 30),
               kELo, kEHi, 30);
  check_kernel(kernels::exp_lower(Rat(3), 30), kernels::exp_upper(Rat(3), 30),
               kExp3Lo, kExp3Hi, 30);
  check_kernel(kernels::exp_lower(Rat(-1), 30), kernels::exp_upper(Rat(-1), 30),
               kExpM1Lo, kExpM1Hi, 30);
  // exp(0) = 1 exactly bracketed.
  CHECK(kernels::exp_lower(Rat(0), 20) <= Rat(1));
  CHECK(kernels::exp_upper(Rat(0), 20) >= Rat(1));
}

TEST_CASE("log kernel against reference digits") {
  check_kernel(kernels::log_lower(Rat(2), 30), kernels::log_upper(Rat(2), 30),
               kLn2Lo, kLn2Hi, 30);
  check_kernel(kernels::log_lower(Rat(3), 30), kernels::log_upper(Rat(3), 30),
               kLn3Lo, kLn3Hi, 30);
  CHECK(kernels::log_lower(Rat(1), 24) <= Rat(0));
  CHECK(kernels::log_upper(Rat(1), 24) >= Rat(0));
  // log(1/2) = -log 2.
  CHECK(kernels::log_upper(Rat(1) / 2, 30) >= -dec(kLn2Hi));
  CHECK(kernels::log_lower(Rat(1) / 2, 30) <= -dec(kLn2Lo));
}

TEST_CASE("sin kernel against reference digits") {
  check_kernel(kernels::sin_lower(Rat(1), 30), kernels::sin_upper(Rat(1), 30),
               kSin1Lo, kSin1Hi, 30);
  CHECK(kernels::sin_lower(Rat(0), 20) <= Rat(0));
  CHECK(kernels::sin_upper(Rat(0), 20) >= Rat(0));
  // Odd symmetry.
  CHECK(kernels::sin_upper(Rat(-1), 30) >= -dec(kSin1Hi));
  CHECK(kernels::sin_lower(Rat(-1), 30) <= -dec(kSin1Lo));
}

TEST_CASE("sqrt kernel squares back around its argument") {
  check_kernel(kernels::sqrt_lower(Rat(2), 30), kernels::sqrt_upper(Rat(2), 30),
               kSqrt2Lo, kSqrt2Hi, 30);
  for (Rat q : std::vector<Rat>{Rat(2), Rat(5) / 7, Rat(1000)}) {
    Rat lo = kernels::sqrt_lower(q, 40), hi = kernels::sqrt_upper(q, 40);
    CHECK(lo * lo <= q);
    CHECK(hi * hi >= q);
  }
  CHECK(kernels::sqrt_lower(Rat(4), 30) <= Rat(2));
  CHECK(kernels::sqrt_upper(Rat(4), 30) >= Rat(2));
}

TEST_CASE("rational points are exact constants") {
  RealNum x = RealNum::from_rat(Rat(3) / 7);
  CHECK(x.is_constant());
  CHECK(x.approx(0).lo == Rat(3) / 7);
  CHECK(x.approx(0).hi == Rat(3) / 7);
  CHECK(x.approx(19).lo == Rat(3) / 7);

  RealNum z;  // default is the point 0
  CHECK(z.is_constant());
  CHECK(z.box().lo == Rat(0));
  CHECK(z.box().hi == Rat(0));
}

TEST_CASE("arithmetic on constants folds to exact constants") {
  RealNum a = RealNum::from_rat(Rat(3) / 7);
  RealNum b = RealNum::from_rat(Rat(2) / 5);
  RealNum s = real_add(a, b);
  CHECK(s.is_constant());
  CHECK(s.box().lo == Rat(29) / 35);
  CHECK(s.box().hi == Rat(29) / 35);
  CHECK(real_sub(a, b).box().lo == Rat(1) / 35);
  CHECK(real_mul(a, b).box().lo == Rat(6) / 35);
  CHECK(real_neg(a).box().hi == -Rat(3) / 7);

  RealNum q = real_div(RealNum::from_rat(Rat(1) / 3),
                       RealNum::from_rat(Rat(2) / 5));
  CHECK(q.is_constant());
  CHECK(q.box().lo == Rat(5) / 6);

  RealNum box = real_mul(RealNum::from_interval(RatInterval(Rat(1), Rat(2))),
                         RealNum::from_interval(RatInterval(Rat(1), Rat(2))));
  CHECK(box.is_constant());
  CHECK(box.box().lo == Rat(1));
  CHECK(box.box().hi == Rat(4));
}

TEST_CASE("division by an enclosure straddling zero falls back to wide boxes") {
  RealNum y = RealNum::from_interval(RatInterval(Rat(-1), Rat(1)));
  RealNum q = real_div(RealNum::from_rat(Rat(1)), y);
  CHECK_FALSE(q.is_constant());
  CHECK(q.approx(0).lo == Rat(-1));
  CHECK(q.approx(0).hi == Rat(1));
  CHECK(q.approx(3).lo == Rat(-8));
  CHECK(q.approx(3).hi == Rat(8));
}

TEST_CASE("division recovers once the divisor separates from zero") {
  RealNum y = RealNum::from_fn([](Fuel n) {
    return n < 5 ? RatInterval(Rat(-1), Rat(1))
                 : RatInterval(Rat(1) / 2, Rat(1));
  });
  RealNum q = real_div(RealNum::from_rat(Rat(1)), y);
  CHECK(q.approx(4).hi == Rat(16));
  CHECK(q.approx(6).lo == Rat(1));
  CHECK(q.approx(6).hi == Rat(2));
}

TEST_CASE("total operations act by interval arithmetic at each fuel") {
  RealNum x = RealNum::from_fn([](Fuel n) {
    return RatInterval(Rat(1) - pow2(-n), Rat(1) + pow2(-n));
  });
  RealNum y = RealNum::from_rat(Rat(2));
  RealNum s = real_add(x, y);
  CHECK_FALSE(s.is_constant());
  CHECK(s.approx(4).lo == Rat(3) - Rat(1) / 16);
  CHECK(s.approx(4).hi == Rat(3) + Rat(1) / 16);
  RealNum p = real_mul(x, x);
  CHECK(p.approx(2).lo == Rat(9) / 16);
  CHECK(p.approx(2).hi == Rat(25) / 16);
}

TEST_CASE("elementary enclosures on points tighten with fuel") {
  RealNum e = real_exp(RealNum::from_rat(Rat(1)));
  for (Fuel n : {4, 8, 12}) {
    RatInterval iv = e.approx(n);
    CHECK(iv.lo <= dec(kEHi));
    CHECK(iv.hi >= dec(kELo));
    CHECK(iv.width() <= pow2(-n));
  }
  CHECK(e.has_elementary());

  RealNum r = real_sqrt(RealNum::from_rat(Rat(2)));
  RatInterval iv = r.approx(10);
  CHECK(iv.lo <= dec(kSqrt2Hi));
  CHECK(iv.hi >= dec(kSqrt2Lo));
  CHECK(iv.width() <= pow2(-10));

  RealNum s = real_sin(RealNum::from_rat(Rat(1)));
  CHECK(s.approx(10).lo <= dec(kSin1Hi));
  CHECK(s.approx(10).hi >= dec(kSin1Lo));
}

TEST_CASE("compositions stay sound and shrink") {
  // log(exp 1) encloses 1.
  RealNum x = real_log(real_exp(RealNum::from_rat(Rat(1))));
  RatInterval iv = x.approx(10);
  CHECK(iv.contains(Rat(1)));
  CHECK(iv.width() <= pow2(-6));
  CHECK(x.approx(12).width() < x.approx(4).width());

  // sqrt(2)^2 encloses 2.
  RealNum t = real_sqrt(RealNum::from_rat(Rat(2)));
  RealNum sq = real_mul(t, t);
  CHECK(sq.approx(10).contains(Rat(2)));
  CHECK(sq.approx(10).width() <= pow2(-6));

  // exp(1) * exp(-1) encloses 1.
  RealNum prod = real_mul(real_exp(RealNum::from_rat(Rat(1))),
                          real_exp(RealNum::from_rat(Rat(-1))));
  CHECK(prod.approx(10).contains(Rat(1)));
}

TEST_CASE("range channel gives cheap finite bounds for elementary values") {
  RealNum e10 = real_exp(RealNum::from_rat(Rat(10)));
  RatInterval cheap = e10.range(0);
  CHECK(cheap.lo >= Rat(0));
  CHECK(cheap.hi >= Rat(22026));  // e^10 = 22026.46...
  RatInterval tight = e10.approx(6);
  CHECK(tight.lo >= Rat(22026));
  CHECK(tight.hi <= Rat(22027));
  // Without an elementary subterm the two channels coincide.
  RealNum plain = real_add(RealNum::from_rat(Rat(1)), RealNum::from_rat(Rat(2)));
  CHECK_FALSE(plain.has_elementary());
  CHECK(plain.range(0).lo == plain.approx(0).lo);
}

TEST_CASE("comparison decides constants immediately") {
  RealNum a = RealNum::from_rat(Rat(1) / 3), b = RealNum::from_rat(Rat(1) / 2);
  CHECK(lt_decide(a, b, 0) == 1);
  CHECK(lt_decide(b, a, 0) == -1);
  CHECK(lt_decide(a, a, 12) == 0);  // equal points stay undecided forever

  auto [lt, gt] = real_lt(a, b);
  CHECK(lt.known() == 1);
  CHECK(gt.known() == -1);
  auto [dlt, dgt] = real_lt(a, a);
  CHECK(dlt.known() == -1);
  CHECK(dgt.known() == -1);
}

TEST_CASE("comparison of shrinking enclosures fires at the separating fuel") {
  RealNum x = RealNum::from_fn(
      [](Fuel n) { return RatInterval(-pow2(-n), pow2(-n)); });
  RealNum y = RealNum::from_fn([](Fuel n) {
    return RatInterval(Rat(1) / 8 - pow2(-n), Rat(1) / 8 + pow2(-n));
  });
  // Separation needs 2^-n < 1/16, first true at n = 5.
  CHECK(lt_decide(x, y, 4) == 0);
  CHECK(lt_decide(x, y, 5) == 1);
  CHECK(lt_decide(y, x, 5) == -1);

  auto [lt, gt] = real_lt(x, y);
  CHECK_FALSE(lt.approx(4));
  CHECK(lt.approx(5));
  CHECK(lt.approx(9));
  CHECK_FALSE(gt.approx(9));
}

TEST_CASE("comparison verdicts are sticky across non-nested enclosures") {
  // The enclosure is decisive only at fuel 3; later fuels widen again, the
  // way a quotient's fallback can. The open must hold once fired.
  auto flicker = [](Fuel n) {
    return n == 3 ? RatInterval(Rat(-1) / 4, Rat(-1) / 8)
                  : RatInterval(Rat(-1), Rat(1));
  };
  RealNum x = RealNum::from_fns(flicker, flicker, true);
  auto [lt, gt] = real_lt(x, RealNum::from_rat(Rat(0)));
  CHECK_FALSE(lt.approx(2));
  CHECK(lt.approx(3));
  CHECK(lt.approx(4));
  CHECK(lt.approx(7));
  CHECK_FALSE(gt.approx(7));
}

TEST_CASE("domain certificates on constants settle to known opens") {
  CHECK(cert_pos_sier(RealNum::from_rat(Rat(1) / 2)).known() == 1);
  CHECK(cert_pos_sier(RealNum::from_rat(Rat(0))).known() == -1);
  CHECK(cert_nonneg_sier(RealNum::from_rat(Rat(0))).known() == 1);
  CHECK(cert_nonneg_sier(RealNum::from_rat(Rat(-1))).known() == -1);
  CHECK(cert_nonzero_sier(RealNum::from_rat(Rat(-3))).known() == 1);
  CHECK(cert_nonzero_sier(
            RealNum::from_interval(RatInterval(Rat(-1), Rat(2)))).known() ==
        -1);
}

TEST_CASE("domain certificates fire once the enclosure separates") {
  RealNum x = RealNum::from_fn([](Fuel n) {
    return RatInterval(Rat(1) / 8 - pow2(-n), Rat(1) / 8 + pow2(-n));
  });
  CHECK_FALSE(cert_pos(x, 3));  // lo = 0 at fuel 3
  CHECK(cert_pos(x, 4));
  CHECK(cert_nonneg(x, 3));
  CHECK(cert_nonzero(x, 4));
  CHECK_FALSE(cert_nonzero(x, 3));

  Sier s = cert_pos_sier(x);
  CHECK(s.known() == 0);
  CHECK_FALSE(s.approx(3));
  CHECK(s.approx(4));
  CHECK(s.approx(11));
}

TEST_CASE("interval extension evaluates over box constants") {
  auto square = [](RealNum v) { return real_mul(v, v); };
  RatInterval img = interval_extend(square, RatInterval(Rat(1), Rat(2)), 0);
  CHECK(img.lo == Rat(1));
  CHECK(img.hi == Rat(4));

  auto affine = [](RealNum v) {
    return real_add(real_mul(RealNum::from_rat(Rat(2)), v),
                    RealNum::from_rat(Rat(-1)));
  };
  RatInterval img2 = interval_extend(affine, RatInterval(Rat(0), Rat(1)), 0);
  CHECK(img2.lo == Rat(-1));
  CHECK(img2.hi == Rat(1));
}
