#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

namespace lowr {

// Exact rational scalar. All numeric state in the library is a Rat; there is
// no floating point on any evaluation path.
using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat_int(long n) { return Rat(n); }

// 2^k for k possibly negative.
inline Rat pow2(long k) {
  Rat r;
  if (k >= 0) {
    mpz_ui_pow_ui(r.get_num_mpz_t(), 2u, static_cast<unsigned long>(k));
  } else {
    r = 1;
    mpz_ui_pow_ui(r.get_den_mpz_t(), 2u, static_cast<unsigned long>(-k));
  }
  return r;
}

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

inline Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }

// floor(q) as an integer.
inline Int rat_floor(const Rat& q) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline Int rat_ceil(const Rat& q) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

// Directed dyadic rounding: largest multiple of 2^-bits <= q (resp. smallest
// >= q). Used inside elementary-function kernels to cap operand growth; the
// rounding direction keeps every enclosure sound.
inline Rat dyadic_down(const Rat& q, long bits) {
  Rat scaled = q * pow2(bits);
  return Rat(rat_floor(scaled)) * pow2(-bits);
}

inline Rat dyadic_up(const Rat& q, long bits) {
  Rat scaled = q * pow2(bits);
  return Rat(rat_ceil(scaled)) * pow2(-bits);
}

// Canonical decimal-free serialization: "p/q", or "p" when q = 1.
inline std::string rat_str(const Rat& q) {
  Rat c(q);
  c.canonicalize();
  return c.get_str();
}

// mpq has no unsigned long long constructor; route through unsigned long
// (64-bit on every supported target).
inline Rat rat_from_u64(unsigned long long v) {
  return Rat(static_cast<unsigned long>(v));
}

// Parse "p", "p/q", or a decimal "a.b" into an exact rational.
inline std::optional<Rat> rat_parse(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto dot = s.find('.');
  try {
    if (dot != std::string::npos) {
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      if (digits.empty() || digits == "-" || digits == "+") return std::nullopt;
      Int num(digits, 10);
      Int den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10u,
                    static_cast<unsigned long>(s.size() - dot - 1));
      Rat r(num, den);
      r.canonicalize();
      return r;
    }
    Rat r(s, 10);
    r.canonicalize();
    if (r.get_den() == 0) return std::nullopt;
    return r;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

}  // namespace lowr
