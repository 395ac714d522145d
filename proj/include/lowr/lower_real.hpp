#pragma once

#include <cassert>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "lowr/rat.hpp"
#include "lowr/sier.hpp"

namespace lowr {

// A lower real: a monotone nondecreasing rational sequence, denoting its
// supremum (possibly +infinity). There is no subtraction; the order-theoretic
// operations below are everything the rest of the library needs.
class LowerReal {
 public:
  LowerReal() : LowerReal(Rat(0)) {}

  explicit LowerReal(Rat constant) : impl_(std::make_shared<Impl>()) {
    impl_->constant = true;
    impl_->value = std::move(constant);
  }

  // fn must be monotone nondecreasing in the fuel; memoized per fuel.
  static LowerReal from_fn(std::function<Rat(Fuel)> fn) {
    LowerReal r;
    r.impl_ = std::make_shared<Impl>();
    r.impl_->fn = std::move(fn);
    return r;
  }

  static LowerReal from_rat(const Rat& q) { return LowerReal(q); }

  Rat approx(Fuel n) const {
    if (impl_->constant) return impl_->value;
    return impl_->cache.get(n, [this](Fuel m) { return impl_->fn(m); });
  }

  bool is_constant() const { return impl_->constant; }

 private:
  struct Impl {
    bool constant = false;
    Rat value;
    std::function<Rat(Fuel)> fn;
    detail::FuelCache<Rat> cache;
  };
  std::shared_ptr<Impl> impl_;
};

inline LowerReal lr_from_rat(const Rat& q) { return LowerReal::from_rat(q); }

// Note the explicit return types on the arithmetic lambdas: gmp's expression
// templates would otherwise escape holding references to the temporaries.
inline LowerReal lr_add(const LowerReal& x, const LowerReal& y) {
  return LowerReal::from_fn(
      [x, y](Fuel n) -> Rat { return x.approx(n) + y.approx(n); });
}

inline LowerReal lr_max(const LowerReal& x, const LowerReal& y) {
  return LowerReal::from_fn(
      [x, y](Fuel n) { return rat_max(x.approx(n), y.approx(n)); });
}

inline LowerReal lr_min(const LowerReal& x, const LowerReal& y) {
  return LowerReal::from_fn(
      [x, y](Fuel n) { return rat_min(x.approx(n), y.approx(n)); });
}

// Countable join, dovetailed like sier_countable_join: fuel n takes the max
// of the first n+1 members, each read at fuel n.
inline LowerReal lr_countable_join(std::function<LowerReal(int)> family) {
  struct State {
    std::function<LowerReal(int)> family;
    std::mutex mu;
    std::vector<LowerReal> members;
    LowerReal member(int i) {
      std::lock_guard<std::mutex> lock(mu);
      while (static_cast<int>(members.size()) <= i)
        members.push_back(family(static_cast<int>(members.size())));
      return members[i];
    }
  };
  auto st = std::make_shared<State>();
  st->family = std::move(family);
  return LowerReal::from_fn([st](Fuel n) {
    Rat best = st->member(0).approx(n);
    for (int i = 1; i <= n; ++i) best = rat_max(best, st->member(i).approx(n));
    return best;
  });
}

// The open (q, +inf) applied to x: semi-decides q < x.
inline Sier lr_lt_rat(const Rat& q, const LowerReal& x) {
  return Sier::from_fn([q, x](Fuel n) { return q < x.approx(n); });
}

// A nonnegative lower real; the carrier of valuations and integrals.
class LowerRealNN {
 public:
  LowerRealNN() : lr_(Rat(0)) {}

  explicit LowerRealNN(Rat constant) : lr_(rat_max(Rat(0), constant)) {}

  static LowerRealNN from_rat(const Rat& q) { return LowerRealNN(q); }

  // Clamps at 0 pointwise, preserving monotonicity.
  static LowerRealNN clamp(const LowerReal& x) {
    if (x.is_constant()) return LowerRealNN(x.approx(0));
    LowerRealNN r;
    r.lr_ = LowerReal::from_fn(
        [x](Fuel n) { return rat_max(Rat(0), x.approx(n)); });
    return r;
  }

  // fn must already be nonnegative and monotone.
  static LowerRealNN from_fn(std::function<Rat(Fuel)> fn) {
    LowerRealNN r;
    r.lr_ = LowerReal::from_fn(std::move(fn));
    return r;
  }

  Rat approx(Fuel n) const { return lr_.approx(n); }
  const LowerReal& as_lower_real() const { return lr_; }

 private:
  LowerReal lr_;
};

inline LowerRealNN lrnn_add(const LowerRealNN& x, const LowerRealNN& y) {
  return LowerRealNN::from_fn(
      [x, y](Fuel n) -> Rat { return x.approx(n) + y.approx(n); });
}

inline LowerRealNN lrnn_max(const LowerRealNN& x, const LowerRealNN& y) {
  return LowerRealNN::from_fn(
      [x, y](Fuel n) { return rat_max(x.approx(n), y.approx(n)); });
}

inline LowerRealNN lrnn_min(const LowerRealNN& x, const LowerRealNN& y) {
  return LowerRealNN::from_fn(
      [x, y](Fuel n) { return rat_min(x.approx(n), y.approx(n)); });
}

// Multiplication, defined on the nonnegative cone (where it is monotone in
// both arguments).
inline LowerRealNN lrnn_mul(const LowerRealNN& x, const LowerRealNN& y) {
  return LowerRealNN::from_fn(
      [x, y](Fuel n) -> Rat { return x.approx(n) * y.approx(n); });
}

// Scaling by a nonnegative rational.
inline LowerRealNN lrnn_scale(const Rat& c, const LowerRealNN& x) {
  assert(c >= 0);
  return LowerRealNN::from_fn([c, x](Fuel n) -> Rat { return c * x.approx(n); });
}

inline LowerRealNN lrnn_countable_join(
    std::function<LowerRealNN(int)> family) {
  auto fam = std::make_shared<std::function<LowerRealNN(int)>>(
      std::move(family));
  LowerReal join = lr_countable_join(
      [fam](int i) { return (*fam)(i).as_lower_real(); });
  return LowerRealNN::from_fn([join](Fuel n) { return join.approx(n); });
}

inline Sier lrnn_lt_rat(const Rat& q, const LowerRealNN& x) {
  return lr_lt_rat(q, x.as_lower_real());
}

}  // namespace lowr
