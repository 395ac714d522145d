#pragma once

#include <functional>
#include <memory>

#include "lowr/interval.hpp"
#include "lowr/lower_real.hpp"
#include "lowr/real_open.hpp"
#include "lowr/sier.hpp"

namespace lowr {

// A lower-semicontinuous nonnegative function on the carrier A. Its interval
// extension over a box is obtained by applying it to a box-constant point
// (see RealNum::from_interval); evaluation only ever uses sound interval
// primitives, so the result is a true lower bound over the box.
//
// The wrapped function has a stable identity (id()) used by measures to
// memoize integration.
template <class A>
class Observable {
 public:
  using Fn = std::function<LowerRealNN(const A&)>;

  explicit Observable(Fn f) : fn_(std::make_shared<Fn>(std::move(f))) {}

  static Observable constant(const Rat& q) {
    return Observable([q](const A&) { return LowerRealNN::from_rat(q); });
  }

  LowerRealNN operator()(const A& a) const { return (*fn_)(a); }
  const void* id() const { return fn_.get(); }

 private:
  std::shared_ptr<Fn> fn_;
};

// An open subset of the carrier: a Sierpinski-valued membership map, plus a
// box certificate used by dyadic scans. The default certificate evaluates
// membership at the box constant, which certifies the whole (closed) box.
template <class A>
class OpenSet {
 public:
  using MemberFn = std::function<Sier(const A&)>;
  using BoxCertFn = std::function<bool(const RatInterval&, Fuel)>;

  explicit OpenSet(MemberFn member) : OpenSet(std::move(member), nullptr) {}

  OpenSet(MemberFn member, BoxCertFn box_cert)
      : member_(std::make_shared<MemberFn>(std::move(member))),
        box_cert_(std::move(box_cert)) {}

  Sier member(const A& a) const { return (*member_)(a); }

  const void* id() const { return member_.get(); }

  bool box_cert(const RatInterval& box, Fuel n) const {
    if (box_cert_) return box_cert_(box, n);
    if constexpr (std::is_same_v<A, RealNum>) {
      return member(RealNum::from_interval(box)).approx(n);
    } else {
      return false;
    }
  }

 private:
  std::shared_ptr<MemberFn> member_;
  BoxCertFn box_cert_;
};

// The open set of a finite interval union (exact certificates).
inline OpenSet<RealNum> open_from_ros(const RatOpenSet& s) {
  return OpenSet<RealNum>(
      [s](const RealNum& x) {
        return Sier::from_fn([s, x](Fuel n) {
          if (ros_contains_box(s, x.range(n))) return true;
          if (x.has_elementary() && ros_contains_box(s, x.approx(n)))
            return true;
          return false;
        });
      },
      [s](const RatInterval& box, Fuel) { return ros_contains_box(s, box); });
}

// The superlevel open [f > q] of an observable.
template <class A>
OpenSet<A> open_superlevel(const Observable<A>& f, const Rat& q) {
  if constexpr (std::is_same_v<A, RealNum>) {
    return OpenSet<RealNum>(
        [f, q](const RealNum& x) { return lrnn_lt_rat(q, f(x)); },
        [f, q](const RatInterval& box, Fuel n) {
          return q < f(RealNum::from_interval(box)).approx(n);
        });
  } else {
    return OpenSet<A>([f, q](const A& a) { return lrnn_lt_rat(q, f(a)); });
  }
}

// The indicator observable of an open set: 0 until membership fires, then 1.
template <class A>
Observable<A> indicator(const OpenSet<A>& u) {
  return Observable<A>([u](const A& a) {
    Sier s = u.member(a);
    return LowerRealNN::from_fn(
        [s](Fuel n) { return s.approx(n) ? Rat(1) : Rat(0); });
  });
}

// Pointwise product f * 1_U (restriction of an observable to an open).
template <class A>
Observable<A> obs_restrict(const Observable<A>& f, const OpenSet<A>& u) {
  return Observable<A>([f, u](const A& a) {
    Sier s = u.member(a);
    LowerRealNN v = f(a);
    return LowerRealNN::from_fn(
        [s, v](Fuel n) { return s.approx(n) ? v.approx(n) : Rat(0); });
  });
}

}  // namespace lowr
