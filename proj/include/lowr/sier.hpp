#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace lowr {

// Approximation index. Everything observable in the library is a monotone
// function of one fuel parameter.
using Fuel = int;

namespace detail {

template <class V>
class FuelCache {
 public:
  template <class F>
  V get(Fuel n, F&& compute) const {
    if (n < 0) n = 0;
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (static_cast<size_t>(n) < memo_.size() && memo_[n]) return *memo_[n];
    }
    V v = compute(n);
    std::lock_guard<std::mutex> lock(mu_);
    if (memo_.size() <= static_cast<size_t>(n)) memo_.resize(n + 1);
    if (!memo_[n]) memo_[n] = std::move(v);
    return *memo_[n];
  }

 private:
  mutable std::mutex mu_;
  mutable std::vector<std::optional<V>> memo_;
};

}  // namespace detail

// A point of the Sierpinski space: a semi-decidable truth value, realized as
// a monotone boolean sequence. Once approx(n) is true it stays true; the
// value of the point is "true at some fuel" vs "false forever".
class Sier {
 public:
  Sier() : Sier(false) {}

  static Sier top() { return Sier(true); }
  static Sier bot() { return Sier(false); }

  // True from fuel k onwards.
  static Sier from_fuel(Fuel k) {
    return Sier([k](Fuel n) { return n >= k; });
  }

  static Sier from_bool(bool b) { return Sier(b); }

  // fn must be monotone in the fuel; it is memoized per fuel.
  static Sier from_fn(std::function<bool(Fuel)> fn) {
    return Sier(std::move(fn));
  }

  bool approx(Fuel n) const {
    if (impl_->constant) return impl_->value;
    return impl_->cache.get(n, [this](Fuel m) { return impl_->fn(m); });
  }

  // +1 for a constant top, -1 for a constant bottom, 0 when fuel-dependent.
  // Lets combinators drop guards that are already settled.
  int known() const {
    if (!impl_->constant) return 0;
    return impl_->value ? 1 : -1;
  }

 private:
  struct Impl {
    bool constant = false;
    bool value = false;
    std::function<bool(Fuel)> fn;
    detail::FuelCache<bool> cache;
  };

  explicit Sier(bool constant_value) : impl_(std::make_shared<Impl>()) {
    impl_->constant = true;
    impl_->value = constant_value;
  }
  explicit Sier(std::function<bool(Fuel)> fn)
      : impl_(std::make_shared<Impl>()) {
    impl_->fn = std::move(fn);
  }

  std::shared_ptr<Impl> impl_;
};

inline Sier sier_meet(const Sier& a, const Sier& b) {
  return Sier::from_fn([a, b](Fuel n) { return a.approx(n) && b.approx(n); });
}

inline Sier sier_join(const Sier& a, const Sier& b) {
  return Sier::from_fn([a, b](Fuel n) { return a.approx(n) || b.approx(n); });
}

// Countable join, dovetailed: at fuel n, the first n+1 members are each given
// fuel n. The family is instantiated lazily and each member only once.
inline Sier sier_countable_join(std::function<Sier(int)> family) {
  struct State {
    std::function<Sier(int)> family;
    std::mutex mu;
    std::vector<Sier> members;
    Sier member(int i) {
      std::lock_guard<std::mutex> lock(mu);
      while (static_cast<int>(members.size()) <= i)
        members.push_back(family(static_cast<int>(members.size())));
      return members[i];
    }
  };
  auto st = std::make_shared<State>();
  st->family = std::move(family);
  return Sier::from_fn([st](Fuel n) {
    for (int i = 0; i <= n; ++i)
      if (st->member(i).approx(n)) return true;
    return false;
  });
}

// Monotone closure of a raw certificate: fires at n once raw has held at any
// fuel <= n. Sound whenever raw(m) = true witnesses a permanent fact, which
// is the case for every interval certificate (an enclosure that separates
// proves the separation outright; looser later enclosures cannot retract it).
inline Sier sier_sticky(std::function<bool(Fuel)> raw) {
  struct State {
    std::function<bool(Fuel)> raw;
    std::mutex mu;
    Fuel next = 0;
    Fuel fired = -1;
  };
  auto st = std::make_shared<State>();
  st->raw = std::move(raw);
  return Sier::from_fn([st](Fuel n) {
    std::lock_guard<std::mutex> lock(st->mu);
    if (st->fired >= 0) return st->fired <= n;
    while (st->next <= n) {
      if (st->raw(st->next)) {
        st->fired = st->next;
        return true;
      }
      ++st->next;
    }
    return false;
  });
}

// Dominance: the open guarded by s. The thunk is forced at most once, and
// only after s has fired; guard(s, k).approx(n) = s.approx(n) && k().approx(n).
inline Sier sier_guard(const Sier& s, std::function<Sier()> thunk) {
  struct State {
    std::function<Sier()> thunk;
    std::once_flag once;
    std::optional<Sier> forced;
    Sier force() {
      std::call_once(once, [this] { forced = thunk(); });
      return *forced;
    }
  };
  auto st = std::make_shared<State>();
  st->thunk = std::move(thunk);
  return Sier::from_fn([s, st](Fuel n) {
    if (!s.approx(n)) return false;
    return st->force().approx(n);
  });
}

}  // namespace lowr
