#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "lowr/giry.hpp"
#include "lowr/interval.hpp"

namespace lowr::rml {

class Val;
struct Closure;

// Semantic values: naturals, booleans, reals, unit, pairs, and closures
// (functions into the monad).
class Val {
 public:
  enum class Tag { Nat, Bool, Real, Unit, Pair, Fun };

  static Val nat(unsigned long long n) { return Val(n); }
  static Val boolean(bool b) { return Val(b); }
  static Val real(RealNum r) { return Val(std::move(r)); }
  static Val unit() { return Val(std::monostate{}); }
  static Val pair(Val a, Val b) {
    return Val(std::make_shared<const std::pair<Val, Val>>(std::move(a),
                                                           std::move(b)));
  }
  static Val fun(std::shared_ptr<Closure> c) { return Val(std::move(c)); }

  Tag tag() const { return static_cast<Tag>(v_.index()); }

  unsigned long long as_nat() const { return std::get<0>(v_); }
  bool as_bool() const { return std::get<1>(v_); }
  const RealNum& as_real() const { return std::get<2>(v_); }
  const std::pair<Val, Val>& as_pair() const { return *std::get<4>(v_); }
  const std::shared_ptr<Closure>& as_fun() const { return std::get<5>(v_); }

 private:
  using Rep = std::variant<unsigned long long, bool, RealNum, std::monostate,
                           std::shared_ptr<const std::pair<Val, Val>>,
                           std::shared_ptr<Closure>>;
  explicit Val(Rep v) : v_(std::move(v)) {}
  Rep v_;
};

// A discrete value admits a stable key; reals and functions do not, and
// applications at such arguments are simply not memoized.
inline std::optional<std::string> ground_key(const Val& v) {
  switch (v.tag()) {
    case Val::Tag::Nat: return "n" + std::to_string(v.as_nat());
    case Val::Tag::Bool: return v.as_bool() ? "b1" : "b0";
    case Val::Tag::Unit: return "u";
    case Val::Tag::Pair: {
      auto a = ground_key(v.as_pair().first);
      auto b = ground_key(v.as_pair().second);
      if (!a || !b) return std::nullopt;
      return "(" + *a + "," + *b + ")";
    }
    default: return std::nullopt;
  }
}

// A semantic function Val -> GiryMeasure<Val>. Application results at
// discrete arguments are memoized so that repeated integration against the
// same program point shares all interior approximation state.
struct Closure {
  std::function<GiryMeasure<Val>(const Val&)> call;

  explicit Closure(std::function<GiryMeasure<Val>(const Val&)> c)
      : call(std::move(c)) {}

  GiryMeasure<Val> apply(const Val& a) {
    std::optional<std::string> key = ground_key(a);
    if (!key) return call(a);
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = memo_.find(*key);
      if (it != memo_.end()) return it->second;
    }
    // The stored measure is the reuse point for this program position, so it
    // carries the integration memo.
    GiryMeasure<Val> m = g_cached(call(a));
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, fresh] = memo_.emplace(*key, m);
    (void)fresh;
    return it->second;
  }

 private:
  std::mutex mu_;
  std::map<std::string, GiryMeasure<Val>> memo_;
};

// Environments as shared immutable association lists; extension never
// mutates, so environment nodes have stable identity for the whole run.
struct EnvNode;
using EnvPtr = std::shared_ptr<const EnvNode>;

struct EnvNode {
  std::string name;
  Val val;
  EnvPtr next;
};

inline EnvPtr env_extend(EnvPtr env, std::string name, Val v) {
  return std::make_shared<const EnvNode>(
      EnvNode{std::move(name), std::move(v), std::move(env)});
}

inline const Val& env_lookup(const EnvPtr& env, const std::string& x) {
  for (const EnvNode* n = env.get(); n; n = n->next.get())
    if (n->name == x) return n->val;
  throw std::logic_error("unbound variable at run time: " + x);
}

}  // namespace lowr::rml
