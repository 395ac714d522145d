#pragma once

#include <memory>
#include <optional>
#include <utility>

#include "lowr/rat.hpp"
#include "lowr/rml/ast.hpp"

namespace lowr::rml {

// Operational sample values: reals are exact rationals (uniform draws are
// dyadic with 64 fractional bits, elementary functions are rounded to the
// midpoint of a 2^-48 enclosure). The sampler is a cross-check oracle, not
// part of the semantics.
class SVal;
using SValPtr = std::shared_ptr<const SVal>;

class SVal {
 public:
  enum class Tag { Nat, Bool, Real, Unit, Pair, Fun };
  Tag tag;
  unsigned long long nat = 0;
  bool b = false;
  Rat real;
  SValPtr fst, snd;
  // Closures are defunctionalized: the lambda or rec body plus environment.
  struct ClosureRep;
  std::shared_ptr<const ClosureRep> fun;
};

// Runs t (closed, well-typed) once with the given seed. Returns nothing if
// the step budget runs out (nontermination) or a partial operation lands
// outside its domain on the sampled path.
std::optional<SVal> sample(const TermPtr& t, unsigned long long seed,
                           long max_steps = 200000);

}  // namespace lowr::rml
