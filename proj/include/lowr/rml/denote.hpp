#pragma once

#include "lowr/giry.hpp"
#include "lowr/rml/ast.hpp"
#include "lowr/rml/value.hpp"

namespace lowr::rml {

// Denotation of a well-typed term under env. Recursion unfolds at most
// rec_fuel times before bottoming out; the full semantics is the join of
// these truncations over rec_fuel, which queries take along the diagonal
// with all other approximation indices.
GiryMeasure<Val> denote(const TermPtr& t, const EnvPtr& env, Fuel rec_fuel);

// The semi-decided comparison as a measure on booleans: mass routes to true
// once the order is certified one way, to false the other way, and stays
// absent on the diagonal.
GiryMeasure<Val> denote_lt(const RealNum& x, const RealNum& y);

}  // namespace lowr::rml
