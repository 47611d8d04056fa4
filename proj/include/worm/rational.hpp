#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "worm/errors.hpp"

namespace worm::rational {

using Rational = boost::multiprecision::cpp_rational;

struct SumEvalResult {
    Rational lhs;  // sum_{s=0}^{j} binom(j,s) (-1)^s / (xi + alpha (j - 2s))
    Rational rhs;  // (-2 alpha)^j j! / ((xi + alpha j)(xi + alpha (j-2)) ... (xi - alpha j))
};

/// Both sides of the partial-fraction identity in exact rational arithmetic.
/// Throws validation_error if any denominator xi + alpha (j - 2s) vanishes.
SumEvalResult sum_eval(int j, const Rational& alpha, const Rational& xi);

}  // namespace worm::rational
