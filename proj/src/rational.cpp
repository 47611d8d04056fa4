#include "worm/rational.hpp"

namespace worm::rational {

SumEvalResult sum_eval(int j, const Rational& alpha, const Rational& xi) {
    if (j < 0) throw validation_error("j must be nonnegative");
    using boost::multiprecision::cpp_int;

    // precheck all denominators
    for (int s = 0; s <= j; ++s)
        if (xi + alpha * (j - 2 * s) == 0)
            throw validation_error("pole hit: xi + alpha (j - 2s) vanishes");

    Rational lhs = 0;
    cpp_int binom = 1;
    for (int s = 0; s <= j; ++s) {
        Rational term = Rational(binom) / (xi + alpha * (j - 2 * s));
        lhs += (s % 2 == 0) ? term : -term;
        binom = binom * (j - s) / (s + 1);
    }

    Rational num = 1;
    for (int i = 1; i <= j; ++i) num *= Rational(-2) * alpha * i;  // (-2 alpha)^j j!
    Rational den = 1;
    for (int s = 0; s <= j; ++s) den *= xi + alpha * (j - 2 * s);
    return {lhs, num / den};
}

}  // namespace worm::rational
