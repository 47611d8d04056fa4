#include "worm/types.hpp"

#include <cmath>
#include <numbers>

namespace worm {

WormParams make_params(double alpha, double beta, double smoothing_m, int dim) {
    if (!(alpha > 0.0)) throw validation_error("alpha must satisfy alpha > 0");
    if (!(beta > 1.0)) throw validation_error("beta must satisfy beta > 1");
    const double e2 = std::exp(2.0);
    if (!(smoothing_m > e2))
        throw validation_error("smoothing amplitude must satisfy M > e^2 (boundedness precondition)");
    if (dim < 3) throw validation_error("dimension must satisfy n >= 3");
    WormParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.smoothing_m = smoothing_m;
    p.dim = dim;
    p.nu = std::numbers::pi / (2.0 * alpha * std::log(beta));
    p.mu = 1.0 / (2.0 * alpha);
    return p;
}

CPoint make_point(cplx z1, std::vector<cplx> zprime, cplx zn, const WormParams& p) {
    if (static_cast<int>(zprime.size()) != p.dim - 2)
        throw validation_error("zprime must have length dim - 2");
    if (zn == cplx(0.0, 0.0)) throw validation_error("zn must be nonzero (ln|zn| must be defined)");
    return CPoint{z1, std::move(zprime), zn};
}

ModeIndex make_mode(std::vector<int> j_multi, int k) {
    int j_abs = 0;
    for (int j : j_multi) {
        if (j < 0) throw validation_error("multi-index J must be nonnegative");
        j_abs += j;
    }
    return ModeIndex{std::move(j_multi), k, j_abs};
}

ModeIndex zero_mode(int dim, int k) {
    if (dim < 3) throw validation_error("dimension must satisfy n >= 3");
    return make_mode(std::vector<int>(static_cast<std::size_t>(dim - 2), 0), k);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ull * (index + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

}  // namespace worm
