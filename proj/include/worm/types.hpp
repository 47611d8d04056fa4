#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "worm/errors.hpp"

namespace worm {

using cplx = std::complex<double>;

inline constexpr const char* kVersion = "0.1.0";

/// Parameters of the worm domain: winding speed alpha, annulus outer radius
/// beta, cutoff amplitude M, and complex dimension n. The derived constants
/// nu = pi / (2 alpha ln beta) and mu = 1 / (2 alpha) are recomputed on
/// construction and never stored independently.
struct WormParams {
    double alpha;        // > 0
    double beta;         // > 1
    double smoothing_m;  // M, > e^2
    int dim;             // n >= 3
    double nu;
    double mu;

    double total_winding() const { return 2.0 * alpha * std::log(beta); }
};

/// Validates invariants (alpha > 0, beta > 1, M > e^2, n >= 3) and fills the
/// derived constants. Throws validation_error naming the violated invariant.
WormParams make_params(double alpha, double beta, double smoothing_m, int dim);

/// A point of C^n split as (z1, z', zn) with z' = (z2, ..., z_{n-1}).
struct CPoint {
    cplx z1;
    std::vector<cplx> zprime;  // length dim - 2
    cplx zn;                   // must stay away from 0
};

CPoint make_point(cplx z1, std::vector<cplx> zprime, cplx zn, const WormParams& p);

/// Fourier mode (J, k) selecting one component of the Bergman space.
struct ModeIndex {
    std::vector<int> j_multi;  // J, length dim - 2, entries >= 0
    int k = 0;
    int j_abs = 0;             // |J| = j1 + ... + j_{n-2}
};

ModeIndex make_mode(std::vector<int> j_multi, int k);
ModeIndex zero_mode(int dim, int k);

/// Closed axis-aligned rectangle in the complex plane.
struct Rect {
    double re_lo, re_hi, im_lo, im_hi;

    bool contains(cplx z, double pad = 0.0) const {
        return z.real() >= re_lo - pad && z.real() <= re_hi + pad &&
               z.imag() >= im_lo - pad && z.imag() <= im_hi + pad;
    }
};

/// Deterministic per-sample substream seeding (splitmix64 of seed and index).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace worm
