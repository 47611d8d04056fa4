#pragma once

#include <vector>

#include "worm/types.hpp"

namespace worm::weight {

/// Normalization constant C_{nJ} produced by integrating out the angular
/// variables and the z' ball in the norm reduction:
/// (2 pi)^{n-1} 2^{1-n} prod(j_i!) / (|J| + n - 2)!. Validated against the
/// dirichlet_constant oracle.
double cnj_constant(int dim, const std::vector<int>& j_multi);

/// Strip weight W_{Jk} on the vertical variable of S_{alpha beta}.
struct WeightSpec {
    ModeIndex mode;
    WormParams params;
    double c_nj;      // > 0
    int cos_power;    // |J| + n - 2 >= 1

    double winding() const { return 2.0 * params.alpha * std::log(params.beta); }
    double support_lo() const;   // -pi/2
    double support_hi() const;   // 2 alpha ln beta + pi/2
    /// Interior kink locations of W (clipping pattern changes of the
    /// defining convolution); y-quadratures split panels here.
    std::vector<double> interior_kinks() const;
};

WeightSpec make_weight_spec(const ModeIndex& mode, const WormParams& params);
/// Test hook: override the normalization constant (e.g. c_nj = 1).
WeightSpec make_weight_spec(const ModeIndex& mode, const WormParams& params, double c_nj_override);

struct WeightQuadConfig {
    int order = 24;
    double max_panel = 0.25;
};

/// Direct numeric evaluation of the defining integral of W_{Jk}(theta1);
/// exactly 0 outside the support.
double weight_direct(double theta1, const WeightSpec& spec, const WeightQuadConfig& q = {});

struct TransformValue {
    cplx xi;
    cplx value;
    bool removable = false;  // evaluated by local expansion at a removable singularity
};

/// Closed-form Fourier transform F(W_{Jk})(xi) (entire function of xi);
/// removable singularities of the displayed formula are evaluated by local
/// Taylor expansion inside radius 1e-4.
TransformValue weight_fourier_closed(cplx xi, const WeightSpec& spec);

/// G(zeta) = F(W_{Jk})(-2 i zeta), whose zeros are the poles of the strip
/// kernel integrand, and its analytic derivative.
cplx transform_m2i(cplx zeta, const WeightSpec& spec);
struct ValueDeriv {
    cplx value;
    cplx deriv;
};
ValueDeriv transform_m2i_jet(cplx zeta, const WeightSpec& spec);

/// Composite constant D_{nJ} of the closed form, reconstructed from the two
/// factor transforms and the convolution rule.
cplx dnj_constant(const WeightSpec& spec);

/// Log-scaled Laplace transform t(xi) = integral W(y) e^{-2 y xi} dy
/// = sqrt(2 pi) F(W)(-2 i xi) for real xi, returned as log-magnitude and
/// phase so callers can combine exponents without overflow.
struct LogC {
    double log_mag;
    double phase;
};
LogC weight_laplace_log(double xi, const WeightSpec& spec);

}  // namespace worm::weight
