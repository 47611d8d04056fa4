#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "worm/types.hpp"
#include "worm/weight.hpp"

namespace worm::oracle {

/// Uniformly sampled function on start + step * i, i = 0..count-1.
struct SampledFunction {
    double start;
    double step;
    std::vector<cplx> values;
};

struct FourierResult {
    cplx value;
    double est_error = 0.0;      // Richardson estimate from step halving
    bool support_clipped = false;  // grid ends carry mass above 1e-12
};

/// F(f)(xi) = (1/sqrt(2pi)) int f(t) e^{-i xi t} dt by composite Simpson on
/// the sample grid, with a half-resolution Richardson error estimate.
FourierResult numeric_fourier(const SampledFunction& f, double xi);

/// Same transform for a piecewise-analytic integrand: Gauss-Legendre panels
/// between consecutive breakpoints, panel width capped against the
/// oscillation wavelength. breakpoints must bracket the support.
cplx fourier_segments(const std::function<double(double)>& f,
                      std::span<const double> breakpoints, double xi, int order = 24,
                      double max_panel = 0.25);

struct InnerProductConfig {
    double boundary_tol = 1e-12;
    int x_order = 16;
    double x_panel = 0.5;
    int y_nodes = 200;
};

/// Weighted strip inner product <f, g> = int f conj(g) W_{Jk}(Im z) dV over
/// |Re z| <= trunc_x, panels split at the weight's kinks. Throws
/// numeric_error when the integrand fails to decay at the truncation
/// boundary.
cplx strip_inner_product(const std::function<cplx(cplx)>& f, const std::function<cplx(cplx)>& g,
                         const weight::WeightSpec& spec, double trunc_x,
                         const InnerProductConfig& cfg = {});

/// C_{nJ} recovered as the ratio between the (2n)-real-dimensional norm
/// integral of a separable test function over the model domain and the
/// reduced weighted strip integral, both by direct quadrature (the z'
/// simplex is integrated numerically, not by the closed form). level >= 1
/// refines the quadrature; levels must agree within tol or a numeric_error
/// is thrown.
double dirichlet_constant(int dim, const std::vector<int>& j_multi, int level = 1,
                          double tol = 1e-9);

/// Second-order central differences of the defining function assembled into
/// d^2 r / dz_j dzbar_k. Independent of the closed-form Hessian.
Eigen::MatrixXcd finite_difference_hessian(const CPoint& z, const WormParams& p, double step);

}  // namespace worm::oracle
