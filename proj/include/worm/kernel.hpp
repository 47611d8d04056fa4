#pragma once

#include <functional>
#include <span>
#include <vector>

#include "worm/poles.hpp"
#include "worm/types.hpp"
#include "worm/weight.hpp"

namespace worm::kernel {

struct KernelEvalConfig {
    double truncation = 0.0;    // xi cutoff; 0 selects it from the decay margins
    int nodes = 16;             // Gauss-Legendre order per panel
    double tol = 1e-10;         // target absolute error of the kernel value
    double contour_shift = 0.0; // imaginary shift of the integration line
    double margin_guard = 1e-3; // reject points this close to the decay-margin limits
};

bool in_strip(cplx z, const WormParams& p);

struct QuadPlan {
    double xi_max = 0.0;
    int panels = 0;
    int order = 16;
    double margin_pos = 0.0;  // decay rate as xi -> +inf
    double margin_neg = 0.0;  // decay rate as xi -> -inf
};

/// Truncation and panelization for the inversion integral at u = z - wbar.
QuadPlan plan_quadrature(cplx u, const weight::WeightSpec& spec, const KernelEvalConfig& cfg);

struct KernelValue {
    cplx value;
    double est_error = 0.0;
};

/// Weighted strip Bergman kernel by direct quadrature of the Fourier
/// inversion integral. Both points must lie strictly inside the strip with
/// positive decay margins.
KernelValue strip_kernel_quadrature(cplx z, cplx w, const ModeIndex& mode, const WormParams& p,
                                    const KernelEvalConfig& cfg = {});

/// Partial sum of the residue expansion (discrete terms + winding term).
cplx strip_kernel_residue(cplx z, cplx w, const poles::ResidueExpansion& expansion);

/// Kernel values on a tensor grid (xs x ys) against a fixed second argument,
/// sharing one quadrature rule across the grid.
std::vector<std::vector<KernelValue>> strip_kernel_grid(std::span<const double> xs,
                                                        std::span<const double> ys, cplx w,
                                                        const ModeIndex& mode, const WormParams& p,
                                                        const KernelEvalConfig& cfg = {});

/// Mode-(J,k) Bergman kernel of the model domain in log coordinates:
/// z1 powers are evaluated as exp(power * logz1), which keeps the branch
/// unambiguous on the winding Riemann domain.
cplx model_kernel(cplx logz1, std::span<const cplx> zprime, cplx zn, cplx logw1,
                  std::span<const cplx> wprime, cplx wn, const ModeIndex& mode,
                  const WormParams& p, const KernelEvalConfig& cfg = {});

struct Gaussian {
    cplx center = 0.0;
    double scale = 1.0;  // f(z) = exp(-(scale (z - center))^2)
};

struct ReproducingConfig {
    KernelEvalConfig kernel;
    int x_order = 16;
    double x_panel = 0.35;
    int y_nodes = 200;
    double boundary_tol = 1e-12;
};

/// Relative error |<f, K(., w)>_W - f(w)| / |f(w)| of the reproducing
/// property, by truncated 2D quadrature over the strip. Throws numeric_error
/// if the truncated weighted mass of f fails to decay at the cutoff
/// (f not square integrable).
double reproducing_check(const Gaussian& f, cplx w, const ModeIndex& mode, const WormParams& p,
                         const ReproducingConfig& cfg = {});

/// Custom-sample variant: f_eval must be holomorphic on the strip with finite
/// weighted norm; trunc_x bounds the x integration.
double reproducing_check_fn(const std::function<cplx(cplx)>& f_eval, cplx w,
                            const ModeIndex& mode, const WormParams& p, double trunc_x,
                            const ReproducingConfig& cfg = {});

/// Torus-average projection of f onto the (J, k) mode at the base point
/// (trapezoidal rule, spectrally exact for trigonometric polynomials).
/// grid_per_axis must be >= 4 (max frequency + 1).
cplx mode_project(const std::function<cplx(const CPoint&)>& f, const CPoint& base,
                  const ModeIndex& mode, const WormParams& p, int grid_per_axis);

}  // namespace worm::kernel
