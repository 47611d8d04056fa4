#pragma once

#include <span>
#include <vector>

#include "worm/poles.hpp"
#include "worm/types.hpp"

namespace worm::blowup {

struct SobolevParams {
    double p;       // [1, inf)
    double s;       // >= 0
    int m;          // ceil(s) (= s when integral)
    double t_frac;  // m - s, in [0, 1)
};

SobolevParams make_sobolev(double p, double s);

/// Conical probe region D' of the model domain: |z1| < delta,
/// |theta1 - 2 alpha ln|zn|| < pi/4, 1 + delta < |zn| < beta - delta.
struct ProbeRegion {
    double delta;
    double r1_max;           // = delta
    double angle_halfwidth;  // = pi/4
    double ann_lo, ann_hi;   // (1 + delta, beta - delta)
};

/// delta <= 0 selects the default min(0.05, (beta - 1)/4).
ProbeRegion make_probe_region(const WormParams& p, double delta = 0.0);

struct Threshold {
    double s_star;      // nu + n (1/p - 1/2)
    bool has_lp_range;  // true iff n alpha ln beta > pi
    double p_min = 0.0, p_max = 0.0;
};

Threshold threshold_and_range(double p, const WormParams& params);

enum class KernelModel { LeadingTerm, ResidueSeries };
enum class Classification { Convergent, LogDivergent, PowerDivergent, Inconclusive };

const char* classification_name(Classification c);

struct TailConfig {
    int s_panels = 3;
    int psi_panels = 4;
    int order = 8;
    int radial_panels_per_octave = 3;
    bool use_modulus = false;  // drop the winding term's angular modulus factor
    cplx w_logz1 = cplx(0.0, 0.0);
    double w_zn_abs = 0.0;  // 0 -> sqrt(beta)
};

/// Truncated probe integral
/// I(eps) = int_{D' cap {r1 > eps}} |r_inf|^{pt} |d^m_{z1} K_{0,-2}(z, w)|^p dV(z)
/// with the kernel's z1-derivative taken term-wise on the residue expansion
/// (or its winding term alone).
double sobolev_tail_integral(const SobolevParams& sp, const ProbeRegion& region,
                             const WormParams& params, double eps,
                             const poles::ResidueExpansion& expansion, KernelModel model,
                             const TailConfig& cfg = {});

/// I(eps) for every eps in the grid (sorted descending internally); increments
/// between consecutive eps values are computed as independent quadratures so
/// their regression is cancellation-free.
std::vector<double> tail_integral_grid(const SobolevParams& sp, const ProbeRegion& region,
                                       const WormParams& params, std::span<const double> eps,
                                       const poles::ResidueExpansion& expansion, KernelModel model,
                                       const TailConfig& cfg = {});

struct ScanRow {
    double p, s, s_star;
    Classification cls = Classification::Inconclusive;
    double slope = 0.0;      // growth exponent gamma: I(eps) ~ eps^{-gamma}
    double r_squared = 0.0;  // of the increment regression
    std::vector<double> eps;
    std::vector<double> integral;
};

/// Classifies the eps-grid values of I by regressing log2 of the increments
/// against the octave index.
ScanRow classify_tail(const SobolevParams& sp, const ProbeRegion& region, const WormParams& params,
                      std::span<const double> eps, const poles::ResidueExpansion& expansion,
                      KernelModel model, const TailConfig& cfg = {}, double slope_tol = 0.02);

std::vector<double> default_eps_grid();  // 2^-4 ... 2^-14

std::vector<ScanRow> divergence_scan(std::span<const double> p_grid, std::span<const double> s_grid,
                                     const WormParams& params, const ProbeRegion& region,
                                     KernelModel model, const TailConfig& cfg = {},
                                     std::span<const double> eps_grid = {});

struct LogFit {
    double a, b, r_squared;  // I(eps) ~ a ln(1/eps) + b
};

LogFit log_divergence_fit(std::span<const double> eps, std::span<const double> integral);

struct Corollary2Result {
    double p, p_conj;
    Classification cls_p, cls_conj;
    bool divergent;  // true iff either exponent's tail integral diverges
};

/// s = 0 endpoint test of the L^p corollary; the lower conjugate range is
/// reached through the duality exponent p/(p-1).
Corollary2Result corollary2_check(double p, const WormParams& params, const ProbeRegion& region,
                                  const poles::ResidueExpansion& expansion, KernelModel model,
                                  const TailConfig& cfg = {});

}  // namespace worm::blowup
