#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "worm/types.hpp"

namespace worm::geometry {

/// Smooth cutoff sigma(t) = M e^{-1/t} for t > 0, identically 0 for t <= 0,
/// together with its first two derivatives. All three are total functions.
double sigma(double t, double m_amp);
double sigma_d1(double t, double m_amp);
double sigma_d2(double t, double m_amp);

/// Defining function r of the worm domain; negative inside, zero on the
/// boundary. Throws validation_error when zn == 0.
double defining_function(const CPoint& z, const WormParams& p);

/// Complex gradient (dr/dz_1, ..., dr/dz_n).
Eigen::VectorXcd complex_gradient(const CPoint& z, const WormParams& p);

/// Closed-form complex Hessian H[j][k] = d^2 r / dz_j dzbar_k, Hermitian by
/// construction.
Eigen::MatrixXcd complex_hessian(const CPoint& z, const WormParams& p);

struct LeviReport {
    CPoint point;
    double min_tangential_eigenvalue;
    int tangent_dimension;  // n - 1
    double gradient_norm;
};

/// Minimum eigenvalue of the Levi form restricted to the complex tangent
/// space at a boundary point. Throws validation_error if the point is not on
/// the boundary (|r| tolerance scaled by gradient norm) or the gradient
/// degenerates.
LeviReport tangential_levi_min_eig(const CPoint& z, const WormParams& p);

/// Euclidean distance to the weakly pseudoconvex set
/// {z1 = 0, z' = 0, 1 <= |zn| <= beta}.
double distance_to_weak_set(const CPoint& z, const WormParams& p);

/// One boundary point: a seeded random ray from an interior anchor point,
/// intersected with {r = 0} by bisection to |r| < 1e-12.
CPoint boundary_sample(const WormParams& p, std::uint64_t seed, std::uint64_t index);

struct ScanSample {
    CPoint point;
    double min_eig;
    double gradient_norm;
    double dist_weak;
};

struct ScanReport {
    std::vector<ScanSample> samples;
    double min_eig = 0.0;       // most negative tangential eigenvalue found
    std::size_t argmin = 0;
    std::vector<std::size_t> near_zero;  // indices with min_eig < 1e-6
};

/// Samples the boundary and evaluates the tangential Levi form everywhere.
/// Rejects parameters with M <= e^2.
ScanReport pseudoconvexity_scan(const WormParams& p, int sample_count, std::uint64_t seed);

/// Anisotropic scaling tau_lambda(z1, z', zn) = (2 lambda^2 z1, lambda z', zn).
struct ScalingFrame {
    double lambda;

    explicit ScalingFrame(double lambda_);
    CPoint apply(const CPoint& z) const;
    CPoint inverse(const CPoint& z) const;
};

/// Limit defining function r_inf = |z'|^2 - Re(z1 e^{-2 i alpha ln|zn|}).
double r_infinity(const CPoint& z, const WormParams& p);

struct ScaledValue {
    double r_lambda;
    double r_infinity;
};

/// r_lambda = lambda^2 r(tau_lambda^{-1} z) evaluated in a cancellation-free
/// arrangement, together with r_inf. On 1 <= |zn| <= beta the difference is
/// exactly |z1|^2 / (4 lambda^2).
ScaledValue scaled_defining(double lambda, const CPoint& z, const WormParams& p);

}  // namespace worm::geometry
