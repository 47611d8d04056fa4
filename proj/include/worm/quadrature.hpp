#pragma once

#include <functional>
#include <span>
#include <vector>

#include "worm/types.hpp"

namespace worm::quad {

/// Gauss-Legendre rule on [-1, 1]; cached per order.
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const Rule& gauss_legendre(int order);

/// Composite Gauss-Legendre over [a, b] with equal panels.
double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels, int order = 16);
cplx integrate_c(const std::function<cplx(double)>& f, double a, double b,
                 int panels, int order = 16);

/// Composite rule whose panels are split at the given interior breakpoints
/// (breakpoints outside (a, b) are ignored).
double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::span<const double> breakpoints, int panels_per_segment,
                       int order = 16);

/// Nodes and weights of the composite rule over [a, b] with interior splits.
void split_nodes(double a, double b, std::span<const double> breakpoints,
                 int panels_per_segment, int order,
                 std::vector<double>& nodes, std::vector<double>& weights);

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least-squares line through (x_i, y_i).
LinFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Compensated (Kahan) accumulator for long positive sums.
class KahanSum {
public:
    void add(double v) {
        double y = v - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

}  // namespace worm::quad
