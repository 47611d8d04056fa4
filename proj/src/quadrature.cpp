#include "worm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace worm::quad {

namespace {

Rule compute_rule(int order) {
    // Newton iteration on Legendre polynomials, roots seeded by the Chebyshev
    // approximation; standard construction, accurate to machine precision.
    Rule r;
    r.nodes.resize(order);
    r.weights.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[order - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[i] = w;
        r.weights[order - 1 - i] = w;
    }
    return r;
}

}  // namespace

const Rule& gauss_legendre(int order) {
    static std::map<int, Rule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
    return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels, int order) {
    const Rule& r = gauss_legendre(order);
    KahanSum acc;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h, half = 0.5 * h;
        for (int q = 0; q < order; ++q) acc.add(half * r.weights[q] * f(mid + half * r.nodes[q]));
    }
    return acc.value();
}

cplx integrate_c(const std::function<cplx(double)>& f, double a, double b,
                 int panels, int order) {
    const Rule& r = gauss_legendre(order);
    KahanSum re, im;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h, half = 0.5 * h;
        for (int q = 0; q < order; ++q) {
            cplx v = half * r.weights[q] * f(mid + half * r.nodes[q]);
            re.add(v.real());
            im.add(v.imag());
        }
    }
    return {re.value(), im.value()};
}

void split_nodes(double a, double b, std::span<const double> breakpoints,
                 int panels_per_segment, int order,
                 std::vector<double>& nodes, std::vector<double>& weights) {
    std::vector<double> cuts{a, b};
    for (double c : breakpoints)
        if (c > a + 1e-14 && c < b - 1e-14) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    const Rule& r = gauss_legendre(order);
    nodes.clear();
    weights.clear();
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double h = (cuts[i + 1] - cuts[i]) / panels_per_segment;
        for (int p = 0; p < panels_per_segment; ++p) {
            const double mid = cuts[i] + (p + 0.5) * h, half = 0.5 * h;
            for (int q = 0; q < order; ++q) {
                nodes.push_back(mid + half * r.nodes[q]);
                weights.push_back(half * r.weights[q]);
            }
        }
    }
}

double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::span<const double> breakpoints, int panels_per_segment,
                       int order) {
    std::vector<double> nodes, weights;
    split_nodes(a, b, breakpoints, panels_per_segment, order, nodes, weights);
    KahanSum acc;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc.add(weights[i] * f(nodes[i]));
    return acc.value();
}

LinFit linear_fit(std::span<const double> x, std::span<const double> y) {
    LinFit fit;
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return fit;
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= n;
    ym /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
        syy += (y[i] - ym) * (y[i] - ym);
    }
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = ym - fit.slope * xm;
    if (syy <= 1e-300) {
        fit.r_squared = 1.0;  // constant data, perfectly fit by the constant line
    } else {
        double ssres = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double e = y[i] - fit.intercept - fit.slope * x[i];
            ssres += e * e;
        }
        fit.r_squared = 1.0 - ssres / syy;
    }
    return fit;
}

}  // namespace worm::quad
