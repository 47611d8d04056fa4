#include "worm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "worm/geometry.hpp"
#include "worm/quadrature.hpp"

namespace worm::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

// composite Simpson over samples with stride, trapezoid patch for a leftover
// interval
cplx simpson_transform(const SampledFunction& f, double xi, std::size_t stride) {
    const double h = f.step * stride;
    quad::KahanSum re, im;
    auto term = [&](std::size_t i) {
        const double t = f.start + f.step * i;
        return f.values[i] * std::exp(cplx(0.0, -xi * t));
    };
    std::size_t last = ((f.values.size() - 1) / stride) * stride;
    const std::size_t intervals = last / stride;
    std::size_t pairs = intervals / 2;
    for (std::size_t p = 0; p < pairs; ++p) {
        const std::size_t i = 2 * p * stride;
        const cplx v = (h / 3.0) * (term(i) + 4.0 * term(i + stride) + term(i + 2 * stride));
        re.add(v.real());
        im.add(v.imag());
    }
    if (intervals % 2 == 1) {  // trapezoid on the final interval
        const cplx v = 0.5 * h * (term(last - stride) + term(last));
        re.add(v.real());
        im.add(v.imag());
    }
    if (last != f.values.size() - 1) {  // leftover sub-stride tail
        for (std::size_t i = last; i + 1 < f.values.size(); ++i) {
            const cplx v = 0.5 * f.step * (term(i) + term(i + 1));
            re.add(v.real());
            im.add(v.imag());
        }
    }
    return cplx(re.value(), im.value()) / std::sqrt(2.0 * kPi);
}

double simplex_radial(std::span<const int> js, double radius, int order) {
    if (radius <= 0.0) return 0.0;
    const auto& rule = quad::gauss_legendre(order);
    const double half = 0.5 * radius;
    double acc = 0.0;
    const int j0 = js[0];
    for (int q = 0; q < order; ++q) {
        const double rho = half + half * rule.nodes[q];
        double v = std::pow(rho, 2 * j0 + 1);
        if (js.size() > 1) {
            const double rest = radius * radius - rho * rho;
            v *= simplex_radial(js.subspan(1), std::sqrt(std::max(0.0, rest)), order);
        }
        acc += half * rule.weights[q] * v;
    }
    return acc;
}

struct DirichletQuad {
    int x_panels, psi_panels, rn_panels, outer_order, inner_order, y_panels;
};

double dirichlet_ratio(int dim, const std::vector<int>& j_multi, int k, const DirichletQuad& q) {
    const int n = dim;
    int j_abs = 0;
    for (int ji : j_multi) j_abs += ji;

    // numerator: (2 pi)^{n-1} * int r_n^{2k+1} e^{x(2-|J|-n)} e^{-2(x^2-theta^2)}
    //            * SimplexRadial(sqrt(e^x cos psi)) dx dpsi dr_n,
    // theta = psi + 2 alpha ln r_n over 1 < r_n < beta. The ratio C_nJ is
    // independent of (alpha, beta, k); they are fixed here for the quadrature.
    const double alpha = 1.0;
    const double beta = std::exp(1.0);

    const auto& outer = quad::gauss_legendre(q.outer_order);
    const double xc = (2.0 - j_abs - n) / 4.0;  // center of the Gaussian in x
    const double x_lo = xc - 6.5, x_hi = xc + 6.5;

    quad::KahanSum num;
    const double hx = (x_hi - x_lo) / q.x_panels;
    const double hpsi = kPi / q.psi_panels;
    const double hr = (beta - 1.0) / q.rn_panels;
    for (int ix = 0; ix < q.x_panels; ++ix) {
        const double xm = x_lo + (ix + 0.5) * hx;
        for (int qx = 0; qx < q.outer_order; ++qx) {
            const double x = xm + 0.5 * hx * outer.nodes[qx];
            const double wx = 0.5 * hx * outer.weights[qx];
            const double ex = std::exp(x * (2.0 - j_abs - n) - 2.0 * x * x);
            const double r1 = std::exp(x);
            for (int ip = 0; ip < q.psi_panels; ++ip) {
                const double pm = -0.5 * kPi + (ip + 0.5) * hpsi;
                for (int qp = 0; qp < q.outer_order; ++qp) {
                    const double psi = pm + 0.5 * hpsi * outer.nodes[qp];
                    const double wp = 0.5 * hpsi * outer.weights[qp];
                    const double cp = std::cos(psi);
                    if (cp <= 0.0) continue;
                    const double simp =
                        simplex_radial(j_multi, std::sqrt(r1 * cp), q.inner_order);
                    for (int ir = 0; ir < q.rn_panels; ++ir) {
                        const double rm = 1.0 + (ir + 0.5) * hr;
                        for (int qr = 0; qr < q.outer_order; ++qr) {
                            const double rn = rm + 0.5 * hr * outer.nodes[qr];
                            const double wr = 0.5 * hr * outer.weights[qr];
                            const double theta = psi + 2.0 * alpha * std::log(rn);
                            const double val = std::pow(rn, 2 * k + 1) * ex *
                                               std::exp(2.0 * theta * theta) * simp;
                            num.add(wx * wp * wr * val);
                        }
                    }
                }
            }
        }
    }
    const double numerator = std::pow(2.0 * kPi, n - 1) * num.value();

    // denominator: int e^{-2x^2} dx * int e^{2y^2} W_hat(y) dy with C_nJ = 1
    const WormParams params = make_params(alpha, beta, 20.0, n);
    const weight::WeightSpec spec =
        weight::make_weight_spec(make_mode(j_multi, k), params, 1.0);
    double xint = quad::integrate([](double x) { return std::exp(-2.0 * x * x); }, -6.5, 6.5,
                                  q.x_panels, q.outer_order);
    const auto kinks = spec.interior_kinks();
    double yint = quad::integrate_split(
        [&](double y) {
            return std::exp(2.0 * y * y) * weight::weight_direct(y, spec);
        },
        spec.support_lo(), spec.support_hi(), kinks, q.y_panels, q.outer_order);
    return numerator / (xint * yint);
}

}  // namespace

FourierResult numeric_fourier(const SampledFunction& f, double xi) {
    if (f.values.size() < 5) throw validation_error("sampled function needs at least 5 samples");
    if (!(f.step > 0.0)) throw validation_error("sample step must be positive");
    FourierResult res;
    const cplx fine = simpson_transform(f, xi, 1);
    const cplx coarse = simpson_transform(f, xi, 2);
    res.value = fine + (fine - coarse) / 15.0;
    res.est_error = std::abs(fine - coarse) / 15.0;
    res.support_clipped =
        std::abs(f.values.front()) > 1e-12 || std::abs(f.values.back()) > 1e-12;
    return res;
}

cplx fourier_segments(const std::function<double(double)>& f,
                      std::span<const double> breakpoints, double xi, int order,
                      double max_panel) {
    if (breakpoints.size() < 2) throw validation_error("need at least two breakpoints");
    std::vector<double> cuts(breakpoints.begin(), breakpoints.end());
    std::sort(cuts.begin(), cuts.end());
    const double width = std::min(max_panel, 2.0 * kPi / (1.0 + std::abs(xi)) / 2.0);
    const auto& rule = quad::gauss_legendre(order);
    quad::KahanSum re, im;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const int panels =
            std::max(1, static_cast<int>(std::ceil((cuts[i + 1] - cuts[i]) / width)));
        const double h = (cuts[i + 1] - cuts[i]) / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = cuts[i] + (p + 0.5) * h;
            for (int q = 0; q < order; ++q) {
                const double t = mid + 0.5 * h * rule.nodes[q];
                const cplx v = 0.5 * h * rule.weights[q] * f(t) * std::exp(cplx(0.0, -xi * t));
                re.add(v.real());
                im.add(v.imag());
            }
        }
    }
    return cplx(re.value(), im.value()) / std::sqrt(2.0 * kPi);
}

cplx strip_inner_product(const std::function<cplx(cplx)>& f, const std::function<cplx(cplx)>& g,
                         const weight::WeightSpec& spec, double trunc_x,
                         const InnerProductConfig& cfg) {
    if (!(trunc_x > 0.0)) throw validation_error("trunc_x must be positive");
    std::vector<double> ynodes, yweights;
    const auto kinks = spec.interior_kinks();
    const int segments = static_cast<int>(kinks.size()) + 1;
    const int ypanels = std::max(2, cfg.y_nodes / (16 * segments));
    quad::split_nodes(spec.support_lo(), spec.support_hi(), kinks, ypanels, 16, ynodes, yweights);
    std::vector<double> wv(ynodes.size());
    double interior_scale = 0.0, boundary_scale = 0.0;
    for (std::size_t i = 0; i < ynodes.size(); ++i) {
        wv[i] = weight::weight_direct(ynodes[i], spec);
        const cplx zc(0.0, ynodes[i]);
        interior_scale = std::max(interior_scale, std::abs(f(zc) * std::conj(g(zc))) * wv[i]);
        const cplx zb1(trunc_x, ynodes[i]), zb2(-trunc_x, ynodes[i]);
        boundary_scale =
            std::max({boundary_scale, std::abs(f(zb1) * std::conj(g(zb1))) * wv[i],
                      std::abs(f(zb2) * std::conj(g(zb2))) * wv[i]});
    }
    if (boundary_scale > cfg.boundary_tol * std::max(interior_scale, 1e-300))
        throw numeric_error("weighted integrand does not decay at the truncation boundary");

    const auto& rule = quad::gauss_legendre(cfg.x_order);
    const int xpanels = std::max(4, static_cast<int>(std::ceil(2.0 * trunc_x / cfg.x_panel)));
    const double hx = 2.0 * trunc_x / xpanels;
    quad::KahanSum re, im;
    for (std::size_t iy = 0; iy < ynodes.size(); ++iy) {
        if (wv[iy] == 0.0) continue;
        for (int px = 0; px < xpanels; ++px) {
            const double mid = -trunc_x + (px + 0.5) * hx;
            for (int qx = 0; qx < cfg.x_order; ++qx) {
                const double x = mid + 0.5 * hx * rule.nodes[qx];
                const cplx z(x, ynodes[iy]);
                const cplx v =
                    0.5 * hx * rule.weights[qx] * yweights[iy] * wv[iy] * f(z) * std::conj(g(z));
                re.add(v.real());
                im.add(v.imag());
            }
        }
    }
    return {re.value(), im.value()};
}

double dirichlet_constant(int dim, const std::vector<int>& j_multi, int level, double tol) {
    if (dim < 3) throw validation_error("dimension must satisfy n >= 3");
    if (static_cast<int>(j_multi.size()) != dim - 2)
        throw validation_error("multi-index J must have length dim - 2");
    const int k = -2;
    const int boost = std::max(0, level - 1);
    DirichletQuad coarse{10 + 2 * boost, 8 + 2 * boost, 6 + 2 * boost, 10 + 2 * boost,
                         14 + 2 * boost, 8 + 2 * boost};
    DirichletQuad fine{14 + 2 * boost, 11 + 2 * boost, 8 + 2 * boost, 12 + 2 * boost,
                       18 + 2 * boost, 12 + 2 * boost};
    const double c1 = dirichlet_ratio(dim, j_multi, k, coarse);
    const double c2 = dirichlet_ratio(dim, j_multi, k, fine);
    if (std::abs(c1 - c2) > tol * std::abs(c2))
        throw numeric_error("dirichlet_constant refinement levels disagree beyond tolerance");
    return c2;
}

Eigen::MatrixXcd finite_difference_hessian(const CPoint& z, const WormParams& p, double step) {
    if (!(step > 0.0)) throw validation_error("step must be positive");
    if (std::abs(z.zn) < 10.0 * step)
        throw validation_error("point too close to zn = 0 for finite differences");
    const int n = p.dim;

    auto shifted = [&](int coord, double dx, double dy) {
        CPoint q = z;
        const cplx d(dx, dy);
        if (coord == 0)
            q.z1 += d;
        else if (coord == n - 1)
            q.zn += d;
        else
            q.zprime[static_cast<std::size_t>(coord - 1)] += d;
        return q;
    };
    auto rf = [&](const CPoint& q) { return geometry::defining_function(q, p); };

    // D_ab f with a in {x_j, y_j}, b in {x_k, y_k} by 4-point central stencils
    auto mixed = [&](int cj, bool yj, int ck, bool yk) {
        if (cj == ck && yj == yk) {
            const CPoint qp = shifted(cj, yj ? 0.0 : step, yj ? step : 0.0);
            const CPoint qm = shifted(cj, yj ? 0.0 : -step, yj ? -step : 0.0);
            return (rf(qp) - 2.0 * rf(z) + rf(qm)) / (step * step);
        }
        auto at = [&](double sa, double sb) {
            CPoint q = z;
            const cplx da = yj ? cplx(0.0, sa) : cplx(sa, 0.0);
            const cplx db = yk ? cplx(0.0, sb) : cplx(sb, 0.0);
            auto add = [&](int coord, cplx d) {
                if (coord == 0)
                    q.z1 += d;
                else if (coord == n - 1)
                    q.zn += d;
                else
                    q.zprime[static_cast<std::size_t>(coord - 1)] += d;
            };
            add(cj, da);
            add(ck, db);
            return rf(q);
        };
        return (at(step, step) - at(step, -step) - at(-step, step) + at(-step, -step)) /
               (4.0 * step * step);
    };

    Eigen::MatrixXcd h(n, n);
    for (int j = 0; j < n; ++j) {
        for (int kk = 0; kk < n; ++kk) {
            const double dxx = mixed(j, false, kk, false);
            const double dyy = mixed(j, true, kk, true);
            const double dxy = mixed(j, false, kk, true);
            const double dyx = mixed(j, true, kk, false);
            h(j, kk) = 0.25 * cplx(dxx + dyy, dxy - dyx);
        }
    }
    return h;
}

}  // namespace worm::oracle
