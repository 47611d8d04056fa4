#include "worm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "worm/quadrature.hpp"

namespace worm::kernel {

namespace {

constexpr double kPi = std::numbers::pi;

// e^{i u xi} / laplace(W)(xi) with exponents combined before exponentiation
cplx inversion_integrand(double xi, cplx u, const weight::WeightSpec& spec) {
    const weight::LogC lw = weight::weight_laplace_log(xi, spec);
    const double re = -u.imag() * xi - lw.log_mag;
    if (re < -745.0) return {0.0, 0.0};
    return std::exp(cplx(re, u.real() * xi - lw.phase));
}

double integrand_mag(double xi, cplx u, const weight::WeightSpec& spec) {
    const weight::LogC lw = weight::weight_laplace_log(xi, spec);
    return std::exp(std::min(700.0, -u.imag() * xi - lw.log_mag));
}

cplx quadrature_pass(cplx u, const weight::WeightSpec& spec, const QuadPlan& plan, int panels) {
    const auto& rule = quad::gauss_legendre(plan.order);
    const double h = 2.0 * plan.xi_max / panels;
    quad::KahanSum re, im;
    for (int p = 0; p < panels; ++p) {
        const double mid = -plan.xi_max + (p + 0.5) * h;
        for (int q = 0; q < plan.order; ++q) {
            const cplx v = 0.5 * h * rule.weights[q] *
                           inversion_integrand(mid + 0.5 * h * rule.nodes[q], u, spec);
            re.add(v.real());
            im.add(v.imag());
        }
    }
    return {re.value(), im.value()};
}

void require_strip(cplx z, const WormParams& p, const char* name) {
    if (!in_strip(z, p))
        throw validation_error(std::string(name) + " must lie strictly inside the strip");
}

}  // namespace

bool in_strip(cplx z, const WormParams& p) {
    return z.imag() > -0.5 * kPi && z.imag() < 0.5 * kPi + p.total_winding();
}

QuadPlan plan_quadrature(cplx u, const weight::WeightSpec& spec, const KernelEvalConfig& cfg) {
    const double winding2 = 2.0 * spec.winding();
    QuadPlan plan;
    plan.order = cfg.nodes;
    plan.margin_pos = kPi + u.imag();
    plan.margin_neg = kPi + winding2 - u.imag();
    if (plan.margin_pos < cfg.margin_guard || plan.margin_neg < cfg.margin_guard)
        throw validation_error("Im(z - wbar) is too close to the decay-margin limits");

    if (cfg.truncation > 0.0) {
        plan.xi_max = cfg.truncation;
    } else {
        const double target = cfg.tol * std::min(plan.margin_pos, plan.margin_neg) / 20.0;
        double xi = 4.0;
        for (int it = 0; it < 200; ++it) {
            const double mp = integrand_mag(xi, u, spec);
            const double mn = integrand_mag(-xi, u, spec);
            if (mp <= target && mn <= target) break;
            xi *= 1.3;
        }
        plan.xi_max = xi;
    }
    const double width = std::min(1.0, 2.0 * kPi / (1.0 + std::abs(u)));
    plan.panels = std::max(8, static_cast<int>(std::ceil(2.0 * plan.xi_max / width)));
    return plan;
}

KernelValue strip_kernel_quadrature(cplx z, cplx w, const ModeIndex& mode, const WormParams& p,
                                    const KernelEvalConfig& cfg) {
    require_strip(z, p, "z");
    require_strip(w, p, "w");
    // the integration contour runs along the real line: every zero of the
    // transform sits at imaginary height >= min(nu, (|J|+n)/2), so no
    // indentation is needed; guard against degenerate configurations
    if (std::min(p.nu, 0.5 * (mode.j_abs + p.dim)) < 1e-6)
        throw validation_error("a transform zero sits on the integration contour");
    const weight::WeightSpec spec = weight::make_weight_spec(mode, p);
    const cplx u = z - std::conj(w);
    const QuadPlan plan = plan_quadrature(u, spec, cfg);

    cplx fine, coarse;
    if (cfg.contour_shift == 0.0) {
        fine = quadrature_pass(u, spec, plan, plan.panels);
        coarse = quadrature_pass(u, spec, plan, std::max(4, plan.panels / 2));
    } else {
        // shifted line Im xi = s: uses the direct (unscaled) transform, so the
        // shift is restricted to moderate truncations
        const double s = cfg.contour_shift;
        if (plan.xi_max > 100.0)
            throw validation_error("contour_shift unsupported at this truncation (margins too thin)");
        auto f = [&](double t) {
            const cplx xi(t, s);
            const cplx lap = std::sqrt(2.0 * kPi) *
                             weight::transform_m2i(xi, spec);
            return std::exp(cplx(0.0, 1.0) * u * xi) / lap;
        };
        fine = quad::integrate_c(f, -plan.xi_max, plan.xi_max, plan.panels, plan.order);
        coarse = quad::integrate_c(f, -plan.xi_max, plan.xi_max, std::max(4, plan.panels / 2),
                                   plan.order);
    }

    const double tail = (integrand_mag(plan.xi_max, u, spec) / plan.margin_pos +
                         integrand_mag(-plan.xi_max, u, spec) / plan.margin_neg) *
                        1.5;
    KernelValue kv;
    const double pref = 1.0 / (2.0 * kPi);
    kv.value = pref * fine;
    kv.est_error = pref * (std::abs(fine - coarse) + tail);
    if (kv.est_error > cfg.tol)
        throw numeric_error("kernel quadrature error estimate exceeds the requested tolerance");
    return kv;
}

cplx strip_kernel_residue(cplx z, cplx w, const poles::ResidueExpansion& expansion) {
    const cplx u = z - std::conj(w);
    cplx acc(0.0, 0.0);
    for (const auto& t : expansion.discrete_terms) acc += t.coeff * std::exp(t.exponent * u);
    acc += expansion.winding_term.coeff * std::exp(expansion.winding_term.exponent * u);
    return acc;
}

std::vector<std::vector<KernelValue>> strip_kernel_grid(std::span<const double> xs,
                                                        std::span<const double> ys, cplx w,
                                                        const ModeIndex& mode, const WormParams& p,
                                                        const KernelEvalConfig& cfg) {
    require_strip(w, p, "w");
    const weight::WeightSpec spec = weight::make_weight_spec(mode, p);

    // worst-case margins and oscillation across the grid
    double umax = 0.0;
    cplx u_worst_pos(0.0, 0.0), u_worst_neg(0.0, 0.0);
    double im_lo = 1e300, im_hi = -1e300;
    for (double y : ys) {
        const double ui = y + w.imag();
        im_lo = std::min(im_lo, ui);
        im_hi = std::max(im_hi, ui);
    }
    for (double x : xs)
        for (double y : ys) umax = std::max(umax, std::abs(cplx(x - w.real(), y + w.imag())));
    u_worst_pos = cplx(0.0, im_lo);  // smallest margin_pos
    u_worst_neg = cplx(0.0, im_hi);  // smallest margin_neg

    KernelEvalConfig c2 = cfg;
    c2.truncation = 0.0;
    QuadPlan plan_pos = plan_quadrature(u_worst_pos, spec, c2);
    QuadPlan plan_neg = plan_quadrature(u_worst_neg, spec, c2);
    QuadPlan plan;
    plan.order = cfg.nodes;
    plan.xi_max = std::max(plan_pos.xi_max, plan_neg.xi_max);
    const double width = std::min(1.0, 2.0 * kPi / (1.0 + umax));
    plan.panels = std::max(8, static_cast<int>(std::ceil(2.0 * plan.xi_max / width)));
    plan.margin_pos = plan_pos.margin_pos;
    plan.margin_neg = plan_neg.margin_neg;

    // shared nodes, weights and transform samples
    const auto& rule = quad::gauss_legendre(plan.order);
    const int nq = plan.panels * plan.order;
    std::vector<double> xi(nq), wq(nq);
    std::vector<weight::LogC> lw(nq);
    {
        const double h = 2.0 * plan.xi_max / plan.panels;
        int idx = 0;
        for (int pn = 0; pn < plan.panels; ++pn) {
            const double mid = -plan.xi_max + (pn + 0.5) * h;
            for (int q = 0; q < plan.order; ++q, ++idx) {
                xi[idx] = mid + 0.5 * h * rule.nodes[q];
                wq[idx] = 0.5 * h * rule.weights[q];
                lw[idx] = weight::weight_laplace_log(xi[idx], spec);
            }
        }
    }

    const double pref = 1.0 / (2.0 * kPi);
    std::vector<std::vector<KernelValue>> out(xs.size(),
                                              std::vector<KernelValue>(ys.size()));
    // separable factors: e^{i u xi} = e^{i (x - Re w) xi} * e^{-(y + Im w) xi}
    std::vector<std::vector<cplx>> exq(xs.size(), std::vector<cplx>(nq));
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
        const double ure = xs[ix] - w.real();
        for (int q = 0; q < nq; ++q)
            exq[ix][q] = std::polar(1.0, ure * xi[q]);
    }
    const weight::LogC ltail_p = weight::weight_laplace_log(plan.xi_max, spec);
    const weight::LogC ltail_n = weight::weight_laplace_log(-plan.xi_max, spec);
    std::vector<cplx> ry(nq);
    for (std::size_t iy = 0; iy < ys.size(); ++iy) {
        const double uim = ys[iy] + w.imag();
        for (int q = 0; q < nq; ++q) {
            const double re = -uim * xi[q] - lw[q].log_mag;
            ry[q] = (re < -745.0) ? cplx(0.0, 0.0)
                                  : wq[q] * std::exp(cplx(re, -lw[q].phase));
        }
        const double tail =
            1.5 * (std::exp(std::min(700.0, -uim * plan.xi_max - ltail_p.log_mag)) /
                       (kPi + uim) +
                   std::exp(std::min(700.0, uim * plan.xi_max - ltail_n.log_mag)) /
                       (kPi + 2.0 * spec.winding() - uim));
        for (std::size_t ix = 0; ix < xs.size(); ++ix) {
            const auto& ex = exq[ix];
            cplx acc(0.0, 0.0);
            for (int q = 0; q < nq; ++q) acc += ry[q] * ex[q];
            out[ix][iy] = KernelValue{pref * acc, pref * tail};
        }
    }
    return out;
}

cplx model_kernel(cplx logz1, std::span<const cplx> zprime, cplx zn, cplx logw1,
                  std::span<const cplx> wprime, cplx wn, const ModeIndex& mode,
                  const WormParams& p, const KernelEvalConfig& cfg) {
    if (static_cast<int>(zprime.size()) != p.dim - 2 ||
        static_cast<int>(wprime.size()) != p.dim - 2)
        throw validation_error("zprime/wprime must have length dim - 2");
    const double azn = std::abs(zn), awn = std::abs(wn);
    if (!(azn > 1.0 && azn < p.beta) || !(awn > 1.0 && awn < p.beta))
        throw validation_error("|zn| and |wn| must lie in the open annulus (1, beta)");
    require_strip(logz1, p, "ln z1");
    require_strip(logw1, p, "ln w1");

    const KernelValue ks = strip_kernel_quadrature(logz1, logw1, mode, p, cfg);
    cplx factor(1.0, 0.0);
    for (int i = 0; i < p.dim - 2; ++i) {
        const int ji = mode.j_multi[static_cast<std::size_t>(i)];
        factor *= std::pow(zprime[static_cast<std::size_t>(i)], ji) *
                  std::pow(std::conj(wprime[static_cast<std::size_t>(i)]), ji);
    }
    factor *= std::pow(zn, mode.k) * std::pow(std::conj(wn), mode.k);
    const double half_power = 0.5 * (mode.j_abs + p.dim);
    factor *= std::exp(-half_power * logz1) * std::conj(std::exp(-half_power * logw1));
    return ks.value * factor;
}

double reproducing_check_fn(const std::function<cplx(cplx)>& f_eval, cplx w,
                            const ModeIndex& mode, const WormParams& p, double trunc_x,
                            const ReproducingConfig& cfg) {
    require_strip(w, p, "w");
    const weight::WeightSpec spec = weight::make_weight_spec(mode, p);

    // y nodes split at the weight's kinks
    std::vector<double> ynodes, yweights;
    {
        const auto kinks = spec.interior_kinks();
        const int segments = static_cast<int>(kinks.size()) + 1;
        const int panels = std::max(2, cfg.y_nodes / (16 * segments));
        quad::split_nodes(spec.support_lo(), spec.support_hi(), kinks, panels, 16, ynodes,
                          yweights);
    }
    std::vector<double> wvals(ynodes.size());
    for (std::size_t i = 0; i < ynodes.size(); ++i) wvals[i] = weight_direct(ynodes[i], spec);

    // square-integrability guard: the weighted mass of f must decay at the cutoff
    {
        double boundary = 0.0, interior = 0.0;
        for (std::size_t i = 0; i < ynodes.size(); ++i) {
            const cplx zb1 = cplx(trunc_x, ynodes[i]);
            const cplx zb2 = cplx(-trunc_x, ynodes[i]);
            boundary = std::max(boundary, std::norm(f_eval(zb1)) * wvals[i]);
            boundary = std::max(boundary, std::norm(f_eval(zb2)) * wvals[i]);
            interior = std::max(interior, std::norm(f_eval(cplx(w.real(), ynodes[i]))) * wvals[i]);
        }
        if (boundary > cfg.boundary_tol * std::max(interior, 1e-300))
            throw numeric_error(
                "norm-divergence: weighted mass of the test function does not decay at the "
                "truncation boundary");
    }

    // x nodes
    std::vector<double> xnodes, xweights;
    {
        const int panels = std::max(4, static_cast<int>(std::ceil(2.0 * trunc_x / cfg.x_panel)));
        const auto& rule = quad::gauss_legendre(cfg.x_order);
        const double h = 2.0 * trunc_x / panels;
        for (int pn = 0; pn < panels; ++pn) {
            const double mid = -trunc_x + (pn + 0.5) * h;
            for (int q = 0; q < cfg.x_order; ++q) {
                xnodes.push_back(mid + 0.5 * h * rule.nodes[q]);
                xweights.push_back(0.5 * h * rule.weights[q]);
            }
        }
    }

    const auto kgrid = strip_kernel_grid(xnodes, ynodes, w, mode, p, cfg.kernel);

    quad::KahanSum acc_re, acc_im;
    for (std::size_t iy = 0; iy < ynodes.size(); ++iy) {
        if (wvals[iy] == 0.0) continue;
        for (std::size_t ix = 0; ix < xnodes.size(); ++ix) {
            const cplx zeta(xnodes[ix], ynodes[iy]);
            const cplx term = xweights[ix] * yweights[iy] * wvals[iy] * f_eval(zeta) *
                              std::conj(kgrid[ix][iy].value);
            acc_re.add(term.real());
            acc_im.add(term.imag());
        }
    }
    const cplx integral(acc_re.value(), acc_im.value());
    const cplx fw = f_eval(w);
    if (std::abs(fw) == 0.0) throw validation_error("f(w) vanishes; relative error undefined");
    return std::abs(integral - fw) / std::abs(fw);
}

double reproducing_check(const Gaussian& f, cplx w, const ModeIndex& mode, const WormParams& p,
                         const ReproducingConfig& cfg) {
    const double trunc_x = 6.0 / f.scale + std::abs(f.center.real());
    auto eval = [f](cplx z) {
        const cplx t = f.scale * (z - f.center);
        return std::exp(-t * t);
    };
    return reproducing_check_fn(eval, w, mode, p, trunc_x, cfg);
}

cplx mode_project(const std::function<cplx(const CPoint&)>& f, const CPoint& base,
                  const ModeIndex& mode, const WormParams& p, int grid_per_axis) {
    if (static_cast<int>(mode.j_multi.size()) != p.dim - 2)
        throw validation_error("mode multi-index length must equal dim - 2");
    int max_freq = std::abs(mode.k);
    for (int ji : mode.j_multi) max_freq = std::max(max_freq, std::abs(ji));
    if (grid_per_axis < 4 * (max_freq + 1))
        throw validation_error("torus grid under-resolves the requested mode frequency");

    const int axes = p.dim - 1;  // n-2 angles for z', one for zn
    const int n_grid = grid_per_axis;
    std::vector<int> idx(static_cast<std::size_t>(axes), 0);
    cplx acc(0.0, 0.0);
    const double step = 2.0 * kPi / n_grid;
    CPoint zt = base;
    while (true) {
        double phase = 0.0;
        for (int a = 0; a < axes - 1; ++a) {
            const double s = idx[static_cast<std::size_t>(a)] * step;
            zt.zprime[static_cast<std::size_t>(a)] =
                base.zprime[static_cast<std::size_t>(a)] * std::polar(1.0, s);
            phase += mode.j_multi[static_cast<std::size_t>(a)] * s;
        }
        const double t = idx[static_cast<std::size_t>(axes - 1)] * step;
        zt.zn = base.zn * std::polar(1.0, t);
        phase += mode.k * t;
        acc += f(zt) * std::polar(1.0, -phase);
        int a = 0;
        for (; a < axes; ++a) {
            if (++idx[static_cast<std::size_t>(a)] < n_grid) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
        if (a == axes) break;
    }
    double cells = 1.0;
    for (int a = 0; a < axes; ++a) cells *= n_grid;
    return acc / cells;
}

}  // namespace worm::kernel
