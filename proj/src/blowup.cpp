#include "worm/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "worm/quadrature.hpp"

namespace worm::blowup {

namespace {

constexpr double kPi = std::numbers::pi;

struct KernelTerm {
    cplx coeff;  // kappa_j * falling factorial (w-part and derivative folded in)
    cplx power;  // z1 exponent b_j - m
};

// terms of d^m_{z1} K_{0,-2}(z, w) = zn^k * sum coeff * z1^{power}
std::vector<KernelTerm> derivative_terms(const poles::ResidueExpansion& ex,
                                         const SobolevParams& sp, KernelModel model,
                                         const TailConfig& cfg) {
    const WormParams& p = ex.params;
    const int n = p.dim;
    const double wn_abs = cfg.w_zn_abs > 0.0 ? cfg.w_zn_abs : std::sqrt(p.beta);
    if (!(wn_abs > 1.0 && wn_abs < p.beta))
        throw validation_error("|wn| must lie in the open annulus (1, beta)");
    const double ang = cfg.w_logz1.imag() - 2.0 * p.alpha * std::log(wn_abs);
    if (!(std::cos(ang) * std::exp(cfg.w_logz1.real()) > 0.0))
        throw validation_error("fixed w lies outside the model domain");

    auto make_term = [&](cplx strip_coeff, cplx strip_exp) {
        // K contribution: c e^{a (ln z1 - conj(ln w1))} * (z1^{-n/2} wbar1^{-n/2}) * wbar_n^k
        const cplx b = strip_exp - 0.5 * n;
        cplx kappa = strip_coeff * std::exp(-(strip_exp + 0.5 * n) * std::conj(cfg.w_logz1)) *
                     std::pow(wn_abs, ex.mode.k);
        cplx ff(1.0, 0.0);
        for (int i = 0; i < sp.m; ++i) ff *= b - double(i);
        return KernelTerm{kappa * ff, b - double(sp.m)};
    };

    std::vector<KernelTerm> terms;
    terms.push_back(make_term(ex.winding_term.coeff, ex.winding_term.exponent));
    if (model == KernelModel::ResidueSeries) {
        for (const auto& d : ex.discrete_terms)
            terms.push_back(make_term(d.coeff, cplx(d.exponent, 0.0)));
    }
    // drop terms annihilated by the derivative (integer powers below m)
    std::erase_if(terms, [](const KernelTerm& t) { return std::abs(t.coeff) < 1e-300; });
    if (terms.empty()) throw numeric_error("derivative annihilated every kernel term");
    return terms;
}

// radial pieces: integral over r1 in [lo, hi] of the full probe integrand
double probe_piece(const SobolevParams& sp, const ProbeRegion& region, const WormParams& params,
                   double lo, double hi, const std::vector<KernelTerm>& terms,
                   const TailConfig& cfg, bool use_modulus) {
    const int n = params.dim;
    const double pt = sp.p * sp.t_frac;
    // z'-ball closed form: volume factor pi^{n-2} Gamma(pt+1)/Gamma(pt+n-1) * R^{2(pt+n-2)}
    const double ball = std::pow(kPi, n - 2) * std::exp(std::lgamma(pt + 1.0) - std::lgamma(pt + n - 1.0));

    const double s_lo = 2.0 * std::log(region.ann_lo);
    const double s_hi = 2.0 * std::log(region.ann_hi);
    const int k = -2;  // probe integral is defined for mode (0, -2)

    const auto& rs = quad::gauss_legendre(cfg.order);
    const double v_lo = std::log(lo), v_hi = std::log(hi);
    const int v_panels = std::max(
        1, static_cast<int>(std::ceil((v_hi - v_lo) / std::log(2.0) * cfg.radial_panels_per_octave)));

    quad::KahanSum acc;
    const double hs = (s_hi - s_lo) / cfg.s_panels;
    const double hpsi = (0.5 * kPi) / cfg.psi_panels;  // [-pi/4, pi/4]
    const double hv = (v_hi - v_lo) / v_panels;
    for (int ips = 0; ips < cfg.s_panels; ++ips) {
        const double smid = s_lo + (ips + 0.5) * hs;
        for (int iq = 0; iq < cfg.order; ++iq) {
            const double sv = smid + 0.5 * hs * rs.nodes[iq];
            const double ws = 0.5 * hs * rs.weights[iq];
            const double theta_base = params.alpha * sv;  // 2 alpha ln r_n
            const double sfac = 0.5 * std::exp(0.5 * sv * (k * sp.p + 2.0));
            for (int ipp = 0; ipp < cfg.psi_panels; ++ipp) {
                const double pmid = -0.25 * kPi + (ipp + 0.5) * hpsi;
                for (int jq = 0; jq < cfg.order; ++jq) {
                    const double psi = pmid + 0.5 * hpsi * rs.nodes[jq];
                    const double wpsi = 0.5 * hpsi * rs.weights[jq];
                    const double cfac = std::pow(std::cos(psi), pt + n - 2);
                    const double theta1 = psi + theta_base;
                    for (int ipv = 0; ipv < v_panels; ++ipv) {
                        const double vmid = v_lo + (ipv + 0.5) * hv;
                        for (int kq = 0; kq < cfg.order; ++kq) {
                            const double v = vmid + 0.5 * hv * rs.nodes[kq];
                            const double wv = 0.5 * hv * rs.weights[kq];
                            double mag;
                            if (use_modulus) {
                                const auto& t0 = terms[0];
                                mag = std::abs(t0.coeff) * std::exp(t0.power.real() * v);
                            } else {
                                cplx ssum(0.0, 0.0);
                                for (const auto& t : terms)
                                    ssum += t.coeff * std::exp(t.power * cplx(v, theta1));
                                mag = std::abs(ssum);
                            }
                            // e^{v (pt + n)}: radial power and the dv Jacobian
                            const double val = sfac * cfac * std::exp(v * (pt + n)) *
                                               std::pow(mag, sp.p);
                            acc.add(ws * wpsi * wv * val);
                        }
                    }
                }
            }
        }
    }
    return 2.0 * kPi * ball * acc.value();
}

}  // namespace

SobolevParams make_sobolev(double p, double s) {
    if (!(p >= 1.0)) throw validation_error("p must satisfy p >= 1");
    if (!(s >= 0.0)) throw validation_error("s must satisfy s >= 0");
    SobolevParams sp;
    sp.p = p;
    sp.s = s;
    const double r = std::round(s);
    if (std::abs(s - r) < 1e-12) {
        sp.m = static_cast<int>(r);
        sp.t_frac = 0.0;
    } else {
        sp.m = static_cast<int>(std::ceil(s));
        sp.t_frac = sp.m - s;
    }
    return sp;
}

ProbeRegion make_probe_region(const WormParams& p, double delta) {
    double d = delta > 0.0 ? delta : std::min(0.05, (p.beta - 1.0) / 4.0);
    ProbeRegion r;
    r.delta = d;
    r.r1_max = d;
    r.angle_halfwidth = 0.25 * kPi;
    r.ann_lo = 1.0 + d;
    r.ann_hi = p.beta - d;
    if (!(r.ann_lo < r.ann_hi)) throw validation_error("probe annulus is empty; shrink delta");
    return r;
}

Threshold threshold_and_range(double p, const WormParams& params) {
    if (!(p >= 1.0)) throw validation_error("p must satisfy p >= 1");
    Threshold t;
    t.s_star = params.nu + params.dim * (1.0 / p - 0.5);
    const double ratio = params.nu / params.dim;  // = pi / (2 n alpha ln beta)
    t.has_lp_range = ratio < 0.5;
    if (t.has_lp_range) {
        t.p_min = 1.0 / (0.5 + ratio);
        t.p_max = 1.0 / (0.5 - ratio);
    }
    return t;
}

const char* classification_name(Classification c) {
    switch (c) {
        case Classification::Convergent: return "convergent";
        case Classification::LogDivergent: return "log-divergent";
        case Classification::PowerDivergent: return "power-divergent";
        default: return "inconclusive";
    }
}

double sobolev_tail_integral(const SobolevParams& sp, const ProbeRegion& region,
                             const WormParams& params, double eps,
                             const poles::ResidueExpansion& expansion, KernelModel model,
                             const TailConfig& cfg) {
    if (!(eps > 0.0 && eps < region.r1_max))
        throw validation_error("eps must lie in (0, delta)");
    if (expansion.mode.j_abs != 0 || expansion.mode.k != -2)
        throw validation_error("probe integral is defined for mode (0, -2)");
    const auto terms = derivative_terms(expansion, sp, model, cfg);
    return probe_piece(sp, region, params, eps, region.r1_max, terms, cfg, cfg.use_modulus);
}

std::vector<double> tail_integral_grid(const SobolevParams& sp, const ProbeRegion& region,
                                       const WormParams& params, std::span<const double> eps,
                                       const poles::ResidueExpansion& expansion, KernelModel model,
                                       const TailConfig& cfg) {
    std::vector<double> es(eps.begin(), eps.end());
    std::sort(es.begin(), es.end(), std::greater<double>());
    for (double e : es)
        if (!(e > 0.0 && e < region.r1_max))
            throw validation_error("every eps must lie in (0, delta)");
    const auto terms = derivative_terms(expansion, sp, model, cfg);
    std::vector<double> out;
    out.reserve(es.size());
    double running = probe_piece(sp, region, params, es[0], region.r1_max, terms, cfg,
                                 cfg.use_modulus);
    out.push_back(running);
    for (std::size_t i = 1; i < es.size(); ++i) {
        running += probe_piece(sp, region, params, es[i], es[i - 1], terms, cfg, cfg.use_modulus);
        out.push_back(running);
    }
    return out;
}

std::vector<double> default_eps_grid() {
    // one octave below 2^-4..2^-14 so the whole grid fits inside the default
    // probe radius delta = 0.05
    std::vector<double> eps;
    for (int j = 5; j <= 15; ++j) eps.push_back(std::ldexp(1.0, -j));
    return eps;
}

ScanRow classify_tail(const SobolevParams& sp, const ProbeRegion& region, const WormParams& params,
                      std::span<const double> eps, const poles::ResidueExpansion& expansion,
                      KernelModel model, const TailConfig& cfg, double slope_tol) {
    ScanRow row;
    row.p = sp.p;
    row.s = sp.s;
    row.s_star = threshold_and_range(sp.p, params).s_star;
    row.eps.assign(eps.begin(), eps.end());
    std::sort(row.eps.begin(), row.eps.end(), std::greater<double>());
    row.integral = tail_integral_grid(sp, region, params, row.eps, expansion, model, cfg);

    // increments between consecutive octaves, regressed on the octave index
    std::vector<double> xs, ys;
    const double scale = row.integral.back();
    for (std::size_t i = 0; i + 1 < row.integral.size(); ++i) {
        const double d = row.integral[i + 1] - row.integral[i];
        if (d > 1e-13 * scale && d > 0.0) {
            xs.push_back(static_cast<double>(i));
            ys.push_back(std::log2(d));
        }
    }
    if (xs.size() < row.integral.size() / 2) {
        row.cls = Classification::Convergent;  // increments at rounding level
        row.slope = 0.0;
        row.r_squared = 1.0;
        return row;
    }
    const auto fit = quad::linear_fit(xs, ys);
    row.slope = fit.slope;
    row.r_squared = fit.r_squared;
    double spread = 0.0;
    for (double y : ys) spread = std::max(spread, std::abs(y - ys.front()));
    const double span = xs.empty() ? 0.0 : xs.back() - xs.front();
    if (spread <= std::max(0.1, slope_tol * span)) {
        // increments constant across the octaves at the slope threshold's
        // resolution: the r-squared of a flat fit is meaningless, the growth
        // is logarithmic
        row.cls = Classification::LogDivergent;
    } else if (fit.r_squared < 0.9) {
        row.cls = Classification::Inconclusive;
    } else if (fit.slope > slope_tol) {
        row.cls = Classification::PowerDivergent;
    } else if (fit.slope < -slope_tol) {
        row.cls = Classification::Convergent;
    } else {
        row.cls = Classification::LogDivergent;
    }
    return row;
}

std::vector<ScanRow> divergence_scan(std::span<const double> p_grid, std::span<const double> s_grid,
                                     const WormParams& params, const ProbeRegion& region,
                                     KernelModel model, const TailConfig& cfg,
                                     std::span<const double> eps_grid) {
    std::vector<double> eps(eps_grid.begin(), eps_grid.end());
    if (eps.empty()) eps = default_eps_grid();
    const auto expansion = poles::residue_series(zero_mode(params.dim, -2), params, 0.0);
    std::vector<ScanRow> rows;
    for (double p : p_grid)
        for (double s : s_grid)
            rows.push_back(classify_tail(make_sobolev(p, s), region, params, eps, expansion, model,
                                         cfg));
    return rows;
}

LogFit log_divergence_fit(std::span<const double> eps, std::span<const double> integral) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        xs.push_back(std::log(1.0 / eps[i]));
        ys.push_back(integral[i]);
    }
    const auto fit = quad::linear_fit(xs, ys);
    return {fit.slope, fit.intercept, fit.r_squared};
}

Corollary2Result corollary2_check(double p, const WormParams& params, const ProbeRegion& region,
                                  const poles::ResidueExpansion& expansion, KernelModel model,
                                  const TailConfig& cfg) {
    if (!(p > 1.0)) throw validation_error("corollary test requires p > 1");
    Corollary2Result res;
    res.p = p;
    res.p_conj = p / (p - 1.0);
    const auto eps = default_eps_grid();
    res.cls_p = classify_tail(make_sobolev(p, 0.0), region, params, eps, expansion, model, cfg).cls;
    res.cls_conj =
        classify_tail(make_sobolev(res.p_conj, 0.0), region, params, eps, expansion, model, cfg).cls;
    auto div = [](Classification c) {
        return c == Classification::PowerDivergent || c == Classification::LogDivergent;
    };
    res.divergent = div(res.cls_p) || div(res.cls_conj);
    return res;
}

}  // namespace worm::blowup
