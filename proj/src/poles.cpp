#include "worm/poles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "worm/quadrature.hpp"

namespace worm::poles {

namespace {

constexpr double kPi = std::numbers::pi;

// cosine-factor zero heights: h i with h in (j/2 + Z), |h| >= (|J|+n)/2
double min_cosine_height(const ModeIndex& mode, const WormParams& p) {
    return 0.5 * (mode.j_abs + p.dim);
}

bool cosine_heights_half_integer(const ModeIndex& mode, const WormParams& p) {
    return (mode.j_abs + p.dim) % 2 != 0;
}

double annulus_real_part(const ModeIndex& mode, const WormParams& p) {
    return (mode.k + 1.0) / (2.0 * p.alpha);
}

double dist_to_rect_boundary(cplx z, const Rect& r) {
    const double d1 = std::abs(z.real() - r.re_lo);
    const double d2 = std::abs(z.real() - r.re_hi);
    const double d3 = std::abs(z.imag() - r.im_lo);
    const double d4 = std::abs(z.imag() - r.im_hi);
    return std::min(std::min(d1, d2), std::min(d3, d4));
}

}  // namespace

PoleSet poles_predicted(const ModeIndex& mode, const WormParams& p, const Rect& region) {
    PoleSet set;
    set.search_region = region;

    std::vector<Pole> cosine, annulus;
    const double hmin = min_cosine_height(mode, p);
    if (region.re_lo <= 0.0 && region.re_hi >= 0.0) {
        // march the height grid outward in both directions from the first
        // uncancelled height
        for (double h = hmin; h <= region.im_hi + 1e-12; h += 1.0) {
            if (h >= region.im_lo - 1e-12)
                cosine.push_back({cplx(0.0, h), PoleSource::CosineFactor, 1, 0.0});
        }
        for (double h = -hmin; h >= region.im_lo - 1e-12; h -= 1.0) {
            if (h <= region.im_hi + 1e-12)
                cosine.push_back({cplx(0.0, h), PoleSource::CosineFactor, 1, 0.0});
        }
    }
    const double re_a = annulus_real_part(mode, p);
    if (region.re_lo - 1e-12 <= re_a && re_a <= region.re_hi + 1e-12) {
        const int m_lo = static_cast<int>(std::floor(region.im_lo / p.nu - 1e-9));
        const int m_hi = static_cast<int>(std::ceil(region.im_hi / p.nu + 1e-9));
        for (int m = m_lo; m <= m_hi; ++m) {
            if (m == 0) continue;
            const cplx z(re_a, m * p.nu);
            if (region.contains(z, 1e-12))
                annulus.push_back({z, PoleSource::AnnulusFactor, 1, 0.0});
        }
    }

    // merge coincidences as multiplicity-2 entries
    for (auto& c : cosine) {
        for (auto it = annulus.begin(); it != annulus.end(); ++it) {
            if (std::abs(it->location - c.location) < 1e-9) {
                c.multiplicity = 2;
                annulus.erase(it);
                break;
            }
        }
        set.poles.push_back(c);
    }
    for (auto& a : annulus) set.poles.push_back(a);
    std::sort(set.poles.begin(), set.poles.end(), [](const Pole& a, const Pole& b) {
        if (a.location.imag() != b.location.imag()) return a.location.imag() < b.location.imag();
        return a.location.real() < b.location.real();
    });
    return set;
}

int argument_principle_count(const weight::WeightSpec& spec, const Rect& region,
                             int total_nodes, double pad) {
    // clearance check: predicted zeros must stay away from the padded contour
    PoleSet predicted = poles_predicted(spec.mode, spec.params,
                                        Rect{region.re_lo - 1.0, region.re_hi + 1.0,
                                             region.im_lo - 1.0, region.im_hi + 1.0});
    Rect padded{region.re_lo - pad, region.re_hi + pad, region.im_lo - pad, region.im_hi + pad};
    for (int attempt = 0; attempt < 8; ++attempt) {
        bool clear = true;
        for (const auto& z : predicted.poles)
            if (dist_to_rect_boundary(z.location, padded) < 0.45 * pad) clear = false;
        if (clear) break;
        pad *= 1.9;
        padded = Rect{region.re_lo - pad, region.re_hi + pad, region.im_lo - pad, region.im_hi + pad};
    }

    const cplx corners[5] = {{padded.re_lo, padded.im_lo},
                             {padded.re_hi, padded.im_lo},
                             {padded.re_hi, padded.im_hi},
                             {padded.re_lo, padded.im_hi},
                             {padded.re_lo, padded.im_lo}};
    double perimeter = 0.0;
    for (int s = 0; s < 4; ++s) perimeter += std::abs(corners[s + 1] - corners[s]);

    cplx integral(0.0, 0.0);
    const int order = 16;
    for (int s = 0; s < 4; ++s) {
        const cplx a = corners[s], b = corners[s + 1];
        const double len = std::abs(b - a);
        int panels = std::max(4, static_cast<int>(std::lround(
                                     total_nodes * (len / perimeter) / order)));
        const auto& rule = quad::gauss_legendre(order);
        const cplx dir = (b - a) / 2.0;
        for (int pn = 0; pn < panels; ++pn) {
            const double c0 = (2.0 * pn + 1.0) / panels - 1.0;  // panel center in [-1,1]
            const double hw = 1.0 / panels;
            for (int q = 0; q < order; ++q) {
                const double t = c0 + hw * rule.nodes[q];
                const cplx z = (a + b) / 2.0 + dir * t;
                const auto vd = weight::transform_m2i_jet(z, spec);
                integral += rule.weights[q] * hw * dir * (vd.deriv / vd.value);
            }
        }
    }
    const cplx count = integral / cplx(0.0, 2.0 * kPi);
    const double n_real = count.real();
    const long n = std::lround(n_real);
    if (std::abs(n_real - n) > 0.05 || std::abs(count.imag()) > 0.05)
        throw numeric_error("argument-principle contour integral did not converge to an integer");
    return static_cast<int>(n);
}

PoleSet poles_numeric(const ModeIndex& mode, const WormParams& p, const Rect& region, double tol) {
    if (!(tol > 0.0)) throw validation_error("tol must be positive");
    const weight::WeightSpec spec = weight::make_weight_spec(mode, p);
    PoleSet predicted = poles_predicted(mode, p, region);

    PoleSet refined;
    refined.search_region = region;
    for (const Pole& seed : predicted.poles) {
        cplx z = seed.location;
        cplx prev = z + cplx(1e-4, 1e-4);
        auto vd = weight::transform_m2i_jet(z, spec);
        for (int it = 0; it < 60 && std::abs(vd.value) >= tol * 1e-3; ++it) {
            cplx step;
            if (std::abs(vd.deriv) > 1e-250) {
                step = double(seed.multiplicity) * vd.value / vd.deriv;
            } else {
                // secant fallback
                const cplx fprev = weight::transform_m2i(prev, spec);
                step = vd.value * (z - prev) / (vd.value - fprev);
            }
            prev = z;
            z -= step;
            vd = weight::transform_m2i_jet(z, spec);
        }
        if (std::abs(vd.value) > tol)
            throw numeric_error("Newton refinement failed to reach |G| < tol at a predicted zero");
        if (!region.contains(z, 0.05))
            throw numeric_error("refined zero escaped the search region");
        refined.poles.push_back({z, seed.source, seed.multiplicity, std::abs(vd.value)});
    }

    int predicted_count = 0;
    for (const auto& q : predicted.poles) predicted_count += q.multiplicity;
    const int counted = argument_principle_count(spec, region);
    if (counted != predicted_count)
        throw numeric_error("argument-principle count (" + std::to_string(counted) +
                            ") does not match the predicted zero count (" +
                            std::to_string(predicted_count) + ")");
    return refined;
}

std::vector<DoublePoleHit> double_pole_detect(const ModeIndex& mode, const WormParams& p) {
    std::vector<DoublePoleHit> hits;
    const double re_a = annulus_real_part(mode, p);
    const double dmax = 2.0 * (p.nu + p.dim);
    const double hmin = min_cosine_height(mode, p);
    const bool half = cosine_heights_half_integer(mode, p);
    const int m_max = static_cast<int>(std::ceil(dmax / p.nu));
    for (int m = -m_max; m <= m_max; ++m) {
        if (m == 0) continue;
        const cplx za(re_a, m * p.nu);
        // nearest cosine height of the right parity
        double h = std::round(za.imag() - (half ? 0.5 : 0.0)) + (half ? 0.5 : 0.0);
        if (std::abs(h) < hmin - 1e-12) continue;
        if (std::abs(za - cplx(0.0, h)) < 1e-9) {
            const int m_cos = static_cast<int>(std::lround(h - (half ? 0.5 : 0.0)));
            hits.push_back({za, m_cos, m});
        }
    }
    return hits;
}

double next_pole_depth(const ModeIndex& mode, const WormParams& p) {
    const double nu = p.nu;
    const double hmin = min_cosine_height(mode, p);
    double next_depth = 2.0 * nu;  // annulus m = -2
    for (double h = hmin; h <= nu + 2.0; h += 1.0)
        if (h > nu + 1e-12) {
            next_depth = std::min(next_depth, h);
            break;
        }
    return next_depth;
}

ResidueExpansion residue_series(const ModeIndex& mode, const WormParams& p, double depth_epsilon) {
    const weight::WeightSpec spec = weight::make_weight_spec(mode, p);
    const double nu = p.nu;
    const int n = p.dim;

    const double next_depth = next_pole_depth(mode, p);
    double eps = depth_epsilon;
    if (!(eps > 0.0)) eps = std::min(0.1, 0.5 * (next_depth - nu));
    if (!(nu + eps < next_depth - 1e-12))
        throw validation_error("contour depth nu + eps crosses the next pole; shrink epsilon");
    const double depth = nu + eps;

    // refuse double poles inside the band
    for (const auto& hit : double_pole_detect(mode, p))
        if (hit.location.imag() < 0.0 && -hit.location.imag() <= depth + 1e-12)
            throw numeric_error(
                "double pole in the residue band; logarithmic expansions are out of scope");

    const double re_a = annulus_real_part(mode, p);
    const Rect band{std::min(0.0, re_a) - 0.5, std::max(0.0, re_a) + 0.5, -depth, -1e-9};
    PoleSet poles = poles_numeric(mode, p, band, 1e-12);

    ResidueExpansion ex;
    ex.mode = mode;
    ex.params = p;
    ex.remainder_order = depth;
    ex.depth = depth;

    int ann_count = 0;
    const double sqrt2pi = std::sqrt(2.0 * kPi);
    std::sort(poles.poles.begin(), poles.poles.end(), [](const Pole& a, const Pole& b) {
        return -a.location.imag() < -b.location.imag();  // shallow first
    });
    for (const Pole& q : poles.poles) {
        if (q.multiplicity != 1)
            throw numeric_error("double pole in the residue band; refused");
        const auto vd = weight::transform_m2i_jet(q.location, spec);
        if (std::abs(vd.deriv) <= 1e-6)
            throw numeric_error("zero in the residue band is not verifiably simple (|G'| <= 1e-6)");
        // shifting the inversion contour down collects -2 pi i times the
        // residue e^{i u zeta0} / G'(zeta0), scaled by the kernel prefactor
        const cplx coeff = cplx(0.0, -1.0) / (sqrt2pi * vd.deriv);
        const cplx expnt = cplx(0.0, 1.0) * q.location;  // term is coeff e^{expnt (z - wbar)}
        if (q.source == PoleSource::CosineFactor) {
            ResidueTerm t;
            t.exponent = expnt.real();
            t.ell = static_cast<int>(std::lround(t.exponent - 0.5 * n));
            t.coeff = coeff;
            ex.discrete_terms.push_back(t);
        } else {
            ++ann_count;
            if (ann_count > 1)
                throw numeric_error("band contains more than one annulus pole; shrink epsilon");
            ex.winding_term.coeff = coeff;
            ex.winding_term.exponent = expnt;
        }
    }
    if (ann_count == 0) throw numeric_error("winding pole not found in the residue band");
    return ex;
}

}  // namespace worm::poles
