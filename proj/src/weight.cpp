#include "worm/weight.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "worm/quadrature.hpp"

namespace worm::weight {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRemovableRadius = 1e-4;
constexpr int kSeriesOrder = 6;  // local Taylor terms m = 0..6

// first-order complex dual for analytic derivatives through the closed form
struct Jet {
    cplx v;
    cplx d;
};

[[maybe_unused]] Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d + b.d}; }
[[maybe_unused]] Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d - b.d}; }
Jet operator*(const Jet& a, const Jet& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Jet operator/(const Jet& a, const Jet& b) {
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}
Jet operator+(const Jet& a, cplx c) { return {a.v + c, a.d}; }
Jet operator-(const Jet& a, cplx c) { return {a.v - c, a.d}; }
Jet operator-(cplx c, const Jet& a) { return {c - a.v, -a.d}; }
Jet operator*(cplx c, const Jet& a) { return {c * a.v, c * a.d}; }
[[maybe_unused]] Jet operator*(const Jet& a, cplx c) { return {a.v * c, a.d * c}; }
[[maybe_unused]] Jet operator/(const Jet& a, cplx c) { return {a.v / c, a.d / c}; }

cplx texp(cplx z) { return std::exp(z); }
Jet texp(const Jet& a) {
    cplx e = std::exp(a.v);
    return {e, e * a.d};
}

cplx value_of(cplx z) { return z; }
cplx value_of(const Jet& z) { return z.v; }

double ipow(double base, int e) {
    double r = 1.0, b = base;
    for (int n = e; n > 0; n >>= 1, b *= b)
        if (n & 1) r *= b;
    return r;
}

cplx minus_i_pow(int e) {
    switch (((e % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, -1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, 1.0};
    }
}

// (e^{i pi xi} - (-1)^j) / (xi - r0) near a cancelled denominator root r0:
// (-1)^j * sum_m (i pi)^{m+1} delta^m / (m+1)!
template <class T>
T cosine_pair_series(const T& delta, int j) {
    const cplx ipi(0.0, kPi);
    cplx coef[kSeriesOrder + 1];  // coef[m] = (i pi)^{m+1} / (m+1)!
    cplx c = ipi;
    double fact = 1.0;
    for (int m = 0; m <= kSeriesOrder; ++m) {
        fact *= (m + 1);
        coef[m] = c / fact;
        c *= ipi;
    }
    T acc = T{} + coef[kSeriesOrder];
    for (int m = kSeriesOrder - 1; m >= 0; --m) acc = acc * delta + coef[m];
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    return cplx(sign, 0.0) * acc;
}

// (e^{2 a w} - 1) / w = 2a * sum_m (2 a w)^m / (m+1)!
template <class T>
T annulus_series(const T& w, double a) {
    const double twoa = 2.0 * a;
    double coef[kSeriesOrder + 1];
    double pw = twoa, fact = 1.0;
    for (int m = 0; m <= kSeriesOrder; ++m) {
        fact *= (m + 1);
        coef[m] = pw / fact;
        pw *= twoa;
    }
    T acc = T{} + cplx(coef[kSeriesOrder], 0.0);
    for (int m = kSeriesOrder - 1; m >= 0; --m) acc = acc * w + cplx(coef[m], 0.0);
    return acc;
}

template <class T>
T transform_impl(const T& xi, const WeightSpec& s, bool* removable) {
    const int j = s.cos_power;
    const double a = std::log(s.params.beta);
    const double alpha = s.params.alpha;
    const cplx xiv = value_of(xi);
    bool rem = false;

    // cosine-block: (e^{i pi xi} - (-1)^j) / prod_s (xi + j - 2s)
    // denominator roots at 2s - j, all cancelled by numerator zeros
    int near_root = 0;
    bool has_near = false;
    {
        double rr = std::round((xiv.real() + j) / 2.0) * 2.0 - j;
        rr = std::clamp(rr, double(-j), double(j));
        if (std::abs(xiv - cplx(rr, 0.0)) < kRemovableRadius) {
            has_near = true;
            near_root = static_cast<int>(std::lround(rr));
        }
    }
    T cos_factor = T{} + cplx(1.0, 0.0);
    if (has_near) {
        rem = true;
        T delta = xi - cplx(double(near_root), 0.0);
        cos_factor = cosine_pair_series(delta, j);
        for (int sidx = 0; sidx <= j; ++sidx) {
            int c = j - 2 * sidx;
            if (-c == near_root) continue;
            cos_factor = cos_factor / (xi + cplx(double(c), 0.0));
        }
    } else {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        T num = texp(cplx(0.0, kPi) * xi) - cplx(sign, 0.0);
        T den = T{} + cplx(1.0, 0.0);
        for (int sidx = 0; sidx <= j; ++sidx) den = den * (xi + cplx(double(j - 2 * sidx), 0.0));
        cos_factor = num / den;
    }

    // annulus factor (e^{2(k+1-i alpha xi) ln beta} - 1) / (k+1-i alpha xi)
    T w = cplx(double(s.mode.k + 1), 0.0) - cplx(0.0, alpha) * xi;
    T ann = T{} + cplx(0.0, 0.0);
    if (std::abs(value_of(w)) < kRemovableRadius) {
        rem = true;
        ann = annulus_series(w, a);
    } else {
        ann = (texp(cplx(2.0 * a, 0.0) * w) - cplx(1.0, 0.0)) / w;
    }

    T pre = texp(cplx(0.0, -0.5 * kPi) * xi);
    if (removable) *removable = rem;
    return dnj_constant(s) * (pre * cos_factor * ann);
}

}  // namespace

double cnj_constant(int dim, const std::vector<int>& j_multi) {
    if (dim < 3) throw validation_error("dimension must satisfy n >= 3");
    if (static_cast<int>(j_multi.size()) != dim - 2)
        throw validation_error("multi-index J must have length dim - 2");
    int j_abs = 0;
    double lg = 0.0;
    for (int ji : j_multi) {
        if (ji < 0) throw validation_error("multi-index J must be nonnegative");
        j_abs += ji;
        lg += std::lgamma(ji + 1.0);
    }
    lg -= std::lgamma(double(j_abs + dim - 2) + 1.0);
    return std::pow(2.0 * kPi, dim - 1) * std::pow(2.0, 1 - dim) * std::exp(lg);
}

double WeightSpec::support_lo() const { return -0.5 * kPi; }
double WeightSpec::support_hi() const { return winding() + 0.5 * kPi; }

std::vector<double> WeightSpec::interior_kinks() const {
    std::vector<double> ks{0.5 * kPi, winding() - 0.5 * kPi};
    std::sort(ks.begin(), ks.end());
    if (std::abs(ks[0] - ks[1]) < 1e-12) ks.pop_back();
    std::vector<double> out;
    for (double k : ks)
        if (k > support_lo() + 1e-12 && k < support_hi() - 1e-12) out.push_back(k);
    return out;
}

WeightSpec make_weight_spec(const ModeIndex& mode, const WormParams& params) {
    return make_weight_spec(mode, params, cnj_constant(params.dim, mode.j_multi));
}

WeightSpec make_weight_spec(const ModeIndex& mode, const WormParams& params, double c_nj_override) {
    if (static_cast<int>(mode.j_multi.size()) != params.dim - 2)
        throw validation_error("mode multi-index length must equal dim - 2");
    if (!(c_nj_override > 0.0)) throw validation_error("c_nj must be positive");
    WeightSpec s;
    s.mode = mode;
    s.params = params;
    s.c_nj = c_nj_override;
    s.cos_power = mode.j_abs + params.dim - 2;
    return s;
}

double weight_direct(double theta1, const WeightSpec& s, const WeightQuadConfig& q) {
    const double alpha = s.params.alpha;
    const double a = std::log(s.params.beta);
    const double t_lo = std::max(0.0, (theta1 - 0.5 * kPi) / alpha);
    const double t_hi = std::min(2.0 * a, (theta1 + 0.5 * kPi) / alpha);
    if (!(t_lo < t_hi)) return 0.0;
    const int j = s.cos_power;
    const double ke = s.mode.k + 1.0;
    auto f = [&](double t) { return ipow(std::cos(theta1 - alpha * t), j) * std::exp(ke * t); };
    const int panels = std::max(2, static_cast<int>(std::ceil((t_hi - t_lo) / q.max_panel)));
    return s.c_nj * quad::integrate(f, t_lo, t_hi, panels, q.order);
}

cplx dnj_constant(const WeightSpec& s) {
    const int j = s.cos_power;
    return s.c_nj * minus_i_pow(j + 1) * std::tgamma(j + 1.0) / std::sqrt(2.0 * kPi);
}

TransformValue weight_fourier_closed(cplx xi, const WeightSpec& spec) {
    TransformValue tv;
    tv.xi = xi;
    tv.value = transform_impl<cplx>(xi, spec, &tv.removable);
    return tv;
}

cplx transform_m2i(cplx zeta, const WeightSpec& spec) {
    return transform_impl<cplx>(cplx(0.0, -2.0) * zeta, spec, nullptr);
}

ValueDeriv transform_m2i_jet(cplx zeta, const WeightSpec& spec) {
    Jet xi{cplx(0.0, -2.0) * zeta, cplx(0.0, -2.0)};
    Jet r = transform_impl<Jet>(xi, spec, nullptr);
    return {r.v, r.d};
}

LogC weight_laplace_log(double xi, const WeightSpec& s) {
    const int j = s.cos_power;
    const double a = std::log(s.params.beta);
    const double alpha = s.params.alpha;
    const bool even = (j % 2 == 0);

    // sqrt(2pi) * |D_nJ| and its phase
    double logmag = std::log(s.c_nj) + std::lgamma(j + 1.0);
    double phase = -0.5 * kPi * (j + 1);

    // e^{-pi xi} (e^{2 pi xi} - (-1)^j) = 2 sinh / 2 cosh (pi xi)
    bool pair_zero_root = false;
    if (even) {
        if (std::abs(xi) < kRemovableRadius) {
            // paired with the denominator root at 0: 2 sinh(pi xi)/(-2 i xi) = i pi sinhc(pi xi)
            pair_zero_root = true;
            const double x = kPi * xi;
            const double sinhc = 1.0 + (x * x / 6.0) * (1.0 + x * x / 20.0);
            logmag += std::log(kPi * sinhc);
            phase += 0.5 * kPi;
        } else {
            logmag += kPi * std::abs(xi) + std::log1p(-std::exp(-2.0 * kPi * std::abs(xi)));
            if (xi < 0.0) phase += kPi;
        }
    } else {
        logmag += kPi * std::abs(xi) + std::log1p(std::exp(-2.0 * kPi * std::abs(xi)));
    }

    // annulus factor (e^{2 a w2} - 1)/w2 with w2 = k+1 - 2 alpha xi; positive for all real w2
    const double w2 = (s.mode.k + 1.0) - 2.0 * alpha * xi;
    const double x2 = 2.0 * a * w2;
    if (std::abs(w2) < kRemovableRadius) {
        double sum = 0.0, pw = 1.0, fact = 1.0;
        for (int m = 0; m <= kSeriesOrder; ++m) {
            fact *= (m + 1);
            sum += pw / fact;
            pw *= x2;
        }
        logmag += std::log(2.0 * a * sum);
    } else if (x2 > 700.0) {
        logmag += x2 + std::log1p(-std::exp(-x2)) - std::log(std::abs(w2));
    } else if (x2 < -700.0) {
        logmag += -std::log(std::abs(w2));
    } else {
        logmag += std::log(std::expm1(x2) / w2);
    }

    // denominator prod_s ((j - 2s) - 2 i xi)
    for (int sidx = 0; sidx <= j; ++sidx) {
        const int c = j - 2 * sidx;
        if (c == 0 && pair_zero_root) continue;
        logmag -= 0.5 * std::log(double(c) * c + 4.0 * xi * xi);
        phase -= std::atan2(-2.0 * xi, double(c));
    }
    return {logmag, phase};
}

}  // namespace worm::weight
