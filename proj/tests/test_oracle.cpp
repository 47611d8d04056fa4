#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "worm/oracle.hpp"
#include "worm/quadrature.hpp"
#include "worm/weight.hpp"

using namespace worm;

namespace {

const double kPi = std::numbers::pi;
const double kE = std::exp(1.0);

oracle::SampledFunction sample(const std::function<double(double)>& f, double a, double b,
                               std::size_t count) {
    oracle::SampledFunction s;
    s.start = a;
    s.step = (b - a) / static_cast<double>(count - 1);
    s.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) s.values[i] = f(a + s.step * i);
    return s;
}

}  // namespace

TEST_CASE("gaussian is its own transform") {
    auto g = sample([](double t) { return std::exp(-0.5 * t * t); }, -12.0, 12.0, 4001);
    for (double xi : {0.0, 1.0, 2.0}) {
        auto r = oracle::numeric_fourier(g, xi);
        CHECK(std::abs(r.value - std::exp(-0.5 * xi * xi)) < 1e-8);
        CHECK_FALSE(r.support_clipped);
    }
}

TEST_CASE("box transform") {
    const double a = 1.0;
    auto box = sample([](double) { return 1.0; }, -a, a, 2001);
    for (double xi : {0.5, 1.0, 3.0}) {
        auto r = oracle::numeric_fourier(box, xi);
        const double expect = std::sqrt(2.0 / kPi) * std::sin(a * xi) / xi;
        CHECK(std::abs(r.value - expect) < 1e-8);
        CHECK(r.support_clipped);  // the box carries mass at the grid ends
    }
}

TEST_CASE("simpson convergence order on a smooth bump") {
    auto bump = [](double t) {
        const double u = 1.0 - t * t;
        return u > 0.0 ? u * u * u * u : 0.0;
    };
    const double xi = 2.0;
    std::vector<double> cuts{-1.0, 1.0};
    const cplx ref = oracle::fourier_segments(bump, cuts, xi, 32, 0.05);
    const double e1 =
        std::abs(oracle::numeric_fourier(sample(bump, -1.0, 1.0, 251), xi).value - ref);
    const double e2 =
        std::abs(oracle::numeric_fourier(sample(bump, -1.0, 1.0, 501), xi).value - ref);
    CHECK(e1 / std::max(e2, 1e-300) >= 4.0);
}

TEST_CASE("numeric fourier validates the closed transform") {
    auto p = make_params(1.0, kE, 20.0, 3);
    auto spec = weight::make_weight_spec(zero_mode(3, -2), p);
    auto w = [&](double y) { return weight::weight_direct(y, spec); };
    // uniform-grid oracle at moderate xi
    auto sf = sample(w, spec.support_lo(), spec.support_hi(), 8193);
    for (double xi : {0.0, 1.3, 4.0}) {
        auto num = oracle::numeric_fourier(sf, xi);
        auto closed = weight::weight_fourier_closed(cplx(xi, 0.0), spec);
        CHECK(std::abs(num.value - closed.value) < 1e-6 * std::abs(closed.value) + 1e-9);
    }
}

TEST_CASE("strip inner product") {
    auto p = make_params(1.0, kE, 20.0, 4);
    auto spec = weight::make_weight_spec(zero_mode(4, -2), p);
    auto f = [](cplx z) { return std::exp(-z * z); };
    auto g = [](cplx z) { return std::exp(-(z - cplx(0.3, 0.0)) * (z - cplx(0.3, 0.0))); };

    const cplx ff = oracle::strip_inner_product(f, f, spec, 7.0);
    CHECK(ff.real() > 0.0);
    CHECK(std::abs(ff.imag()) < 1e-12 * ff.real());

    const cplx fg = oracle::strip_inner_product(f, g, spec, 7.5);
    const cplx gf = oracle::strip_inner_product(g, f, spec, 7.5);
    CHECK(std::abs(fg - std::conj(gf)) < 1e-12 * std::abs(fg));

    // 1D reduction: <f, f> = sqrt(pi/2) * int e^{2 y^2} W(y) dy
    const auto kinks = spec.interior_kinks();
    const double semi =
        std::sqrt(kPi / 2.0) *
        quad::integrate_split(
            [&](double y) { return std::exp(2.0 * y * y) * weight::weight_direct(y, spec); },
            spec.support_lo(), spec.support_hi(), kinks, 12, 16);
    CHECK(std::abs(ff.real() - semi) < 1e-8 * semi);

    // divergent integrand rejected
    auto osc = [](cplx z) { return std::exp(cplx(0.0, 2.0) * z); };
    CHECK_THROWS_AS(oracle::strip_inner_product(osc, osc, spec, 7.0), numeric_error);
}

TEST_CASE("dirichlet constant oracle") {
    CHECK(std::abs(oracle::dirichlet_constant(3, {0}) - kPi * kPi) < 1e-10 * kPi * kPi);
    const double c40 = std::pow(kPi, 3) / 2.0;
    CHECK(std::abs(oracle::dirichlet_constant(4, {0, 0}) - c40) < 1e-10 * c40);
    const double c41 = std::pow(kPi, 3) / 6.0;
    CHECK(std::abs(oracle::dirichlet_constant(4, {1, 0}) - c41) < 1e-10 * c41);
}

TEST_CASE("finite-difference hessian basics") {
    auto p = make_params(1.0, kE, 20.0, 3);
    CPoint z{cplx(0.4, 0.2), {cplx(-0.1, 0.3)}, cplx(1.4, -0.5)};
    // r is exactly quadratic in (x1, y1), so a wide stencil is exact for the
    // z1 z1bar entry and rounding stays at machine level
    auto hw = oracle::finite_difference_hessian(z, p, 0.05);
    CHECK(std::abs(hw(0, 0) - cplx(1.0, 0.0)) < 1e-8);
    auto h = oracle::finite_difference_hessian(z, p, 1e-4);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(h(i, j) - std::conj(h(j, i))) < 1e-10);
}
