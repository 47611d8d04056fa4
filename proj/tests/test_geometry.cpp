#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "worm/geometry.hpp"
#include "worm/oracle.hpp"

using namespace worm;
using geometry::defining_function;

namespace {

const double kE = std::exp(1.0);

CPoint random_point(const WormParams& p, std::uint64_t seed, double rn_lo = 1.05,
                    double rn_hi = 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CPoint z;
    z.z1 = cplx(u(rng), u(rng));
    z.zprime.assign(static_cast<std::size_t>(p.dim - 2), cplx(0.0, 0.0));
    for (auto& v : z.zprime) v = 0.7 * cplx(u(rng), u(rng));
    const double hi = rn_hi > 0.0 ? rn_hi : p.beta - 0.05;
    const double r = rn_lo + (hi - rn_lo) * 0.5 * (u(rng) + 1.0);
    z.zn = std::polar(r, std::numbers::pi * u(rng));
    return z;
}

}  // namespace

TEST_CASE("sigma cutoff") {
    CHECK(geometry::sigma(0.0, 5.0) == 0.0);
    CHECK(geometry::sigma(-5.0, 100.0) == 0.0);
    CHECK(geometry::sigma(1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    // flat at 0+: forward differences of orders 1..4 vanish as t -> 0+
    for (int order = 1; order <= 4; ++order) {
        double prev = 1e300;
        for (double h : {5e-2, 2e-2, 5e-3}) {
            double diff = 0.0;
            double binom = 1.0;
            for (int i = 0; i <= order; ++i) {
                const double sign = ((order - i) % 2 == 0) ? 1.0 : -1.0;
                diff += sign * binom * geometry::sigma(i * h, 3.0);
                binom = binom * (order - i) / (i + 1.0);
            }
            CHECK(std::abs(diff) <= prev);
            prev = std::abs(diff);
        }
        CHECK(prev < 1e-12);
    }
}

TEST_CASE("defining function anchor values") {
    for (int n : {3, 4}) {
        auto p = make_params(1.0, kE, 20.0, n);
        CPoint a{cplx(1.0, 0.0), std::vector<cplx>(static_cast<std::size_t>(n - 2), 0.0),
                 cplx(1.0, 0.0)};
        CHECK(defining_function(a, p) == doctest::Approx(-1.0).epsilon(1e-14));
        CPoint b{cplx(0.0, 0.0), std::vector<cplx>(static_cast<std::size_t>(n - 2), 0.0),
                 cplx(1.0, 0.0)};
        CHECK(std::abs(defining_function(b, p)) < 1e-14);
        const cplx center = std::polar(1.0, 2.0 * std::log(p.beta));
        CPoint c{2.0 * center, std::vector<cplx>(static_cast<std::size_t>(n - 2), 0.0),
                 cplx(p.beta, 0.0)};
        CHECK(std::abs(defining_function(c, p)) < 1e-12);

        CPoint bad = a;
        bad.zn = 0.0;
        CHECK_THROWS_AS(defining_function(bad, p), validation_error);
    }
}

TEST_CASE("hessian fixed entries and hermiticity") {
    auto p = make_params(0.8, 2.2, 30.0, 4);
    for (std::uint64_t s = 0; s < 20; ++s) {
        CPoint z = random_point(p, 1000 + s, 0.6, 2.6);
        auto h = geometry::complex_hessian(z, p);
        CHECK(h(0, 0) == cplx(1.0, 0.0));
        for (int i = 1; i < p.dim - 1; ++i) CHECK(h(i, i) == cplx(1.0, 0.0));
        for (int i = 0; i < p.dim; ++i)
            for (int j = 0; j < p.dim; ++j) CHECK(h(i, j) == std::conj(h(j, i)));
    }
}

TEST_CASE("hessian matches finite-difference oracle at 100 seeded points") {
    for (int n : {3, 4}) {
        auto p = make_params(1.0, kE, 20.0, n);
        for (std::uint64_t s = 0; s < 50; ++s) {
            CPoint z = random_point(p, 42 + s);  // 1 < |zn| < beta
            auto h = geometry::complex_hessian(z, p);
            auto f = oracle::finite_difference_hessian(z, p, 1e-4);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    CHECK(std::abs(h(i, j) - f(i, j)) <=
                          1e-6 * std::max(1.0, std::abs(f(i, j))));
        }
    }
}

TEST_CASE("rotational symmetry of r") {
    auto p = make_params(1.3, 2.0, 25.0, 4);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    for (int it = 0; it < 25; ++it) {
        CPoint z = random_point(p, 900 + static_cast<std::uint64_t>(it), 0.7, 2.4);
        const double r0 = defining_function(z, p);
        CPoint zr = z;
        for (auto& v : zr.zprime) v *= std::polar(1.0, u(rng));
        zr.zn *= std::polar(1.0, u(rng));
        CHECK(defining_function(zr, p) == doctest::Approx(r0).epsilon(1e-12));
    }
}

TEST_CASE("weak set carries vanishing tangential Levi eigenvalue") {
    for (int n : {3, 4}) {
        auto p = make_params(1.0, kE, 20.0, n);
        for (double rn : {1.2, 1.7, 2.5}) {
            CPoint z{cplx(0.0, 0.0), std::vector<cplx>(static_cast<std::size_t>(n - 2), 0.0),
                     std::polar(rn, 0.4)};
            auto rep = geometry::tangential_levi_min_eig(z, p);
            CHECK(std::abs(rep.min_tangential_eigenvalue) < 1e-10);
            CHECK(rep.tangent_dimension == n - 1);
            CHECK(rep.gradient_norm > 0.1);
        }
    }
}

TEST_CASE("generic boundary points are strongly pseudoconvex") {
    auto p = make_params(1.0, kE, 20.0, 3);
    int checked = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        CPoint z = geometry::boundary_sample(p, 5150, i);
        CHECK(std::abs(defining_function(z, p)) < 1e-10);  // boundary containment
        const double azn = std::abs(z.zn);
        if (geometry::distance_to_weak_set(z, p) > 0.1 && azn > 1.0 && azn < p.beta) {
            auto rep = geometry::tangential_levi_min_eig(z, p);
            CHECK(rep.min_tangential_eigenvalue > 0.0);
            ++checked;
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("pseudoconvexity scan") {
    auto p = make_params(1.0, kE, 20.0, 3);
    auto rep = geometry::pseudoconvexity_scan(p, 1500, 20260809);
    CHECK(rep.min_eig >= -1e-8);
    for (auto idx : rep.near_zero) CHECK(rep.samples[idx].dist_weak < 0.1);
    CHECK(rep.samples.size() == 1500);

    CHECK_THROWS_AS(make_params(1.0, kE, 1.0, 3), validation_error);  // M <= e^2 rejected
    CHECK_THROWS_AS(geometry::pseudoconvexity_scan(p, 0, 1), validation_error);
}

TEST_CASE("scaling frame roundtrip and scaled defining function") {
    auto p = make_params(1.0, kE, 20.0, 4);
    geometry::ScalingFrame fr(3.7);
    CPoint z = random_point(p, 31);
    CPoint back = fr.inverse(fr.apply(z));
    CHECK(std::abs(back.z1 - z.z1) < 1e-15);
    CHECK(std::abs(back.zprime[0] - z.zprime[0]) < 1e-15);

    // exact residual on the annulus
    for (std::uint64_t s = 0; s < 30; ++s) {
        CPoint q = random_point(p, 600 + s);  // 1 < |zn| < beta: sigma terms vanish
        for (double lambda : {1.0, 10.0, 100.0}) {
            auto sv = geometry::scaled_defining(lambda, q, p);
            const double residual = sv.r_lambda - sv.r_infinity;
            CHECK(std::abs(residual - std::norm(q.z1) / (4.0 * lambda * lambda)) <= 1e-12);
        }
    }

    // scaled value agrees with the direct evaluation lambda^2 r(tau^-1 z)
    for (double lambda : {1.0, 2.0, 5.0}) {
        CPoint q = random_point(p, 77);
        geometry::ScalingFrame f2(lambda);
        const double direct = lambda * lambda * defining_function(f2.inverse(q), p);
        CHECK(geometry::scaled_defining(lambda, q, p).r_lambda ==
              doctest::Approx(direct).epsilon(1e-10));
    }

    // monotone decrease in lambda on the annulus
    CPoint q = random_point(p, 99);
    double prev = geometry::scaled_defining(1.0, q, p).r_lambda;
    for (double lambda : {2.0, 4.0, 8.0, 16.0}) {
        const double cur = geometry::scaled_defining(lambda, q, p).r_lambda;
        CHECK(cur <= prev + 1e-14);
        prev = cur;
    }

    // outside the annulus r_lambda blows up
    CPoint out = q;
    out.zn = cplx(p.beta + 0.3, 0.0);
    CHECK(geometry::scaled_defining(40.0, out, p).r_lambda >
          geometry::scaled_defining(10.0, out, p).r_lambda);
    CHECK(geometry::scaled_defining(80.0, out, p).r_lambda > 1e3);
}

TEST_CASE("distance to weak set") {
    auto p = make_params(1.0, kE, 20.0, 3);
    CPoint z{cplx(0.0, 0.0), {cplx(0.0, 0.0)}, cplx(1.5, 0.0)};
    CHECK(geometry::distance_to_weak_set(z, p) == 0.0);
    z.zn = cplx(p.beta + 0.25, 0.0);
    CHECK(geometry::distance_to_weak_set(z, p) == doctest::Approx(0.25).epsilon(1e-12));
    z.z1 = cplx(0.3, 0.4);
    CHECK(geometry::distance_to_weak_set(z, p) ==
          doctest::Approx(std::sqrt(0.25 + 0.0625)).epsilon(1e-12));
}
