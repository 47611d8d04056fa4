#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "worm/blowup.hpp"
#include "worm/rational.hpp"

using namespace worm;
using blowup::Classification;

namespace {

const double kPi = std::numbers::pi;
const double kE = std::exp(1.0);

bool divergent(Classification c) {
    return c == Classification::PowerDivergent || c == Classification::LogDivergent;
}

}  // namespace

TEST_CASE("sobolev splitting s = m - t") {
    auto a = blowup::make_sobolev(2.0, 2.3);
    CHECK(a.m == 3);
    CHECK(a.t_frac == doctest::Approx(0.7).epsilon(1e-12));
    auto b = blowup::make_sobolev(2.0, 3.0);
    CHECK(b.m == 3);
    CHECK(b.t_frac == 0.0);
    CHECK_THROWS_AS(blowup::make_sobolev(0.5, 1.0), validation_error);
    CHECK_THROWS_AS(blowup::make_sobolev(2.0, -0.1), validation_error);
}

TEST_CASE("threshold and critical exponent range") {
    auto p4 = make_params(1.0, kE, 20.0, 4);
    CHECK(blowup::threshold_and_range(2.0, p4).s_star ==
          doctest::Approx(kPi / 2.0).epsilon(1e-14));

    auto p3 = make_params(1.0, kE, 20.0, 3);
    CHECK(blowup::threshold_and_range(1.0, p3).s_star ==
          doctest::Approx(kPi / 2.0 + 1.5).epsilon(1e-14));

    const auto t4 = blowup::threshold_and_range(2.0, p4);
    REQUIRE(t4.has_lp_range);  // n alpha ln beta = 4 > pi
    CHECK(t4.p_min == doctest::Approx(1.0 / (0.5 + kPi / 8.0)).epsilon(1e-14));
    CHECK(t4.p_max == doctest::Approx(1.0 / (0.5 - kPi / 8.0)).epsilon(1e-14));
    CHECK(t4.p_max == doctest::Approx(9.3196).epsilon(1e-4));

    // n alpha ln beta < pi: no critical pair
    auto p3s = make_params(1.0, std::exp(0.5), 20.0, 3);  // 3 * 0.5 = 1.5 < pi
    CHECK_FALSE(blowup::threshold_and_range(2.0, p3s).has_lp_range);
}

TEST_CASE("radial exponent identity in exact arithmetic") {
    // p nu + p t - p m + n - 1 - p n / 2 == p (nu - n/2 - m + t) + n - 1
    using rational::Rational;
    std::mt19937_64 rng(24601);
    std::uniform_int_distribution<int> num(-30, 30), den(1, 9), nn(3, 8), mm(0, 5);
    for (int it = 0; it < 50; ++it) {
        const Rational p(std::abs(num(rng)) + den(rng), den(rng));
        const Rational t(std::abs(num(rng)) % den(rng), den(rng));
        const Rational nu(num(rng), den(rng));
        const int n = nn(rng), m = mm(rng);
        const Rational lhs = p * nu + p * t - p * m + n - 1 - p * n / 2;
        const Rational rhs = p * (nu - Rational(n, 2) - m + t) + (n - 1);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("classifier slope equals p (s - s_star)") {
    auto p = make_params(1.0, kE, 20.0, 4);
    const auto region = blowup::make_probe_region(p);
    const auto ex = poles::residue_series(zero_mode(4, -2), p, 0.0);
    const auto eps = blowup::default_eps_grid();
    const double s_star = blowup::threshold_and_range(2.0, p).s_star;
    for (double s : {s_star - 0.3, s_star - 0.1, s_star + 0.1, s_star + 0.3}) {
        auto row = blowup::classify_tail(blowup::make_sobolev(2.0, s), region, p, eps, ex,
                                         blowup::KernelModel::LeadingTerm);
        CHECK(row.slope == doctest::Approx(2.0 * (s - s_star)).epsilon(1e-6));
        CHECK(row.cls == (s < s_star ? Classification::Convergent
                                     : Classification::PowerDivergent));
    }
}

TEST_CASE("log divergence exactly at the threshold") {
    auto p = make_params(1.0, kE, 20.0, 4);
    const auto region = blowup::make_probe_region(p);
    const auto ex = poles::residue_series(zero_mode(4, -2), p, 0.0);
    const auto eps = blowup::default_eps_grid();
    const double s_star = blowup::threshold_and_range(2.0, p).s_star;

    auto row = blowup::classify_tail(blowup::make_sobolev(2.0, s_star), region, p, eps, ex,
                                     blowup::KernelModel::ResidueSeries);
    CHECK(row.cls == Classification::LogDivergent);
    const auto fit = blowup::log_divergence_fit(row.eps, row.integral);
    CHECK(fit.r_squared > 0.99);
    CHECK(fit.a > 0.0);
}

TEST_CASE("deep convergence saturates") {
    auto p = make_params(1.0, kE, 20.0, 4);
    const auto region = blowup::make_probe_region(p);
    const auto ex = poles::residue_series(zero_mode(4, -2), p, 0.0);
    const auto eps = blowup::default_eps_grid();
    auto row = blowup::classify_tail(blowup::make_sobolev(2.0, 0.2), region, p, eps, ex,
                                     blowup::KernelModel::ResidueSeries);
    CHECK(row.cls == Classification::Convergent);
    const double total = row.integral.back();
    const std::size_t last = row.integral.size() - 1;
    CHECK(row.integral[last] - row.integral[last - 1] < 1e-8 * total);
}

TEST_CASE("monotone classification along the s grid") {
    auto p = make_params(1.0, kE, 20.0, 3);
    const auto region = blowup::make_probe_region(p);
    const double pp[1] = {2.0};
    std::vector<double> sgrid;
    const double s_star = blowup::threshold_and_range(2.0, p).s_star;
    for (double s = s_star - 0.25; s <= s_star + 0.25 + 1e-9; s += 0.05) sgrid.push_back(s);
    const auto rows =
        blowup::divergence_scan(pp, sgrid, p, region, blowup::KernelModel::ResidueSeries);
    bool seen_divergent = false;
    for (const auto& row : rows) {
        if (divergent(row.cls)) seen_divergent = true;
        if (seen_divergent) CHECK(divergent(row.cls));
    }
    CHECK(seen_divergent);
}

TEST_CASE("oscillation is harmless: modulus model changes I by a stable factor") {
    auto p = make_params(1.0, kE, 20.0, 4);
    const auto region = blowup::make_probe_region(p);
    const auto ex = poles::residue_series(zero_mode(4, -2), p, 0.0);
    const auto sp = blowup::make_sobolev(2.0, blowup::threshold_and_range(2.0, p).s_star);
    blowup::TailConfig plain, modulus;
    modulus.use_modulus = true;
    double ratio0 = 0.0;
    for (double eps : {1.0 / 64, 1.0 / 256, 1.0 / 1024, 1.0 / 4096}) {
        const double a = blowup::sobolev_tail_integral(sp, region, p, eps, ex,
                                                       blowup::KernelModel::LeadingTerm, plain);
        const double b = blowup::sobolev_tail_integral(sp, region, p, eps, ex,
                                                       blowup::KernelModel::LeadingTerm, modulus);
        const double ratio = b / a;
        if (ratio0 == 0.0)
            ratio0 = ratio;
        else
            CHECK(ratio == doctest::Approx(ratio0).epsilon(1e-9));
    }
    CHECK(ratio0 > 0.0);
}

TEST_CASE("residue-series and leading-term classifications agree off the boundary") {
    auto p = make_params(1.0, kE, 20.0, 3);  // has a discrete term at depth 1.5
    const auto region = blowup::make_probe_region(p);
    const auto ex = poles::residue_series(zero_mode(3, -2), p, 0.0);
    const auto eps = blowup::default_eps_grid();
    const double s_star = blowup::threshold_and_range(2.0, p).s_star;
    for (double ds : {-0.2, -0.1, 0.1, 0.2}) {
        auto lead = blowup::classify_tail(blowup::make_sobolev(2.0, s_star + ds), region, p, eps,
                                          ex, blowup::KernelModel::LeadingTerm);
        auto full = blowup::classify_tail(blowup::make_sobolev(2.0, s_star + ds), region, p, eps,
                                          ex, blowup::KernelModel::ResidueSeries);
        CHECK(lead.cls == full.cls);
    }
}

TEST_CASE("corollary consistency at s = 0") {
    auto p = make_params(1.0, kE, 20.0, 4);
    const auto region = blowup::make_probe_region(p);
    const auto ex = poles::residue_series(zero_mode(4, -2), p, 0.0);
    const auto thr = blowup::threshold_and_range(2.0, p);
    for (double pp : {1.05, 2.0, 5.0, 10.0}) {
        const auto res = blowup::corollary2_check(pp, p, region, ex,
                                                  blowup::KernelModel::ResidueSeries);
        const bool outside = pp <= thr.p_min || pp >= thr.p_max ||
                             res.p_conj <= thr.p_min || res.p_conj >= thr.p_max;
        CHECK(res.divergent == outside);
    }
}

TEST_CASE("input validation") {
    auto p = make_params(1.0, kE, 20.0, 4);
    const auto region = blowup::make_probe_region(p);
    const auto ex = poles::residue_series(zero_mode(4, -2), p, 0.0);
    const auto sp = blowup::make_sobolev(2.0, 1.0);
    CHECK_THROWS_AS(blowup::sobolev_tail_integral(sp, region, p, 0.9, ex,
                                                  blowup::KernelModel::LeadingTerm),
                    validation_error);
    CHECK_THROWS_AS(blowup::sobolev_tail_integral(sp, region, p, -0.1, ex,
                                                  blowup::KernelModel::LeadingTerm),
                    validation_error);
}
