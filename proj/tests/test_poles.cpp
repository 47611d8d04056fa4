#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "worm/poles.hpp"

using namespace worm;
using poles::PoleSource;

namespace {

const double kPi = std::numbers::pi;
const double kE = std::exp(1.0);

bool has_pole(const poles::PoleSet& set, cplx where, PoleSource src, double tol = 1e-9) {
    for (const auto& q : set.poles)
        if (q.source == src && std::abs(q.location - where) < tol) return true;
    return false;
}

}  // namespace

TEST_CASE("predicted lists match the even-case enumeration (n=4, k=-2)") {
    auto p = make_params(1.0, kE, 20.0, 4);
    auto set = poles::poles_predicted(zero_mode(4, -2), p, Rect{-3, 3, -3, 3});
    CHECK(set.poles.size() == 6);
    for (double h : {2.0, -2.0, 3.0, -3.0})
        CHECK(has_pole(set, cplx(0.0, h), PoleSource::CosineFactor));
    for (double m : {1.0, -1.0})
        CHECK(has_pole(set, cplx(-0.5, m * kPi / 2.0), PoleSource::AnnulusFactor, 1e-8));
    for (const auto& q : set.poles) CHECK(q.multiplicity == 1);
}

TEST_CASE("predicted lists match the odd-case enumeration (n=3, k=-2)") {
    auto p = make_params(1.0, kE, 20.0, 3);
    auto set = poles::poles_predicted(zero_mode(3, -2), p, Rect{-3, 3, -3, 3});
    // half-integer heights 1.5, 2.5 and annulus pair
    for (double h : {1.5, -1.5, 2.5, -2.5})
        CHECK(has_pole(set, cplx(0.0, h), PoleSource::CosineFactor));
    for (double m : {1.0, -1.0})
        CHECK(has_pole(set, cplx(-0.5, m * kPi / 2.0), PoleSource::AnnulusFactor, 1e-8));
    CHECK(set.poles.size() == 6);
}

TEST_CASE("n=4 |J|=1 k=-1 list") {
    auto p = make_params(1.0, kE, 20.0, 4);
    auto set = poles::poles_predicted(make_mode({1, 0}, -1), p, Rect{-3, 3, -3, 3});
    // cosine heights at half-integers >= 2.5; annulus at m nu i with nu = pi/2
    CHECK(set.poles.size() == 4);
    for (double h : {2.5, -2.5}) CHECK(has_pole(set, cplx(0.0, h), PoleSource::CosineFactor));
    for (double m : {1.0, -1.0})
        CHECK(has_pole(set, cplx(0.0, m * kPi / 2.0), PoleSource::AnnulusFactor, 1e-8));
}

TEST_CASE("conjugation symmetry of the predicted zero set") {
    for (int n : {3, 4}) {
        auto p = make_params(0.9, 2.4, 20.0, n);
        auto set = poles::poles_predicted(zero_mode(n, -2), p, Rect{-4, 4, -4, 4});
        for (const auto& q : set.poles) {
            bool found = false;
            for (const auto& r : set.poles)
                if (std::abs(r.location - std::conj(q.location)) < 1e-10) found = true;
            CHECK(found);
        }
    }
}

TEST_CASE("numeric refinement and argument-principle count") {
    struct Cfg {
        int n;
        std::vector<int> j;
        int k;
    };
    for (const auto& c : {Cfg{3, {0}, -2}, Cfg{4, {0, 0}, -2}, Cfg{4, {1, 0}, -1}}) {
        auto p = make_params(1.0, kE, 20.0, c.n);
        const auto mode = make_mode(c.j, c.k);
        const Rect region{-3, 3, -3, 3};
        auto pred = poles::poles_predicted(mode, p, region);
        auto refined = poles::poles_numeric(mode, p, region, 1e-10);  // throws on count mismatch
        REQUIRE(refined.poles.size() == pred.poles.size());
        for (std::size_t i = 0; i < refined.poles.size(); ++i) {
            CHECK(std::abs(refined.poles[i].location - pred.poles[i].location) < 1e-8);
            CHECK(refined.poles[i].residual_abs < 1e-10);
        }
        // simplicity at the refined zeros
        auto spec = weight::make_weight_spec(mode, p);
        for (const auto& q : refined.poles)
            CHECK(std::abs(weight::transform_m2i_jet(q.location, spec).deriv) > 1e-6);
    }
}

TEST_CASE("count conservation in sub-rectangles") {
    auto p = make_params(1.0, kE, 20.0, 4);
    auto spec = weight::make_weight_spec(zero_mode(4, -2), p);
    struct Case {
        Rect r;
        int count;
    };
    for (const auto& c : {Case{{-0.8, 0.3, -2.2, -1.2}, 2},  // -2i and the lower annulus zero
                          Case{{-0.2, 0.4, -3.4, -1.8}, 2},  // -2i, -3i
                          Case{{0.6, 1.8, -2.0, 2.0}, 0}}) {
        CHECK(poles::argument_principle_count(spec, c.r) == c.count);
    }
}

TEST_CASE("residue series for the focal mode (n=4)") {
    auto p = make_params(1.0, kE, 20.0, 4);
    auto ex = poles::residue_series(zero_mode(4, -2), p, 0.0);
    CHECK(ex.discrete_terms.empty());  // nu = pi/2 < n/2 = 2
    CHECK(ex.winding_term.exponent.real() == doctest::Approx(p.nu).epsilon(1e-12));
    CHECK(ex.winding_term.exponent.imag() == doctest::Approx(-p.mu).epsilon(1e-10));
    CHECK(std::abs(ex.winding_term.coeff) > 1e-12);
    CHECK(ex.remainder_order == doctest::Approx(p.nu + 0.1));  // eps = min(0.1, gap/2)
}

TEST_CASE("residue series with discrete terms (n=3, alpha=0.35)") {
    auto p = make_params(0.35, kE, 20.0, 3);
    CHECK(p.nu == doctest::Approx(kPi / 0.7).epsilon(1e-14));
    auto ex = poles::residue_series(zero_mode(3, -2), p, 0.0);
    REQUIRE(ex.discrete_terms.size() == 3);
    const double expected_exp[3] = {1.5, 2.5, 3.5};
    for (int i = 0; i < 3; ++i) {
        CHECK(ex.discrete_terms[i].ell == i);
        CHECK(ex.discrete_terms[i].exponent == doctest::Approx(expected_exp[i]).epsilon(1e-10));
        CHECK(std::abs(ex.discrete_terms[i].coeff) > 1e-12);
    }
    CHECK(ex.winding_term.exponent.real() == doctest::Approx(p.nu).epsilon(1e-10));
    CHECK(ex.winding_term.exponent.imag() == doctest::Approx(-1.0 / 0.7).epsilon(1e-9));
    // strict depth ordering, winding last
    for (int i = 0; i + 1 < 3; ++i)
        CHECK(ex.discrete_terms[i].exponent < ex.discrete_terms[i + 1].exponent);
    CHECK(ex.discrete_terms.back().exponent < ex.winding_term.exponent.real());
}

TEST_CASE("double pole detection") {
    // k = -2: annulus zeros keep real part -mu != 0, never collide
    for (double alpha : {0.5, 1.0, 2.0}) {
        auto p = make_params(alpha, kE, 20.0, 4);
        CHECK(poles::double_pole_detect(zero_mode(4, -2), p).empty());
    }
    // k = -1 with nu = 1: annulus zeros at m i collide with cosine heights >= 2
    auto p = make_params(kPi / 2.0, kE, 20.0, 4);
    CHECK(p.nu == doctest::Approx(1.0).epsilon(1e-12));
    auto hits = poles::double_pole_detect(zero_mode(4, -1), p);
    CHECK(!hits.empty());
    for (const auto& h : hits) CHECK(std::abs(h.location.real()) < 1e-12);

    // nu = 2 puts the collision onto the winding pole itself: refused
    auto p2 = make_params(kPi / 4.0, kE, 20.0, 4);
    CHECK(p2.nu == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(poles::residue_series(zero_mode(4, -1), p2, 0.0), numeric_error);
}
