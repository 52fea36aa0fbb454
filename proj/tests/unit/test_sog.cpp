#include "oracle_values.hpp"

#include "useries/error.hpp"
#include "useries/sog.hpp"
#include "useries/specfun.hpp"

#include <doctest.h>

#include <cmath>

using namespace useries;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSigmaB2 = 5.027010924194599;

} // namespace

TEST_CASE("gaussian terms follow the geometric ladder") {
    const auto t0 = gaussian_term(2.0, kSigmaB2, 0);
    CHECK(t0.weight == doctest::Approx(oracle::w0_b2).epsilon(1e-15));
    CHECK(t0.width == doctest::Approx(oracle::s0_b2).epsilon(1e-15));
    for (double b : {1.05, 1.3207, 2.0}) {
        const auto terms = gaussian_terms(b, 1.7, -5, 30);
        REQUIRE(terms.size() == 36);
        for (std::size_t i = 0; i < terms.size(); ++i) {
            CHECK(terms[i].index == -5 + static_cast<int>(i));
            CHECK(terms[i].weight * terms[i].width ==
                  doctest::Approx(2.0 * std::log(b) / std::sqrt(kPi)).epsilon(1e-14));
            if (i > 0) {
                CHECK(terms[i].weight / terms[i - 1].weight == doctest::Approx(1.0 / b).epsilon(1e-14));
                CHECK(terms[i].width / terms[i - 1].width == doctest::Approx(b).epsilon(1e-14));
            }
        }
    }
    CHECK_THROWS_AS(gaussian_terms(1.0, 1.0, 0, 3), DomainError);
    CHECK_THROWS_AS(gaussian_terms(2.0, 0.0, 0, 3), DomainError);
    CHECK_THROWS_AS(gaussian_terms(2.0, 1.0, 4, 3), DomainError);
}

TEST_CASE("bilateral series values") {
    const auto v = bsa_eval(1.0, 1.1, 1.0, 300);
    CHECK(std::abs(1.0 - v.value) <= bsa_uniform_error_bound(1.1) + v.truncation_bound + 1e-15);
    CHECK(bsa_eval(2.5, 1.5, 1.0, 200).value == doctest::Approx(oracle::bsa_r25_b15_s1).epsilon(1e-14));
    CHECK(bsa_uniform_error_bound(2.0) == doctest::Approx(oracle::bsa_bound_b2).epsilon(1e-14));
    CHECK(bsa_uniform_error_bound(1.1) == doctest::Approx(oracle::bsa_bound_b11).epsilon(1e-13));
    CHECK(bsa_uniform_error_bound(1.01) < bsa_uniform_error_bound(1.1));
    CHECK(bsa_uniform_error_bound(1.1) < bsa_uniform_error_bound(1.5));
}

TEST_CASE("bilateral series: uniform bound on a log grid") {
    // Rounding of an ~800-term positive sum, n eps ~ 1e-13, whatever b is.
    constexpr double kRounding = 1e-13;
    for (double b : {1.1, 1.3, 2.0}) {
        const double bound = 2.0 * bsa_uniform_error_bound(b);
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double r = std::pow(10.0, -3.0 + 6.0 * i / 9999.0);
            const auto v = bsa_eval(r, b, 1.0, 400);
            worst = std::max(worst, std::abs(1.0 - r * v.value));
        }
        CHECK(worst <= bound + kRounding);
        if (b == 2.0) {
            // Large enough to be resolved: the bound is also not loose by orders.
            CHECK(worst > 0.1 * bsa_uniform_error_bound(b));
        }
    }
}

TEST_CASE("bilateral series: r bsa(r) is periodic in log r") {
    const double b = 1.6;
    for (double r : {0.3, 1.0, 4.2}) {
        const double a = r * bsa_eval(r, b, 1.0, 300).value;
        const double c = b * r * bsa_eval(b * r, b, 1.0, 300).value;
        CHECK(std::abs(a - c) <= 2.0 * bsa_uniform_error_bound(b) * 1e-6 + 1e-14);
    }
}

TEST_CASE("bilateral series: Fourier expansion of the aliasing error") {
    for (double b : {1.3, 1.5, 2.0}) {
        for (double r = 0.5; r <= 5.0; r += 0.25) {
            const double err = 1.0 / r - bsa_eval(r, b, 1.0, 300).value;
            cplx fourier = 0.0;
            for (int m = 1; m <= 4; ++m) {
                for (int sgn : {-1, 1}) {
                    const SpectralIndex idx(sgn * m, b);
                    fourier += C_m(sgn * m, b, 1.0) * std::exp((idx.alpha() - 1.0) * std::log(r));
                }
            }
            CHECK(std::abs(fourier.imag()) < 1e-15 / r);
            const double allowed = 2.0 * std::abs(C_m(5, b, 1.0)) / r + 1e-15 / r;
            CHECK(std::abs(err - fourier.real()) <= allowed);
        }
    }
}

TEST_CASE("far and near parts") {
    const auto p = SogParams::with_cutoff(2.0, kSigmaB2, 12, 0, 10.0);
    double sum_w = 0.0;
    for (const auto& t : p.terms()) {
        sum_w += t.weight;
    }
    CHECK(far_eval(p, 0.0) == doctest::Approx(sum_w).epsilon(1e-15));
    CHECK(near_eval(p, 1.0) == doctest::Approx(oracle::near_b2_M12_r1).epsilon(1e-14));
    CHECK(near_eval(p, 20.0) == 0.0);
    for (double r : {5.0, 10.0, 20.0}) {
        const double h = 1e-4 * r;
        const double fd = (far_eval(p, r + h) - far_eval(p, r - h)) / (2.0 * h);
        CHECK(far_deriv(p, r) == doctest::Approx(fd).epsilon(1e-8));
    }
    CHECK_THROWS_AS(near_eval(p, 0.0), DomainError);
    CHECK_THROWS_AS(far_eval(p, -1.0), DomainError);
}

TEST_CASE("solve_c0 finds the smallest root") {
    const auto p12 = solve_c0(2.0, kSigmaB2, 12);
    CHECK(p12.r_c() == doctest::Approx(oracle::c0_root_b2_M12).epsilon(1e-12));
    CHECK(std::abs(p12.c0_residual()) <= 1e-12);
    CHECK(p12.cutoff_source() == CutoffSource::Solved);
    CHECK(p12.omega() == 1.0);
    CHECK(std::abs(far_eval(p12, p12.r_c()) * p12.r_c() - 1.0) <= 1e-10);
    CHECK(solve_c0(2.0, kSigmaB2, 40).r_c() == doctest::Approx(oracle::c0_root_b2_M40).epsilon(1e-12));
    // Nearly tangential: d(rF)/dr ~ 1e-7 per A at the root, so double rounding
    // fixes it only to ~1e-9.
    CHECK(solve_c0(1.32070036405934420, 2.277149356440992, 200).r_c() ==
          doctest::Approx(oracle::c0_root_b13207_M200).epsilon(1e-9));
    // Left limit of the near part vanishes at the cutoff.
    const double rc = p12.r_c();
    CHECK(std::abs(near_eval(p12, rc * (1.0 - 1e-13))) <= 1e-10);
    CHECK(solve_c0(1.48783512395703226, 2.662784519725113, 34).r_c() ==
          doctest::Approx(oracle::c0_root_b14878_M34).epsilon(1e-10));
    // Too few terms: r F(r) stays below 1 on (0, s_M].
    CHECK_THROWS_AS(solve_c0(2.0, kSigmaB2, 0), NoRootError);
}

TEST_CASE("solve_c1 recovers omega for r_c = 10") {
    const auto p = solve_c1(2.0, kSigmaB2, 60);
    CHECK(p.continuity() == Continuity::C1);
    CHECK(p.r_c() == doctest::Approx(oracle::c1_root_b2_M60).epsilon(1e-10));
    CHECK(p.omega() == doctest::Approx(oracle::c1_omega_b2_M60).epsilon(1e-12));
    CHECK(std::abs(p.omega() - 0.994446492762232) <= 1e-9);
    CHECK(p.r_c() == doctest::Approx(10.0).epsilon(1e-3));
    CHECK(std::abs(p.c0_residual()) <= 1e-12);
    CHECK(std::abs(p.c1_residual()) <= 1e-12 / (p.r_c() * p.r_c()));
    const double rc = p.r_c();
    CHECK(std::abs(p.near_deriv(rc * (1.0 - 1e-12))) <= 1e-8 / (rc * rc));

    // Tangential root: the reduced residual touches zero without a sign change.
    const auto q = solve_c1(1.39514986274321621, 2.577606396703941, 126);
    CHECK(std::abs(q.omega() - 1.000139836531469) <= 1e-9);
    CHECK(q.r_c() == doctest::Approx(10.0).epsilon(1e-3));
}

TEST_CASE("prescribed cutoffs and derived copies") {
    const auto p = SogParams::with_cutoff(2.0, kSigmaB2, 20, 0, 10.0);
    CHECK(p.cutoff_source() == CutoffSource::Prescribed);
    const auto t = p.truncated(5);
    CHECK(t.M() == 5);
    CHECK(t.r_c() == 10.0);
    CHECK(t.terms().size() == 6);
    const auto d = p.with_l_min(-3);
    CHECK(d.terms().front().index == -3);
    CHECK(p.with_l_min(4).terms().front().index == 4);
    CHECK_THROWS_AS(SogParams::with_cutoff(2.0, kSigmaB2, 20, 0, 10.0, Continuity::C0, 1.1), DomainError);
    CHECK_THROWS_AS(SogParams::with_cutoff(2.0, kSigmaB2, 20, 1, 10.0, Continuity::C1, 1.0), DomainError);
    CHECK_THROWS_AS(SogParams::with_cutoff(2.0, kSigmaB2, 20, 0, -1.0), DomainError);

    // omega multiplies only the l = 0 weight.
    const auto c1 = SogParams::with_cutoff(2.0, kSigmaB2, 20, -2, 10.0, Continuity::C1, 1.25);
    for (std::size_t i = 0; i < c1.terms().size(); ++i) {
        const double f = c1.terms()[i].index == 0 ? 1.25 : 1.0;
        CHECK(c1.scaled_terms()[i].weight == doctest::Approx(f * c1.terms()[i].weight).epsilon(1e-15));
    }
}

TEST_CASE("admissibility flags") {
    const auto p = SogParams::with_cutoff(2.0, kSigmaB2, 20, 0, 10.0);
    CHECK(p.admissibility(20.0).ok());
    CHECK(p.admissibility(20.0).warnings().empty());
    const auto small_M = p.truncated(3);
    CHECK_FALSE(small_M.admissibility(20.0).widest_covers_box);
    CHECK_FALSE(small_M.admissibility(20.0).warnings().empty());
    CHECK_FALSE(p.admissibility(19.0).box_holds_cutoff);
    CHECK_FALSE(p.with_l_min(2).admissibility(20.0).narrowest_inside_cut);
}

TEST_CASE("continuity names") {
    CHECK(parse_continuity("c0") == Continuity::C0);
    CHECK(parse_continuity("C1") == Continuity::C1);
    CHECK(to_string(Continuity::C1) == "c1");
    CHECK_THROWS_AS(parse_continuity("c2"), DomainError);
}
