#include "oracle_values.hpp"

#include "useries/error.hpp"
#include "useries/measure.hpp"
#include "useries/planner.hpp"
#include "useries/reference.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace useries;

namespace {

const SystemSummary& summary_256() {
    static const SystemSummary s = summarize(random_neutral_system(256, 20.0, 2024), 10.0);
    return s;
}

double aliasing_bound(double b) {
    const double l = std::log(b);
    return std::pow(l, -1.5) * std::exp(-M_PI * M_PI / (2.0 * l));
}

} // namespace

TEST_CASE("planned_base against the oracle") {
    CHECK(planned_base(1e-4) == doctest::Approx(oracle::planned_base_1e4).epsilon(1e-14));
    CHECK(planned_base(1e-6) == doctest::Approx(oracle::planned_base_1e6).epsilon(1e-14));
    CHECK(planned_base(1e-4) == doctest::Approx(1.264).epsilon(1e-3));
    CHECK_THROWS_AS(planned_base(0.0), DomainError);
    CHECK_THROWS_AS(planned_base(1.0), DomainError);
}

TEST_CASE("planned base and terms are monotone in the tolerance") {
    const std::vector<double> eps{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8, 1e-10};
    for (std::size_t k = 1; k < eps.size(); ++k) {
        const double b0 = planned_base(eps[k - 1]);
        const double b1 = planned_base(eps[k]);
        CHECK(b1 < b0);
        CHECK(planned_terms(eps[k], b1) >= planned_terms(eps[k - 1], b0));
    }
    CHECK(planned_terms(1e-4, 2.0) == static_cast<int>(std::ceil(std::log(3e4) / (3.0 * std::log(2.0)))));
    CHECK_THROWS_AS(planned_terms(1e-4, 1.0), DomainError);
}

TEST_CASE("aliasing bound at the planned base stays under the tolerance") {
    for (double eps : {1e-3, 1e-4, 1e-6}) {
        CHECK(aliasing_bound(planned_base(eps)) <= eps);
    }
}

TEST_CASE("plan_c0 on the 256-ion system") {
    const auto& s = summary_256();
    const auto plan = plan_c0(1e-4, 20.0, s);
    CHECK(plan.continuity == Continuity::C0);
    CHECK(plan.b == doctest::Approx(oracle::planned_base_1e4).epsilon(1e-14));
    CHECK(plan.M >= planned_terms(1e-4, plan.b));
    CHECK(plan.r_c <= 10.0);
    CHECK(plan.r_c >= 10.0 * (1.0 - 1e-4));
    CHECK(plan.omega == 1.0);
    CHECK(plan.l_min <= 0);
    CHECK(plan.predicted_force_error <= 3.0 * plan.epsilon);
    // predictions follow the parameters
    const auto p = plan.params();
    CHECK(plan.predicted_force_error ==
          doctest::Approx(closed_form_force_error(s, p) / s.reference_force_rms).epsilon(1e-12));
    CHECK((p.admissibility(20.0).ok() || !plan.warnings.empty()));
}

TEST_CASE("plan_c1 fixes omega and does no worse than plan_c0") {
    const auto& s = summary_256();
    const auto c0 = plan_c0(1e-5, 20.0, s);
    const auto c1 = plan_c1(1e-5, 20.0, s);
    CHECK(c1.continuity == Continuity::C1);
    CHECK(c1.omega != 1.0);
    // omega solves the C1 system of the long sum the plan was cut from
    const auto full = SogParams::with_cutoff(c1.b, c1.sigma, 400, c1.l_min, c1.r_c, Continuity::C1, c1.omega);
    CHECK(std::abs(full.c1_residual()) * c1.r_c * c1.r_c <= 1e-12);
    CHECK(std::abs(full.c0_residual()) <= 1e-12);
    CHECK(c1.predicted_force_error <= c0.predicted_force_error);
    CHECK(c1.predicted_force_error <= 3.0 * c1.epsilon);
}

TEST_CASE("planner input checks") {
    const auto& s = summary_256();
    CHECK_THROWS_AS(plan_c0(0.0, 20.0, s), DomainError);
    CHECK_THROWS_AS(plan_c0(1e-4, -1.0, s), DomainError);
    CHECK_THROWS_AS(plan_c0(1e-4, 20.0, SystemSummary::from(random_neutral_system(8, 20.0, 1), 10.0)), DomainError);
}

TEST_CASE("minimal_M with a synthetic measure") {
    int calls = 0;
    const ErrorMeasure geometric = [&](const SogParams& p) {
        ++calls;
        return std::pow(2.0, -3.0 * p.M());
    };
    CHECK(minimal_M(2.0, 5.027010924194599, Continuity::C0, 2.0, geometric, 10.0) == 0);
    CHECK(minimal_M(2.0, 5.027010924194599, Continuity::C0, 1e-9, geometric, 10.0) == 10);
    const int first = minimal_M(2.0, 5.027010924194599, Continuity::C0, 3e-7, geometric, 10.0);
    const int again = minimal_M(2.0, 5.027010924194599, Continuity::C0, 3e-7, geometric, 10.0);
    CHECK(first == again);
    CHECK(first == 8);

    const ErrorMeasure floored = [](const SogParams& p) { return 1e-5 + std::pow(2.0, -3.0 * p.M()); };
    CHECK_THROWS_AS(minimal_M(2.0, 5.027010924194599, Continuity::C0, 1e-7, floored, 10.0), InfeasibleError);
    CHECK_THROWS_AS(minimal_M(2.0, 5.027010924194599, Continuity::C1, 1e-7, geometric, 10.0), DomainError);
    CHECK_THROWS_AS(minimal_M(2.0, 5.027010924194599, Continuity::C0, 0.0, geometric, 10.0), DomainError);
}

TEST_CASE("minimal_M on the b = 2 force floor") {
    // 3.48e-3 at M = 4 is the converged C0 force error of bulk water at b = 2.
    // This system's own floor (7.8e-4) plays that role.
    const auto sys = random_neutral_system(512, 20.0, 1);
    const auto exact = ewald_energy_forces(sys);
    const ErrorMeasure force = [&](const SogParams& p) { return measure_errors(sys, p, exact).rel_force_error; };
    const double floor = force(SogParams::with_cutoff(2.0, 5.027010924194599, 60, 0, 10.0));
    const int M = minimal_M(2.0, 5.027010924194599, Continuity::C0, 1.01 * floor, force, 10.0);
    CHECK(M >= 2);
    CHECK(M <= 6);
    CHECK(minimal_M(2.0, 5.027010924194599, Continuity::C0, 3.48e-3, force, 10.0) <= M);
}
