#include "useries/error.hpp"
#include "useries/measure.hpp"
#include "useries/planner.hpp"
#include "useries/serialize.hpp"

#include <doctest.h>

using namespace useries;

TEST_CASE("SogParams JSON round trip is exact") {
    const auto c0 = solve_c0(2.0, 5.027010924194599, 40);
    const auto c1 = solve_c1(1.39509339774220585, 2.48796485715279, 126);
    for (const auto& p : {c0, c1, c0.with_l_min(-3).truncated(12)}) {
        const auto text = to_json(p).dump();
        const auto q = params_from_json(nlohmann::json::parse(text));
        CHECK(q.b() == p.b());
        CHECK(q.sigma() == p.sigma());
        CHECK(q.M() == p.M());
        CHECK(q.l_min() == p.l_min());
        CHECK(q.r_c() == p.r_c());
        CHECK(q.omega() == p.omega());
        CHECK(q.continuity() == p.continuity());
        CHECK(q.cutoff_source() == CutoffSource::Prescribed);
        CHECK(to_json(q).dump() == text);
    }
}

TEST_CASE("params_from_json defaults and errors") {
    const auto p = params_from_json(nlohmann::json::parse(R"({"b": 2, "sigma": 5.0, "M": 10, "r_c": 9.5})"));
    CHECK(p.l_min() == 0);
    CHECK(p.continuity() == Continuity::C0);
    CHECK(p.omega() == 1.0);
    CHECK_THROWS_AS(params_from_json(nlohmann::json::parse(R"({"b": 2, "M": 10, "r_c": 9.5})")), ParseError);
    CHECK_THROWS_AS(params_from_json(nlohmann::json::parse(R"({"b": "two", "sigma": 5, "M": 10, "r_c": 9.5})")),
                    ParseError);
}

TEST_CASE("report and plan JSON carry every field") {
    const auto sys = random_neutral_system(32, 20.0, 5);
    MeasureOptions opt;
    opt.with_breakdown = true;
    const auto r = measure_errors(sys, SogParams::with_cutoff(2.0, 5.027010924194599, 12, 0, 10.0), opt);
    const auto j = to_json(r);
    CHECK(j.at("U_exact").get<double>() == r.U_exact);
    CHECK(j.at("energy_error").get<double>() == r.energy_error);
    CHECK(j.at("rel_force_error").get<double>() == r.rel_force_error);
    CHECK(j.at("breakdown").at("F_G_up").size() == sys.size());
    CHECK(j.at("breakdown").at("E_G_up").get<double>() == r.breakdown->E_G_up);

    ParameterPlan plan;
    plan.epsilon = 1e-4;
    plan.b = 1.25;
    plan.warnings = {"w"};
    const auto pj = to_json(plan);
    CHECK(pj.at("continuity") == "c0");
    CHECK(pj.at("warnings").size() == 1);
    CHECK(pj.at("epsilon").get<double>() == 1e-4);
}
