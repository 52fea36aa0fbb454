#include "useries/error.hpp"
#include "useries/measure.hpp"
#include "useries/reference.hpp"
#include "useries/sog.hpp"

#include "../common/oracle_sums.hpp"

#include <doctest.h>

#include <cmath>

using namespace useries;
using testing::brute_force_energy;
using testing::four_ions;

namespace {

constexpr double kMadelung = -1.74756459463318219;

double force_rms(const std::vector<Vec3>& f) { return rms_force(f); }

template <class EnergyFn>
void check_forces_by_differences(const ParticleSystem& sys, const std::vector<Vec3>& forces, EnergyFn energy) {
    const double h = 1e-5;
    const double scale = force_rms(forces);
    for (std::size_t i = 0; i < sys.size(); ++i) {
        for (int k = 0; k < 3; ++k) {
            Vec3 up = sys.positions()[i];
            Vec3 dn = up;
            up[k] += h;
            dn[k] -= h;
            const double fd = -(energy(sys.with_position(i, up)) - energy(sys.with_position(i, dn))) / (2.0 * h);
            CHECK(std::abs(fd - forces[i][k]) <= 1e-6 * scale);
        }
    }
}

} // namespace

TEST_CASE("Ewald reproduces the NaCl Madelung constant") {
    const auto sys = madelung_system(40.0);
    const auto e = ewald_energy_forces(sys);
    const double constant = 2.0 * 20.0 * e.energy / 8.0;
    CHECK(std::abs(constant - kMadelung) <= 1e-12 * std::abs(kMadelung));
    // Every ion sits at an inversion centre.
    for (const auto& f : e.forces) {
        CHECK(std::sqrt(norm2(f)) <= 1e-12);
    }
}

TEST_CASE("Ewald is independent of the splitting parameter") {
    const auto sys = random_neutral_system(64, 20.0, 11);
    const auto a = ewald_energy_forces(sys, 0.30, 20.0, 3.6);
    const auto b = ewald_energy_forces(sys, 0.45, 13.5, 5.4);
    CHECK(std::abs(a.energy - b.energy) <= 1e-10 * std::abs(a.energy));
    double diff = 0.0;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        diff += norm2(a.forces[i] - b.forces[i]);
    }
    CHECK(std::sqrt(diff / sys.size()) <= 1e-9 * force_rms(a.forces));
    CHECK_THROWS_AS(ewald_energy_forces(sys, 0.3, 5.0, 3.6), ParameterError);
    CHECK_THROWS_AS(ewald_energy_forces(sys, 0.3, 20.0, 1.0), ParameterError);
}

TEST_CASE("Ewald forces: differences, momentum, translation") {
    const auto sys = four_ions();
    const auto e = ewald_energy_forces(sys);
    check_forces_by_differences(sys, e.forces, [](const ParticleSystem& s) { return ewald_energy_forces(s).energy; });
    Vec3 total{0, 0, 0};
    for (const auto& f : e.forces) {
        total = total + f;
    }
    CHECK(std::sqrt(norm2(total)) <= 1e-12 * force_rms(e.forces) * sys.size());
    const auto moved = ewald_energy_forces(sys.translated({3.3, -7.1, 18.2}));
    CHECK(std::abs(moved.energy - e.energy) <= 1e-12 * std::abs(e.energy));
}

TEST_CASE("u-series matches a brute-force image sum") {
    const auto sys = four_ions();
    // s_4 = 114 A, so the widest term has decayed well inside 60 cells.
    const auto p = SogParams::with_cutoff(2.0, 5.027010924194599, 4, 0, 9.5);
    const double brute = brute_force_energy(sys, p);
    const auto u = useries_energy_forces(sys, p);
    CHECK(std::abs(u.energy - brute) <= 1e-10 * std::abs(brute));
}

TEST_CASE("u-series forces: differences, momentum, translation") {
    const auto sys = four_ions();
    for (const auto& p : {solve_c0(2.0, 5.027010924194599, 20), solve_c1(1.62976708826776469, 3.633717409009413, 60)}) {
        const auto u = useries_energy_forces(sys, p);
        check_forces_by_differences(sys, u.forces,
                                    [&](const ParticleSystem& s) { return useries_energy_forces(s, p).energy; });
        Vec3 total{0, 0, 0};
        for (const auto& f : u.forces) {
            total = total + f;
        }
        CHECK(std::sqrt(norm2(total)) <= 1e-12 * force_rms(u.forces) * sys.size());
        const auto moved = useries_energy_forces(sys.translated({-4.0, 9.5, 31.0}), p);
        CHECK(std::abs(moved.energy - u.energy) <= 1e-12 * std::abs(u.energy));
    }
}

TEST_CASE("u-series reproduces the Madelung constant with tight parameters") {
    const auto sys = madelung_system(40.0);
    const auto p = SogParams::with_cutoff(1.21812525709410644, 1.774456369233284, 124, 0, 10.0);
    const auto u = useries_energy_forces(sys, p);
    CHECK(std::abs(2.0 * 20.0 * u.energy / 8.0 - kMadelung) <= 1e-9 * std::abs(kMadelung));
}

TEST_CASE("u-series rejects a cutoff beyond half the box") {
    const auto sys = four_ions();
    CHECK_THROWS_AS(useries_energy_forces(sys, SogParams::with_cutoff(2.0, 5.0, 10, 0, 10.5)), ParameterError);
}

TEST_CASE("parallel mode agrees with the fixed order") {
    const auto sys = random_neutral_system(128, 20.0, 5);
    const auto p = solve_c0(2.0, 5.027010924194599, 12);
    EvalOptions par;
    par.parallel = true;
    const auto a = useries_energy_forces(sys, p, 1e-16);
    const auto b = useries_energy_forces(sys, p, 1e-16, par);
    CHECK(std::abs(a.energy - b.energy) <= 1e-13 * std::abs(a.energy));
    const auto c = useries_energy_forces(sys, p, 1e-16);
    CHECK(a.energy == c.energy);
    CHECK(a.forces == c.forces);
}

TEST_CASE("measure_errors in the exact limit") {
    const auto sys = madelung_system(40.0);
    // b = 1.05: aliasing ~e^{-100}; 700 terms reach from 0.07 A to 2e14 A.
    const auto p = SogParams::with_cutoff(1.05, 1.0, 640, -60, 10.0);
    const auto r = measure_errors(sys, p);
    CHECK(r.rel_energy_error <= 1e-10);
    CHECK(r.rel_force_error >= 0.0);
    CHECK(r.U_exact - r.U_approx == doctest::Approx(r.energy_error));
}

TEST_CASE("measure_errors: water-density systems at b = 1.3207, M = 20") {
    // One 512-ion sample scatters by 2.5x between seeds; the RMS over five is the scale.
    const auto p = SogParams::with_cutoff(1.32070036405934420, 2.277149356440992, 20, 0, 10.0);
    double sum2 = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto r = measure_errors(random_neutral_system(512, 20.0, seed), p);
        CHECK(r.rel_force_error >= 0.0);
        sum2 += r.rel_force_error * r.rel_force_error;
    }
    const double rms = std::sqrt(sum2 / 5.0);
    CHECK(rms <= 5.0 * 3.27e-7);
    CHECK(rms >= 3.27e-7 / 5.0);
}

TEST_CASE("measure_errors attaches the breakdown on request") {
    const auto sys = random_neutral_system(64, 20.0, 3);
    MeasureOptions opt;
    opt.with_breakdown = true;
    opt.with_spectral = true;
    const auto r = measure_errors(sys, solve_c0(2.0, 5.027010924194599, 12), opt);
    REQUIRE(r.breakdown.has_value());
    CHECK(r.breakdown->F_G_up.size() == sys.size());
    CHECK(r.breakdown->total_energy_estimate ==
          doctest::Approx(r.breakdown->E_T + r.breakdown->E_G_up + r.breakdown->E_G_down));
}

TEST_CASE("measure_errors in the exact limit on a random system") {
    const auto sys = random_neutral_system(128, 20.0, 2024);
    const auto r = measure_errors(sys, SogParams::with_cutoff(1.05, 1.0, 640, -60, 10.0));
    CHECK(r.rel_energy_error <= 1e-11);
    CHECK(r.rel_force_error <= 1e-11);
}
