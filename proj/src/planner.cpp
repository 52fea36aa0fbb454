#include "useries/planner.hpp"

#include "useries/error.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace useries {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

// Cutoffs are solved with the far sum carried this far, then truncated to
// the planned M. Solving at the planned M instead lets omega absorb the
// dropped wide tail.
constexpr int kSolveTerms = 400;

void check_inputs(double epsilon, double L, const SystemSummary& summary) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw DomainError("planner: epsilon must lie in (0, 1)");
    }
    if (!(L > 0.0)) {
        throw DomainError("planner: L must be positive");
    }
    summary.validate();
    if (!(summary.reference_energy > 0.0) || !(summary.reference_force_rms > 0.0)) {
        throw DomainError("planner: the system summary needs reference energy and force scales");
    }
}

// solve(b, sigma) returns the cutoff for sigma. r_c is homogeneous of degree
// one in sigma, but near-tangent roots are only located to ~1e-6, so the
// fit aims just inside the box and accepts r_c in [r_c_max (1 - 1e-4), r_c_max].
template <class Solve>
SogParams fit_sigma(double r_c_max, const Solve& solve) {
    const double target = r_c_max * (1.0 - 5e-5);
    double sigma = 1.0;
    auto p = solve(sigma);
    for (int it = 0; it < 20; ++it) {
        if (p.r_c() <= r_c_max && p.r_c() >= r_c_max * (1.0 - 1e-4)) {
            return p;
        }
        sigma *= target / p.r_c();
        p = solve(sigma);
    }
    std::ostringstream msg;
    msg << std::setprecision(17) << "planner: sigma fit reproduced r_c = " << p.r_c() << " instead of " << target;
    throw ConvergenceError(msg.str());
}

int admissible_M(double b, double sigma, double L) {
    int M = 0;
    while (gaussian_term(b, sigma, M + 1).width < 10.0 * L) {
        ++M;
    }
    return M;
}

void predict(ParameterPlan& plan, const SystemSummary& summary) {
    const auto p = plan.params();
    plan.predicted_energy_error = closed_form_energy_error(summary, p) / summary.reference_energy;
    plan.predicted_force_error = closed_form_force_error(summary, p) / summary.reference_force_rms;
}

void validate(ParameterPlan& plan, double L) {
    for (const auto& w : plan.params().admissibility(L).warnings()) {
        plan.warnings.push_back(w);
    }
    const double ratio = plan.predicted_force_error / plan.epsilon;
    std::ostringstream msg;
    msg << "predicted relative force error " << plan.predicted_force_error << " is " << ratio
        << " x the tolerance " << plan.epsilon;
    if (ratio > 10.0) {
        throw InfeasibleError(msg.str());
    }
    if (ratio > 3.0) {
        plan.warnings.push_back(msg.str());
    }
    if (plan.predicted_energy_error > 10.0 * plan.epsilon) {
        std::ostringstream e;
        e << "M targets the force; predicted relative energy error is " << plan.predicted_energy_error;
        plan.warnings.push_back(e.str());
    }
}

template <class Solve>
ParameterPlan plan_with(double epsilon, double L, const SystemSummary& summary, Continuity continuity,
                        const Solve& solve) {
    check_inputs(epsilon, L, summary);
    ParameterPlan plan;
    plan.epsilon = epsilon;
    plan.continuity = continuity;
    plan.b = planned_base(epsilon);
    plan.r_c = L / 2.0;
    // Lower l_min until the narrow-side force term drops under eps/3.
    for (int l_min = 0; l_min >= -20; --l_min) {
        const auto fit = [&](int M) {
            try {
                return fit_sigma(L / 2.0, [&](double sigma) { return solve(plan.b, sigma, M, l_min); });
            } catch (const NoRootError& e) {
                throw InfeasibleError(std::string("planner: no cutoff for the planned base: ") + e.what());
            }
        };
        const SogParams solved = fit(kSolveTerms);
        plan.M = std::max(planned_terms(epsilon, plan.b), admissible_M(plan.b, solved.sigma(), L));
        plan.sigma = solved.sigma();
        plan.omega = solved.omega();
        plan.r_c = solved.r_c();
        plan.l_min = l_min;
        const auto down = closed_form_force_terms(summary, plan.params()).down / summary.reference_force_rms;
        if (down <= epsilon / 3.0) {
            break;
        }
    }
    predict(plan, summary);
    validate(plan, L);
    return plan;
}

} // namespace

SogParams ParameterPlan::params() const {
    return SogParams::with_cutoff(b, sigma, M, l_min, r_c, continuity, omega);
}

double planned_base(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw DomainError("planned_base: epsilon must lie in (0, 1)");
    }
    const double p = 1.5 * std::log(1.5) + std::log(3.0 * kPi * kPi * kPi) + std::log(std::pow(2.0, -1.5) / epsilon);
    return std::exp(kPi * kPi * (kE - 1.0) / (2.0 * kE * p));
}

int planned_terms(double epsilon, double b) {
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(b > 1.0)) {
        throw DomainError("planned_terms: need 0 < epsilon < 1 and b > 1");
    }
    return static_cast<int>(std::ceil(std::log(3.0 / epsilon) / (3.0 * std::log(b))));
}

ParameterPlan plan_c0(double epsilon, double L, const SystemSummary& summary) {
    return plan_with(epsilon, L, summary, Continuity::C0, [](double b, double sigma, int M, int l_min) {
        return solve_c0(b, sigma, M, l_min);
    });
}

ParameterPlan plan_c1(double epsilon, double L, const SystemSummary& summary) {
    return plan_with(epsilon, L, summary, Continuity::C1, [](double b, double sigma, int M, int l_min) {
        return solve_c1(b, sigma, M, l_min);
    });
}

int minimal_M(double b, double sigma, Continuity continuity, double target, const ErrorMeasure& measure,
              std::optional<double> r_c) {
    if (!(target > 0.0)) {
        throw DomainError("minimal_M: target must be positive");
    }
    SogParams base = [&] {
        if (r_c) {
            if (continuity != Continuity::C0) {
                throw DomainError("minimal_M: a prescribed r_c needs C0 (C1 fixes r_c with omega)");
            }
            return SogParams::with_cutoff(b, sigma, kSolveTerms, 0, *r_c);
        }
        return continuity == Continuity::C0 ? solve_c0(b, sigma, kSolveTerms) : solve_c1(b, sigma, kSolveTerms);
    }();
    const auto at = [&](int M) { return measure(base.truncated(M)); };
    double prev = at(0);
    if (prev <= target) {
        return 0;
    }
    int hi = 1;
    for (;;) {
        const double e = at(hi);
        if (e <= target) {
            break;
        }
        if ((hi >= 8 && e > 0.95 * prev) || hi >= kSolveTerms) {
            std::ostringstream msg;
            msg << "minimal_M: error floor " << e << " at M = " << hi << " is above the target " << target;
            throw InfeasibleError(msg.str());
        }
        prev = e;
        hi = std::min(2 * hi, kSolveTerms);
    }
    int lo = hi / 2; // measure(lo) > target (or lo == 0)
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        (at(mid) <= target ? hi : lo) = mid;
    }
    return hi;
}

} // namespace useries
