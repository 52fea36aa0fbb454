#pragma once

// Tolerance-driven choice of (b, sigma, M, r_c, omega).

#include "useries/estimators.hpp"
#include "useries/sog.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace useries {

struct ParameterPlan {
    double epsilon = 0.0;
    double b = 0.0;
    double sigma = 0.0;
    int M = 0;
    int l_min = 0;
    double r_c = 0.0;
    double omega = 1.0;
    Continuity continuity = Continuity::C0;
    /// Closed-form estimates relative to the summary's reference scales.
    double predicted_energy_error = 0.0;
    double predicted_force_error = 0.0;
    std::vector<std::string> warnings;

    [[nodiscard]] SogParams params() const;
};

/// b = exp(pi^2 (e - 1) / (2 e p)), p = (3/2) log(3/2) + log(3 pi^3) + log(2^{-3/2}/eps).
double planned_base(double epsilon);
/// ceil(log(3/eps) / (3 log b)).
int planned_terms(double epsilon, double b);

/// C0 plan with r_c = L/2. Warns when the predicted relative force error
/// exceeds 3 eps; throws InfeasibleError beyond 10 eps.
ParameterPlan plan_c0(double epsilon, double L, const SystemSummary& summary);
ParameterPlan plan_c1(double epsilon, double L, const SystemSummary& summary);

using ErrorMeasure = std::function<double(const SogParams&)>;

/// Smallest M with measure(params(M)) <= target: doubling, then bisection.
/// The cutoff comes from solve_c0/solve_c1 at a large M unless r_c is
/// given (C0 only). Throws InfeasibleError naming the floor when the error
/// stops decreasing above target.
int minimal_M(double b, double sigma, Continuity continuity, double target, const ErrorMeasure& measure,
              std::optional<double> r_c = std::nullopt);

} // namespace useries
