#pragma once

// Measured u-series errors against the Ewald oracle.

#include "useries/estimators.hpp"
#include "useries/reference.hpp"

#include <filesystem>
#include <optional>
#include <ostream>

namespace useries {

struct ErrorReport {
    double U_exact = 0.0;
    double U_approx = 0.0;
    /// U_exact - U_approx.
    double energy_error = 0.0;
    double rel_energy_error = 0.0;
    /// sqrt(sum |F_exact - F_approx|^2) / sqrt(sum |F_exact|^2).
    double rel_force_error = 0.0;
    double force_rms = 0.0;
    std::optional<ErrorBreakdown> breakdown;
};

struct MeasureOptions {
    bool with_breakdown = false;
    /// Spectral E_T in the breakdown (N <= 256 only).
    bool with_spectral = false;
    EvalOptions eval;
};

/// Ewald result reused across calls on the same system.
ErrorReport measure_errors(const ParticleSystem& system, const SogParams& params,
                           const EnergyForces& exact, const MeasureOptions& options = {});
ErrorReport measure_errors(const ParticleSystem& system, const SogParams& params,
                           const MeasureOptions& options = {});

double rms_force(const std::vector<Vec3>& forces);

/// SystemSummary::from plus the Ewald energy and RMS force as reference scales.
SystemSummary summarize(const ParticleSystem& system, double r_c, const EvalOptions& options = {});

/// JSON when the extension is .json, otherwise a one-row CSV with header.
void save_report(const std::filesystem::path& path, const ErrorReport& report);
void write_report_csv(std::ostream& out, const ErrorReport& report, bool header = true);

} // namespace useries
