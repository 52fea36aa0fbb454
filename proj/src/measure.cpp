#include "useries/measure.hpp"

#include "useries/error.hpp"
#include "useries/serialize.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace useries {

double rms_force(const std::vector<Vec3>& forces) {
    if (forces.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (const auto& f : forces) {
        s += norm2(f);
    }
    return std::sqrt(s / static_cast<double>(forces.size()));
}

ErrorReport measure_errors(const ParticleSystem& system, const SogParams& params,
                           const EnergyForces& exact, const MeasureOptions& options) {
    if (exact.forces.size() != system.size()) {
        throw DomainError("measure_errors: reference forces do not match the system");
    }
    const auto approx = useries_energy_forces(system, params, 1e-16, options.eval);
    ErrorReport r;
    r.U_exact = exact.energy;
    r.U_approx = approx.energy;
    r.energy_error = exact.energy - approx.energy;
    r.rel_energy_error = std::abs(r.energy_error) / std::abs(exact.energy);
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < system.size(); ++i) {
        diff += norm2(exact.forces[i] - approx.forces[i]);
        norm += norm2(exact.forces[i]);
    }
    r.rel_force_error = norm > 0.0 ? std::sqrt(diff / norm) : std::sqrt(diff);
    r.force_rms = rms_force(exact.forces);
    if (options.with_breakdown) {
        r.breakdown = error_breakdown(system, params, options.with_spectral);
    }
    return r;
}

ErrorReport measure_errors(const ParticleSystem& system, const SogParams& params,
                           const MeasureOptions& options) {
    return measure_errors(system, params, ewald_energy_forces(system, options.eval), options);
}

SystemSummary summarize(const ParticleSystem& system, double r_c, const EvalOptions& options) {
    auto s = SystemSummary::from(system, r_c);
    const auto exact = ewald_energy_forces(system, options);
    s.reference_energy = std::abs(exact.energy);
    s.reference_force_rms = rms_force(exact.forces);
    return s;
}

void write_report_csv(std::ostream& out, const ErrorReport& report, bool header) {
    std::ostringstream row;
    row.imbue(std::locale::classic());
    if (header) {
        row << "U_exact,U_approx,energy_error,rel_energy_error,rel_force_error";
        if (report.breakdown) {
            row << ",E_T,E_G_up,E_G_down,total_energy_estimate";
        }
        row << '\n';
    }
    row << std::setprecision(17) << report.U_exact << ',' << report.U_approx << ',' << report.energy_error << ','
        << report.rel_energy_error << ',' << report.rel_force_error;
    if (report.breakdown) {
        const auto& b = *report.breakdown;
        row << ',' << b.E_T << ',' << b.E_G_up << ',' << b.E_G_down << ',' << b.total_energy_estimate;
    }
    row << '\n';
    out << row.str();
}

void save_report(const std::filesystem::path& path, const ErrorReport& report) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    if (path.extension() == ".json") {
        out << to_json(report).dump(2) << '\n';
    } else {
        write_report_csv(out, report);
    }
}

} // namespace useries
