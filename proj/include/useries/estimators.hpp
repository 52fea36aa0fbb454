#pragma once

// Error components of the u-series. Sign convention throughout:
// error = exact - u-series, for energies and for force vectors.

#include "useries/quadrature.hpp"
#include "useries/sog.hpp"
#include "useries/system.hpp"

#include <string>
#include <vector>

namespace useries {

struct SystemSummary {
    std::size_t N = 0;
    double L = 0.0;
    double V = 0.0;
    double Q = 0.0; // sum q_i^2
    /// sum_{i,j} q_i q_j H(r_ij - r_c), minimum image.
    double over_cutoff_pair_weight = 0.0;
    /// Scales for relative predictions (|U| and RMS force); 0 when unknown.
    double reference_energy = 0.0;
    double reference_force_rms = 0.0;

    static SystemSummary from(const ParticleSystem& system, double r_c);
    void validate() const;
};

struct ErrorBreakdown {
    double E_T = 0.0;
    double E_G_up = 0.0;
    double E_G_down = 0.0;
    /// Closed-form RMS size of the aliasing force error.
    double F_T_scale = 0.0;
    std::vector<Vec3> F_G_up;
    std::vector<Vec3> F_G_down;
    double total_energy_estimate = 0.0;
};

/// Aliasing energy error E_T summed over 0 < |m| <= m_max. O(N^2) per
/// quadrature node; throws DomainError for N > 256.
double spectral_ET(const ParticleSystem& system, const SogParams& params,
                   const QuadratureConfig& quad = {}, int m_max = 3);

/// pi/2, pi/4, 0 for r_ij >, =, < r_c.
double borwein_T(double r_ij, double r_c);

/// Error from the dropped wide Gaussians l > M.
double EG_up(const ParticleSystem& system, const SogParams& params);
Vec3 FG_up(const ParticleSystem& system, const SogParams& params, std::size_t i);

/// Error from the dropped narrow Gaussians l < l_min (and, for C1, the
/// omega - 1 part of the l = 0 weight) acting on pairs just beyond r_c.
double EG_down(const ParticleSystem& system, const SogParams& params);
Vec3 FG_down(const ParticleSystem& system, const SogParams& params, std::size_t i);

/// All components; E_T only when N <= 256 and with_spectral is set.
ErrorBreakdown error_breakdown(const ParticleSystem& system, const SogParams& params,
                               bool with_spectral = true, int m_max = 3);

/// Ideal-gas RMS estimates split by source.
struct ClosedFormTerms {
    double trapezoid = 0.0; // M-independent aliasing part
    double down = 0.0;      // dropped narrow Gaussians
    double up = 0.0;        // dropped wide Gaussians
    [[nodiscard]] double total() const { return trapezoid + down + up; }
};

ClosedFormTerms closed_form_energy_terms(const SystemSummary& summary, const SogParams& params,
                                         int m_max = 1);
ClosedFormTerms closed_form_force_terms(const SystemSummary& summary, const SogParams& params,
                                        int m_max = 1);
/// Absolute energy error estimate.
double closed_form_energy_error(const SystemSummary& summary, const SogParams& params, int m_max = 1);
/// Absolute RMS force error estimate.
double closed_form_force_error(const SystemSummary& summary, const SogParams& params, int m_max = 1);

/// [3 sqrt(2 pi^3)/16 y^5 erf(sqrt(2) x/y) - (3/4 x y^4 pi + x^3 y^2 pi) e^{-2x^2/y^2}]^{1/2}.
double B_factor(double x, double y);

std::string breakdown_csv_header();
std::string breakdown_csv_row(const SogParams& params, const ErrorBreakdown& breakdown, double dU_est,
                              double dF_est);

} // namespace useries
