#pragma once

// Periodic Coulomb energies and forces (Gaussian units, unit charges in e,
// lengths in angstrom): the Ewald oracle and the u-series evaluator.

#include "useries/sog.hpp"
#include "useries/system.hpp"

#include <vector>

namespace useries {

struct EnergyForces {
    double energy = 0.0;
    std::vector<Vec3> forces;
};

/// Sums are arranged per particle, so the result does not depend on the
/// thread count; `parallel` only decides whether OpenMP is used.
struct EvalOptions {
    bool parallel = false;
};

struct EwaldParams {
    double alpha = 0.0;
    double r_real = 0.0;
    double k_cut = 0.0;
};

/// alpha r_real = 6, k_cut = 12 alpha, alpha balancing real and k-space work for the system size.
EwaldParams ewald_default_params(const ParticleSystem& system);

/// Tinfoil Ewald sum. Throws ParameterError when erfc(alpha r_real) or
/// exp(-k_cut^2 / (4 alpha^2)) exceeds 1e-14.
EnergyForces ewald_energy_forces(const ParticleSystem& system, double alpha, double r_real,
                                 double k_cut, const EvalOptions& options = {});
EnergyForces ewald_energy_forces(const ParticleSystem& system, const EvalOptions& options = {});

/// Near part by minimum image within r_c; far part split at s = L/2 into
/// real-space image sums (narrow terms) and a k-space sum (wide terms).
/// Throws ParameterError when L < 2 r_c.
EnergyForces useries_energy_forces(const ParticleSystem& system, const SogParams& params,
                                   double k_tail_tol = 1e-16, const EvalOptions& options = {});

} // namespace useries
