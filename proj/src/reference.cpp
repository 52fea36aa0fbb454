#include "useries/reference.hpp"

#include "useries/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace useries {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

struct KVector {
    int h, k, l;
    Vec3 kv;
    double k2;
    double ghat; // Fourier transform of the pair kernel at |k|
};

// (1/2V) sum_{k != 0} ghat(k) |rho(k)|^2 and its forces, k = 0 dropped.
template <class Ghat>
EnergyForces kspace_sum(const ParticleSystem& sys, double k_cut, const Ghat& ghat,
                        const EvalOptions& opt) {
    const std::size_t n = sys.size();
    const double L = sys.L();
    const double V = sys.volume();
    const double dk = 2.0 * kPi / L;
    const int nmax = static_cast<int>(std::floor(k_cut / dk));
    EnergyForces out;
    out.forces.assign(n, Vec3{0.0, 0.0, 0.0});
    if (nmax < 1) {
        return out;
    }

    std::vector<KVector> ks;
    for (int h = 0; h <= nmax; ++h) {
        for (int k = (h == 0 ? 0 : -nmax); k <= nmax; ++k) {
            for (int l = (h == 0 && k == 0 ? 1 : -nmax); l <= nmax; ++l) {
                const Vec3 kv{dk * h, dk * k, dk * l};
                const double k2 = norm2(kv);
                if (k2 > k_cut * k_cut) {
                    continue;
                }
                const double g = ghat(k2);
                if (g != 0.0) {
                    ks.push_back({h, k, l, kv, k2, g});
                }
            }
        }
    }

    // Per-axis phase tables e^{i dk m x}, m = -nmax..nmax.
    const std::size_t width = static_cast<std::size_t>(2 * nmax + 1);
    std::vector<cplx> phase(n * 3 * width);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < 3; ++a) {
            const double x = sys.positions()[i][a];
            for (int m = -nmax; m <= nmax; ++m) {
                phase[(i * 3 + a) * width + static_cast<std::size_t>(m + nmax)] = std::polar(1.0, dk * m * x);
            }
        }
    }
    const auto eikr = [&](std::size_t i, const KVector& kv) {
        const cplx* p = &phase[i * 3 * width];
        return p[kv.h + nmax] * p[width + static_cast<std::size_t>(kv.k + nmax)] *
               p[2 * width + static_cast<std::size_t>(kv.l + nmax)];
    };

    const auto& q = sys.charges();
    std::vector<cplx> rho(ks.size());
    const auto nk = static_cast<std::ptrdiff_t>(ks.size());
#pragma omp parallel for schedule(static) if (opt.parallel)
    for (std::ptrdiff_t t = 0; t < nk; ++t) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            s += q[j] * eikr(j, ks[static_cast<std::size_t>(t)]);
        }
        rho[static_cast<std::size_t>(t)] = s;
    }
    // Half space: each +k/-k pair counted once, hence 1/V instead of 1/(2V).
    double energy = 0.0;
    for (std::size_t t = 0; t < ks.size(); ++t) {
        energy += ks[t].ghat * std::norm(rho[t]);
    }
    out.energy = energy / V;
#pragma omp parallel for schedule(static) if (opt.parallel)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        Vec3 f{0.0, 0.0, 0.0};
        for (std::size_t t = 0; t < ks.size(); ++t) {
            const double im = std::imag(eikr(i, ks[t]) * std::conj(rho[t]));
            f = f + (ks[t].ghat * im) * ks[t].kv;
        }
        out.forces[i] = (2.0 * q[i] / V) * f;
    }
    return out;
}

// Pair kernel g(r) summed over all periodic images within r_cut, excluding
// the i = j, n = 0 term. PairFn(r2) returns {g(r), g'(r)/r}.
template <class PairFn>
EnergyForces image_sum(const ParticleSystem& sys, double r_cut, const PairFn& pair,
                       const EvalOptions& opt) {
    const std::size_t n = sys.size();
    const double L = sys.L();
    const int nmax = static_cast<int>(std::floor(r_cut / L + 0.5));
    const double rc2 = r_cut * r_cut;
    const auto& q = sys.charges();
    EnergyForces out;
    out.forces.assign(n, Vec3{0.0, 0.0, 0.0});
    std::vector<double> row_energy(n, 0.0);
#pragma omp parallel for schedule(dynamic, 4) if (opt.parallel)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double phi = 0.0;
        Vec3 f{0.0, 0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const Vec3 d0 = sys.minimum_image(i, j);
            for (int a = -nmax; a <= nmax; ++a) {
                const double dx = d0[0] + a * L;
                if (dx * dx >= rc2) {
                    continue;
                }
                for (int b = -nmax; b <= nmax; ++b) {
                    const double dy = d0[1] + b * L;
                    if (dx * dx + dy * dy >= rc2) {
                        continue;
                    }
                    for (int c = -nmax; c <= nmax; ++c) {
                        const double dz = d0[2] + c * L;
                        const double r2 = dx * dx + dy * dy + dz * dz;
                        if (r2 >= rc2 || (i == j && a == 0 && b == 0 && c == 0)) {
                            continue;
                        }
                        const auto [g, dg_over_r] = pair(r2);
                        phi += q[j] * g;
                        const double s = -q[j] * dg_over_r;
                        f = f + Vec3{s * dx, s * dy, s * dz};
                    }
                }
            }
        }
        row_energy[i] = 0.5 * q[i] * phi;
        out.forces[i] = q[i] * f;
    }
    for (double e : row_energy) {
        out.energy += e;
    }
    return out;
}

void accumulate(EnergyForces& total, const EnergyForces& part) {
    total.energy += part.energy;
    if (total.forces.empty()) {
        total.forces = part.forces;
        return;
    }
    for (std::size_t i = 0; i < total.forces.size(); ++i) {
        total.forces[i] = total.forces[i] + part.forces[i];
    }
}

} // namespace

EwaldParams ewald_default_params(const ParticleSystem& system) {
    // Real space within the minimum-image half box; k-space then needs
    // |m| <= 23 per axis.
    EwaldParams p;
    p.r_real = system.L() / 2.0;
    p.alpha = 6.0 / p.r_real;
    p.k_cut = 12.0 * p.alpha;
    return p;
}

EnergyForces ewald_energy_forces(const ParticleSystem& system, double alpha, double r_real,
                                 double k_cut, const EvalOptions& options) {
    if (!(alpha > 0.0) || !(r_real > 0.0) || !(k_cut > 0.0)) {
        throw ParameterError("ewald: alpha, r_real and k_cut must be positive");
    }
    const double real_tail = std::erfc(alpha * r_real);
    const double k_tail = std::exp(-k_cut * k_cut / (4.0 * alpha * alpha));
    if (real_tail > 1e-14 || k_tail > 1e-14) {
        std::ostringstream msg;
        msg << "ewald: tails too large (real " << real_tail << ", reciprocal " << k_tail
            << "); raise alpha*r_real or k_cut/alpha";
        throw ParameterError(msg.str());
    }
    const double two_over_sqrt_pi = 2.0 / std::sqrt(kPi);
    EnergyForces total = image_sum(
        system, r_real,
        [&](double r2) {
            const double r = std::sqrt(r2);
            const double g = std::erfc(alpha * r) / r;
            const double dg = -(g + two_over_sqrt_pi * alpha * std::exp(-alpha * alpha * r2)) / r;
            return std::pair{g, dg / r};
        },
        options);
    const double inv4a2 = 1.0 / (4.0 * alpha * alpha);
    accumulate(total, kspace_sum(
                          system, k_cut,
                          [&](double k2) { return 4.0 * kPi * std::exp(-k2 * inv4a2) / k2; },
                          options));
    total.energy -= alpha / std::sqrt(kPi) * system.charge_squared_sum();
    return total;
}

EnergyForces ewald_energy_forces(const ParticleSystem& system, const EvalOptions& options) {
    const auto p = ewald_default_params(system);
    return ewald_energy_forces(system, p.alpha, p.r_real, p.k_cut, options);
}

EnergyForces useries_energy_forces(const ParticleSystem& system, const SogParams& params,
                                   double k_tail_tol, const EvalOptions& options) {
    const double L = system.L();
    if (L < 2.0 * params.r_c()) {
        std::ostringstream msg;
        msg << "useries: box length " << L << " is smaller than 2 r_c = " << 2.0 * params.r_c();
        throw ParameterError(msg.str());
    }
    if (!(k_tail_tol > 0.0 && k_tail_tol < 1e-3)) {
        throw ParameterError("useries: k_tail_tol must lie in (0, 1e-3)");
    }
    const double r_c = params.r_c();
    const double rc2 = r_c * r_c;
    const double split = L / 2.0;
    std::vector<GaussianTerm> narrow;
    std::vector<GaussianTerm> wide;
    for (const auto& t : params.scaled_terms()) {
        (t.width <= split ? narrow : wide).push_back(t);
    }
    const double log_tol = std::log(1.0 / k_tail_tol);

    // Near part; L >= 2 r_c leaves at most one image inside the cutoff.
    EnergyForces total = image_sum(
        system, r_c,
        [&](double r2) {
            if (r2 >= rc2) {
                return std::pair{0.0, 0.0};
            }
            const double r = std::sqrt(r2);
            return std::pair{params.near(r), params.near_deriv(r) / r};
        },
        options);

    if (!narrow.empty()) {
        const double r_cut = narrow.back().width * std::sqrt(log_tol);
        accumulate(total, image_sum(
                              system, r_cut,
                              [&](double r2) {
                                  double g = 0.0;
                                  double dg_over_r = 0.0;
                                  for (auto it = narrow.rbegin(); it != narrow.rend(); ++it) {
                                      const double s2 = it->width * it->width;
                                      if (r2 > log_tol * s2) {
                                          break; // narrower terms are smaller still
                                      }
                                      const double e = it->weight * std::exp(-r2 / s2);
                                      g += e;
                                      dg_over_r += -2.0 / s2 * e;
                                  }
                                  return std::pair{g, dg_over_r};
                              },
                              options));
    }

    if (!wide.empty()) {
        const double k_cut = 2.0 * std::sqrt(log_tol) / wide.front().width;
        const double log_pi32 = 1.5 * std::log(kPi);
        accumulate(total, kspace_sum(
                              system, k_cut,
                              [&](double k2) {
                                  double g = 0.0;
                                  for (const auto& t : wide) {
                                      const double x = k2 * t.width * t.width / 4.0;
                                      if (x > 745.0) {
                                          break; // wider terms underflow too
                                      }
                                      g += t.weight * std::exp(log_pi32 + 3.0 * std::log(t.width) - x);
                                  }
                                  return g;
                              },
                              options));
        double self = 0.0;
        for (const auto& t : wide) {
            self += t.weight;
        }
        total.energy -= 0.5 * system.charge_squared_sum() * self;
    }
    return total;
}

} // namespace useries
