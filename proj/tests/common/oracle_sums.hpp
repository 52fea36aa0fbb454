#pragma once

// Direct image sums shared by the unit and acceptance tests.

#include "useries/sog.hpp"
#include "useries/system.hpp"

#include <cmath>

namespace useries::testing {

inline ParticleSystem four_ions() {
    return ParticleSystem(20.0, {{1.3, 2.1, 3.7}, {7.9, 4.4, 1.2}, {12.6, 15.3, 8.8}, {4.1, 17.7, 13.9}},
                          {1.0, -1.0, 0.6, -0.6});
}

// Near part within r_c by minimum image plus every Gaussian summed directly
// over the image cells |n_i| <= 60, cells beyond 7 s_M skipped.
inline double brute_force_energy(const ParticleSystem& sys, const SogParams& p) {
    const double L = sys.L();
    const auto& x = sys.positions();
    const auto& q = sys.charges();
    const auto& terms = p.scaled_terms();
    const double reach = 7.0 * terms.back().width;
    long double energy = 0.0L;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        for (std::size_t j = 0; j < sys.size(); ++j) {
            if (i != j) {
                const double r = std::sqrt(norm2(sys.minimum_image(i, j)));
                if (r < p.r_c()) {
                    energy += 0.5L * q[i] * q[j] * near_eval(p, r);
                }
            }
            const Vec3 d = x[i] - x[j];
            long double pair = 0.0L;
            for (int a = -60; a <= 60; ++a) {
                for (int b = -60; b <= 60; ++b) {
                    for (int c = -60; c <= 60; ++c) {
                        if (i == j && a == 0 && b == 0 && c == 0) {
                            continue;
                        }
                        const Vec3 r{d[0] + a * L, d[1] + b * L, d[2] + c * L};
                        const double r2 = norm2(r);
                        if (r2 > reach * reach) {
                            continue;
                        }
                        for (const auto& t : terms) {
                            pair += t.weight * std::exp(-r2 / (t.width * t.width));
                        }
                    }
                }
            }
            energy += 0.5L * q[i] * q[j] * pair;
        }
    }
    return static_cast<double>(energy);
}

} // namespace useries::testing
