#pragma once

// Adaptive Gauss-Kronrod (7-15) quadrature for real- and complex-valued
// integrands. Global subdivision: the panel with the largest error estimate
// is bisected until the summed estimate meets the tolerance.

#include "useries/error.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <sstream>
#include <vector>

namespace useries {

struct QuadratureConfig {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    int max_subdivisions = 2000;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_subdivisions < 1) {
            throw DomainError("QuadratureConfig: tolerances must be > 0 and max_subdivisions >= 1");
        }
    }
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T>
struct Panel {
    double a;
    double b;
    T value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class T, class Func>
Panel<T> gauss_kronrod_15(const Func& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const T fc = f(centre);
    T kronrod = fc * kKronrodWeights[7];
    T gauss = fc * kGaussWeights[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const T pair = f(centre - dx) + f(centre + dx);
        kronrod += pair * kKronrodWeights[i];
        if (i % 2 == 1) {
            gauss += pair * kGaussWeights[i / 2];
        }
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, magnitude(kronrod - gauss)};
}

} // namespace detail

/// Result of an adaptive integration.
template <class T>
struct QuadratureResult {
    T value{};
    double error = 0.0;
    int subdivisions = 0;
};

/// Integrate f over [a, b]. Throws ConvergenceError when the subdivision
/// budget is exhausted before the error estimate satisfies
/// err <= max(abs_tol, rel_tol * |value|).
template <class T, class Func>
QuadratureResult<T> integrate_adaptive(const Func& f, double a, double b,
                                       const QuadratureConfig& cfg) {
    cfg.validate();
    QuadratureResult<T> out;
    if (a == b) {
        return out;
    }
    std::priority_queue<detail::Panel<T>> work;
    auto first = detail::gauss_kronrod_15<T>(f, a, b);
    T total = first.value;
    double err = first.error;
    work.push(first);
    int splits = 0;
    while (err > std::max(cfg.abs_tol, cfg.rel_tol * detail::magnitude(total))) {
        if (splits >= cfg.max_subdivisions) {
            std::ostringstream msg;
            msg << "adaptive quadrature on [" << a << ", " << b << "] did not converge after "
                << splits << " subdivisions (error estimate " << err << ")";
            throw ConvergenceError(msg.str());
        }
        auto worst = work.top();
        work.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = detail::gauss_kronrod_15<T>(f, worst.a, mid);
        auto right = detail::gauss_kronrod_15<T>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        work.push(left);
        work.push(right);
        ++splits;
        if (mid == worst.a || mid == worst.b) {
            break; // panel width at machine resolution
        }
    }
    // Re-sum to shed the drift accumulated by incremental updates.
    total = T{};
    err = 0.0;
    while (!work.empty()) {
        total += work.top().value;
        err += work.top().error;
        work.pop();
    }
    out.value = total;
    out.error = err;
    out.subdivisions = splits;
    return out;
}

} // namespace useries
