#pragma once

// Special functions behind the spectral error formulas: complex log-Gamma,
// the Fourier constants C(m) and I_m of the trapezoidal aliasing error, and
// the oscillatory integral J_m(x) = \int_0^x sin(t) t^{alpha_m} dt.

#include "useries/quadrature.hpp"

#include <complex>
#include <vector>

namespace useries {

using cplx = std::complex<double>;

/// Fourier index m of the aliasing expansion together with its exponent
/// alpha_m = 2 m pi i / log b.
class SpectralIndex {
public:
    SpectralIndex(int m, double b);

    [[nodiscard]] int m() const noexcept { return m_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    /// Imaginary part of alpha_m.
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] cplx alpha() const noexcept { return {0.0, beta_}; }

private:
    int m_;
    double b_;
    double beta_;
};

/// log Gamma(z) continued analytically from the positive real axis (the
/// branch used by mpmath.loggamma); exp() of the result is Gamma(z).
/// Throws DomainError at the poles z = 0, -1, -2, ...
cplx log_gamma_complex(cplx z);

/// Stirling estimate sqrt(2 pi) (a^2 + b^2)^{(2a-1)/4} exp(-pi |b| / 2) of |Gamma(a + ib)|.
double gamma_magnitude_asymptotic(double alpha, double beta);

/// C(m) = -Gamma((1 - alpha_m)/2) / sqrt(pi) * exp(-alpha_m log(sqrt(2) sigma)).
cplx C_m(int m, double b, double sigma);

/// log C(m), for |m| large enough that C(m) itself underflows.
cplx log_C_m(int m, double b, double sigma);

/// I_m = cosh(m pi^2 / log b) Gamma(1 + alpha_m), composed in log space.
cplx I_m(int m, double b);

/// J_m(x_end): power series for x_end <= 4, beyond that adaptive quadrature
/// over pi-panels added to the series value at pi.
cplx oscillatory_J(int m, double b, double x_end, const QuadratureConfig& quad = {});

/// Cached evaluator of J_m for repeated calls with the same (m, b): whole
/// pi-panels are integrated once and reused.
class OscillatoryJ {
public:
    OscillatoryJ(int m, double b, QuadratureConfig quad = {});

    cplx operator()(double x_end);

    [[nodiscard]] const SpectralIndex& index() const noexcept { return index_; }

private:
    cplx series(double x) const;
    cplx regular_segment(double lo, double hi) const;

    SpectralIndex index_;
    QuadratureConfig quad_;
    std::vector<cplx> cumulative_; // cumulative_[k] = J(k pi), k >= 1
};

/// Smallest x guaranteeing x^{3/2} e^{-x} <= eps:
/// x* = ((3/2) log(3/2) + log(1/eps)) e / (e - 1).
double min_x_bound(double epsilon);

double erf_real(double x);
double erfc_real(double x);

} // namespace useries
