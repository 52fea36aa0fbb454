#include "useries/specfun.hpp"

#include "useries/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace useries {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesLimit = 4.0;

// B_{2k} / (2k (2k - 1)), k = 1..8.
constexpr std::array<double, 8> kStirling = {
    1.0 / 12.0,      -1.0 / 360.0,        1.0 / 1260.0, -1.0 / 1680.0,
    1.0 / 1188.0,    -691.0 / 360360.0,   1.0 / 156.0,  -3617.0 / 122400.0};

cplx stirling_log_gamma(cplx z) {
    const cplx inv = 1.0 / z;
    const cplx inv2 = inv * inv;
    cplx series = 0.0;
    cplx power = inv;
    for (double c : kStirling) {
        series += c * power;
        power *= inv2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series;
}

bool is_pole(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

} // namespace

SpectralIndex::SpectralIndex(int m, double b) : m_(m), b_(b) {
    if (m == 0) {
        throw DomainError("SpectralIndex: m must be nonzero");
    }
    if (!(b > 1.0)) {
        throw DomainError("SpectralIndex: base b must exceed 1");
    }
    beta_ = 2.0 * m * kPi / std::log(b);
}

cplx log_gamma_complex(cplx z) {
    if (is_pole(z)) {
        throw DomainError("log_gamma_complex: pole at non-positive integer");
    }
    // Upward recurrence instead of reflection: each log(z + k) is continuous
    // off the real axis, so the sum stays on the branch continued from z > 0.
    constexpr double kShiftTo = 15.0;
    int n = z.real() < 0.5 ? static_cast<int>(std::ceil(0.5 - z.real())) : 0;
    if (std::abs(z + static_cast<double>(n)) < kShiftTo) {
        n = static_cast<int>(std::ceil(kShiftTo - z.real()));
    }
    cplx shift_sum = 0.0;
    for (int k = 0; k < n; ++k) {
        shift_sum += std::log(z + static_cast<double>(k));
    }
    z += static_cast<double>(n);
    return stirling_log_gamma(z) - shift_sum;
}

double gamma_magnitude_asymptotic(double alpha, double beta) {
    return std::sqrt(2.0 * kPi) * std::pow(alpha * alpha + beta * beta, (2.0 * alpha - 1.0) / 4.0) *
           std::exp(-0.5 * kPi * std::abs(beta));
}

cplx log_C_m(int m, double b, double sigma) {
    if (!(sigma > 0.0)) {
        throw DomainError("C_m: sigma must be positive");
    }
    const SpectralIndex idx(m, b);
    const cplx alpha = idx.alpha();
    return cplx{0.0, kPi} + log_gamma_complex(0.5 * (1.0 - alpha)) - 0.5 * std::log(kPi) -
           alpha * std::log(std::sqrt(2.0) * sigma);
}

cplx C_m(int m, double b, double sigma) {
    const cplx lc = log_C_m(m, b, sigma);
    // The modulus is tiny; the phase carries everything, so wrap it first.
    const double phase = std::remainder(lc.imag(), 2.0 * kPi);
    return std::polar(std::exp(lc.real()), phase);
}

cplx I_m(int m, double b) {
    const SpectralIndex idx(m, b);
    const double x = std::abs(m * kPi * kPi / std::log(b));
    const double log_cosh = x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
    const cplx lg = log_gamma_complex(1.0 + idx.alpha());
    const double phase = std::remainder(lg.imag(), 2.0 * kPi);
    return std::polar(std::exp(log_cosh + lg.real()), phase);
}

OscillatoryJ::OscillatoryJ(int m, double b, QuadratureConfig quad) : index_(m, b), quad_(quad) {
    quad_.validate();
}

cplx OscillatoryJ::series(double x) const {
    // sum_n (-1)^n x^{2n+2+alpha} / ((2n+1)! (2n+2+alpha)); for x <= 4 the
    // largest term is below 50, so cancellation costs at most two digits.
    const cplx alpha = index_.alpha();
    const cplx x_alpha = std::polar(1.0, index_.beta() * std::log(x));
    const double x2 = x * x;
    double power = x2;     // x^{2n+2}
    double factorial = 1.0; // (2n+1)!
    cplx sum = 0.0;
    for (int n = 0; n < 60; ++n) {
        const cplx term = (n % 2 == 0 ? 1.0 : -1.0) * power / factorial / (2.0 * n + 2.0 + alpha);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) {
            break;
        }
        power *= x2;
        factorial *= (2.0 * n + 2.0) * (2.0 * n + 3.0);
    }
    return x_alpha * sum;
}

cplx OscillatoryJ::regular_segment(double lo, double hi) const {
    const double beta = index_.beta();
    const double phase = std::abs(beta) * std::log(hi / lo);
    const int n = 1 + static_cast<int>(phase / kPi);
    QuadratureConfig local = quad_;
    local.abs_tol = quad_.abs_tol / n;
    auto integrand = [beta](double x) { return std::sin(x) * std::polar(1.0, beta * std::log(x)); };
    cplx sum = 0.0;
    const double h = (hi - lo) / n;
    for (int k = 0; k < n; ++k) {
        const double a = lo + k * h;
        const double c = (k + 1 == n) ? hi : a + h;
        sum += integrate_adaptive<cplx>(integrand, a, c, local).value;
    }
    return sum;
}

cplx OscillatoryJ::operator()(double x_end) {
    if (!(x_end >= 0.0)) {
        throw DomainError("oscillatory_J: x_end must be >= 0");
    }
    if (x_end == 0.0) {
        return 0.0;
    }
    if (x_end <= kSeriesLimit) {
        return series(x_end);
    }
    const auto panels = static_cast<std::size_t>(std::floor(x_end / kPi));
    if (cumulative_.empty()) {
        cumulative_.push_back(series(kPi));
    }
    while (cumulative_.size() < panels) {
        const double k = static_cast<double>(cumulative_.size());
        cumulative_.push_back(cumulative_.back() + regular_segment(k * kPi, (k + 1.0) * kPi));
    }
    const double start = static_cast<double>(panels) * kPi;
    const cplx base = cumulative_[panels - 1];
    return x_end > start ? base + regular_segment(start, x_end) : base;
}

cplx oscillatory_J(int m, double b, double x_end, const QuadratureConfig& quad) {
    OscillatoryJ j(m, b, quad);
    return j(x_end);
}

double min_x_bound(double epsilon) {
    if (!(epsilon > 0.0)) {
        throw DomainError("min_x_bound: epsilon must be positive");
    }
    const double e = std::numbers::e;
    return (1.5 * std::log(1.5) + std::log(1.0 / epsilon)) * e / (e - 1.0);
}

double erf_real(double x) { return std::erf(x); }

double erfc_real(double x) { return std::erfc(x); }

} // namespace useries
