#include "useries/estimators.hpp"

#include "useries/error.hpp"
#include "useries/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace useries {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);

// Terms beyond this relative size are dropped from the l-tails.
constexpr double kTailTol = 1e-18;

// Dropped wide Gaussians l = M+1, M+2, ... until w_l < kTailTol * w_{M+1}.
std::vector<GaussianTerm> up_tail(const SogParams& p) {
    std::vector<GaussianTerm> out;
    const auto first = gaussian_term(p.b(), p.sigma(), p.M() + 1);
    out.push_back(first);
    for (int l = p.M() + 2;; ++l) {
        const auto t = gaussian_term(p.b(), p.sigma(), l);
        if (t.weight < kTailTol * first.weight) {
            break;
        }
        out.push_back(t);
    }
    return out;
}

// Coefficient A and width s of each term of the narrow-side error kernel
// G_down(r) = sum_{l < l_min} w_l e^{-r^2/s_l^2} - (omega - 1) w_0 e^{-r^2/s_0^2}.
struct DownTerm {
    double coeff;
    double width;
};

std::vector<DownTerm> down_terms(const SogParams& p) {
    std::vector<DownTerm> out;
    const double rc2 = p.r_c() * p.r_c();
    double lead = 0.0;
    for (int l = p.l_min() - 1; l >= p.l_min() - 40; --l) {
        const auto t = gaussian_term(p.b(), p.sigma(), l);
        const double size = t.weight * std::exp(-rc2 / (t.width * t.width));
        if (l == p.l_min() - 1) {
            lead = size;
        } else if (size < kTailTol * lead || size == 0.0) {
            break;
        }
        out.push_back({t.weight, t.width});
    }
    if (p.continuity() == Continuity::C1) {
        const auto t0 = gaussian_term(p.b(), p.sigma(), 0);
        out.push_back({-(p.omega() - 1.0) * t0.weight, t0.width});
    }
    return out;
}

// Visit every periodic image pair (i, j, n) with r_c < r < r_max.
template <class Visit>
void over_cutoff_images(const ParticleSystem& sys, std::size_t i, double r_c, double r_max,
                        const Visit& visit) {
    const double L = sys.L();
    const int nmax = static_cast<int>(std::floor(r_max / L + 0.5));
    const double lo2 = r_c * r_c;
    const double hi2 = r_max * r_max;
    for (std::size_t j = 0; j < sys.size(); ++j) {
        const Vec3 d0 = sys.minimum_image(i, j);
        for (int a = -nmax; a <= nmax; ++a) {
            for (int b = -nmax; b <= nmax; ++b) {
                for (int c = -nmax; c <= nmax; ++c) {
                    const Vec3 d{d0[0] + a * L, d0[1] + b * L, d0[2] + c * L};
                    const double r2 = norm2(d);
                    if (r2 > lo2 && r2 < hi2) {
                        visit(j, d, std::sqrt(r2));
                    }
                }
            }
        }
    }
}

// Range beyond r_c over which e^{-2 r_c (r - r_c)/s^2} stays above kTailTol,
// capped at 3 box lengths. The cap only binds once a dropped width exceeds
// r_c, where the linearised shell model no longer applies (admissibility
// reports it) and the uncapped image count grows as s^6.
double down_reach(const std::vector<DownTerm>& terms, double r_c, double L) {
    double s_max = 0.0;
    for (const auto& t : terms) {
        s_max = std::max(s_max, t.width);
    }
    return std::min(r_c + std::log(1.0 / kTailTol) * s_max * s_max / (2.0 * r_c), r_c + 3.0 * L);
}

// Even moments sum_{i != j} q_i q_j r_ij^{2n}, so that the structure sum
// S(k) = sum_ij q_i q_j sinc(k r_ij) = (sum q)^2 + sum_{n>=1} (-1)^n k^{2n} mu_n / (2n+1)!
// without the O(N^2) cancellation of evaluating sinc pair by pair.
// Minimum-image r_ij <= sqrt(3) L/2 and k <= 2 pi/L keep k r_ij below 5.5,
// where 40 terms are ample.
struct StructureSeries {
    double q_total_sq = 0.0;
    std::vector<double> coeff; // (-1)^n mu_n / (2n+1)!, n >= 1

    double operator()(double k) const {
        const double k2 = k * k;
        double s = 0.0;
        double kp = 1.0;
        for (double c : coeff) {
            kp *= k2;
            s += c * kp;
        }
        return q_total_sq + s;
    }
};

StructureSeries structure_series(const ParticleSystem& sys) {
    constexpr int kTerms = 40;
    const auto& q = sys.charges();
    std::vector<double> mu(kTerms + 1, 0.0);
    const double L = sys.L();
    // Scaled by L/2 to keep the powers in range.
    const double unit = L / 2.0;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        for (std::size_t j = 0; j < sys.size(); ++j) {
            if (i == j) {
                continue;
            }
            const double x2 = norm2(sys.minimum_image(i, j)) / (unit * unit);
            double p = q[i] * q[j];
            for (int n = 1; n <= kTerms; ++n) {
                p *= x2;
                mu[static_cast<std::size_t>(n)] += p;
            }
        }
    }
    StructureSeries out;
    double total = 0.0;
    for (double qi : q) {
        total += qi;
    }
    out.q_total_sq = total * total;
    double fact = 1.0; // (2n+1)!
    double scale = 1.0;
    for (int n = 1; n <= kTerms; ++n) {
        fact *= (2.0 * n) * (2.0 * n + 1.0);
        scale *= unit * unit;
        out.coeff.push_back((n % 2 == 0 ? 1.0 : -1.0) * mu[static_cast<std::size_t>(n)] * scale / fact);
    }
    return out;
}

// Integral over [0, k_hi] of k^{-alpha} S(k) [I_m - J_m(k r_c)]. S(k) = O(k^2)
// by neutrality, so k = k_hi e^t with t in [-14, 0] covers the integrand to ~1e-18.
cplx low_k_integral(int m, const SogParams& p, const StructureSeries& S, double k_hi,
                    const QuadratureConfig& quad) {
    OscillatoryJ J(m, p.b(), quad);
    const cplx Im = I_m(m, p.b());
    const double beta = J.index().beta();
    const auto integrand = [&](double t) {
        const double k = k_hi * std::exp(t);
        return k * std::polar(1.0, -beta * std::log(k)) * S(k) * (Im - J(k * p.r_c()));
    };
    const double t_lo = -14.0;
    const double period = 2.0 * kPi / std::abs(beta);
    const int n = std::max(1, static_cast<int>(std::ceil(-t_lo / period)));
    const auto edge = [&](int c) { return t_lo * (1.0 - static_cast<double>(c) / n); };
    // A coarse pass fixes the absolute scale, so that chunks far down the
    // k^3 tail are not held to a relative tolerance of their own.
    double scale = 0.0;
    for (int c = 0; c < n; ++c) {
        scale += std::abs(detail::gauss_kronrod_15<cplx>(integrand, edge(c), edge(c + 1)).value);
    }
    QuadratureConfig local = quad;
    local.abs_tol = std::max(quad.abs_tol, quad.rel_tol * scale) / n;
    cplx sum = 0.0;
    for (int c = 0; c < n; ++c) {
        sum += integrate_adaptive<cplx>(integrand, edge(c), edge(c + 1), local).value;
    }
    return sum;
}

} // namespace

SystemSummary SystemSummary::from(const ParticleSystem& system, double r_c) {
    SystemSummary s;
    s.N = system.size();
    s.L = system.L();
    s.V = system.volume();
    s.Q = system.charge_squared_sum();
    const auto& q = system.charges();
    double w = 0.0;
    for (std::size_t i = 0; i < s.N; ++i) {
        for (std::size_t j = 0; j < s.N; ++j) {
            if (norm2(system.minimum_image(i, j)) > r_c * r_c) {
                w += q[i] * q[j];
            }
        }
    }
    s.over_cutoff_pair_weight = w;
    return s;
}

void SystemSummary::validate() const {
    if (N < 1 || !(L > 0.0) || !(V > 0.0) || !(Q >= 0.0)) {
        throw DomainError("SystemSummary: need N >= 1, L > 0, V > 0, Q >= 0");
    }
}

double borwein_T(double r_ij, double r_c) {
    if (!(r_ij > 0.0)) {
        throw DomainError("borwein_T: r_ij must be positive");
    }
    if (r_ij > r_c) {
        return kPi / 2.0;
    }
    return r_ij == r_c ? kPi / 4.0 : 0.0;
}

double spectral_ET(const ParticleSystem& system, const SogParams& params, const QuadratureConfig& quad,
                   int m_max) {
    if (system.size() > 256) {
        throw DomainError("spectral_ET: O(N^2) quadrature is limited to N <= 256");
    }
    if (m_max < 1) {
        throw DomainError("spectral_ET: m_max must be >= 1");
    }
    quad.validate();
    const auto& q = system.charges();
    const double r_c = params.r_c();
    std::vector<double> pair_r;
    std::vector<double> pair_qq;
    for (std::size_t i = 0; i < system.size(); ++i) {
        for (std::size_t j = 0; j < system.size(); ++j) {
            if (i != j) {
                pair_r.push_back(std::sqrt(norm2(system.minimum_image(i, j))));
                pair_qq.push_back(q[i] * q[j]);
            }
        }
    }
    const double k_hi = 2.0 * kPi / system.L();
    const auto series = structure_series(system);
    cplx total = 0.0;
    double scale = 0.0;
    for (int m = -m_max; m <= m_max; ++m) {
        if (m == 0) {
            continue;
        }
        const double beta = SpectralIndex(m, params.b()).beta();
        // Pairs beyond the cutoff: the k-integral over [0, inf) of the
        // bracket reduces to (pi/2) r^{alpha - 1} H(r - r_c).
        cplx direct = 0.0;
        for (std::size_t t = 0; t < pair_r.size(); ++t) {
            if (pair_r[t] > r_c) {
                direct += pair_qq[t] * std::polar(1.0 / pair_r[t], beta * std::log(pair_r[t]));
            }
        }
        const cplx low = low_k_integral(m, params, series, k_hi, quad);
        const cplx term = C_m(m, params.b(), params.sigma()) * (0.5 * direct - low / kPi);
        total += term;
        scale += std::abs(term);
    }
    if (std::abs(total.imag()) > 1e-10 * std::max(scale, 1e-300)) {
        std::ostringstream msg;
        msg << "spectral_ET: imaginary residue " << total.imag() << " exceeds 1e-10 of " << scale;
        throw ConvergenceError(msg.str());
    }
    return total.real();
}

double EG_up(const ParticleSystem& system, const SogParams& params) {
    const auto tail = up_tail(params);
    const double b = params.b();
    const double s_M = gaussian_term(b, params.sigma(), params.M()).width;
    const double r_c = params.r_c();
    const auto& q = system.charges();
    const std::size_t n = system.size();
    double g0 = 0.0;
    for (const auto& t : tail) {
        g0 += t.weight;
    }
    double total_q = 0.0;
    for (double qi : q) {
        total_q += qi;
    }
    // sum_ij q_i q_j G(r_ij) = sum_ij q_i q_j (G(r_ij) - G(0)) + G(0) (sum q)^2,
    // avoiding the cancellation of the O(1/s) parts.
    double gauss = g0 * total_q * total_q;
    double bracket = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double qq = q[i] * q[j];
            if (i == j) {
                bracket += qq * kSqrtPi;
                continue;
            }
            const double r2 = norm2(system.minimum_image(i, j));
            const double r = std::sqrt(r2);
            double g = 0.0;
            for (const auto& t : tail) {
                g += t.weight * std::expm1(-r2 / (t.width * t.width));
            }
            gauss += qq * g;
            bracket += qq * (kSqrtPi * std::min(r_c / r, 1.0) - 2.0 * r_c / (kSqrtPi * r) * borwein_T(r, r_c));
        }
    }
    // Up to the overall sign this is the tail Gaussian sum plus the
    // truncation-correction term, in the exact - approximate convention.
    return -(0.5 * gauss + std::log(b) / (kPi * (b - 1.0) * s_M) * bracket);
}

Vec3 FG_up(const ParticleSystem& system, const SogParams& params, std::size_t i) {
    if (i >= system.size()) {
        throw DomainError("FG_up: particle index out of range");
    }
    const auto tail = up_tail(params);
    const double r_c = params.r_c();
    const auto& q = system.charges();
    // Only pairs inside the cutoff: beyond it the periodic sum of a Gaussian
    // much wider than the box has no gradient.
    Vec3 f{0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < system.size(); ++j) {
        if (j == i) {
            continue;
        }
        const Vec3 d = system.minimum_image(i, j);
        const double r2 = norm2(d);
        if (r2 >= r_c * r_c) {
            continue;
        }
        double g = 0.0;
        for (const auto& t : tail) {
            const double s2 = t.width * t.width;
            g += 2.0 * t.weight / s2 * std::exp(-r2 / s2);
        }
        f = f + (-q[j] * g) * d;
    }
    return q[i] * f;
}

double EG_down(const ParticleSystem& system, const SogParams& params) {
    const auto terms = down_terms(params);
    if (terms.empty()) {
        return 0.0;
    }
    const double r_c = params.r_c();
    const double reach = down_reach(terms, r_c, system.L());
    const auto& q = system.charges();
    std::vector<double> amplitude;
    std::vector<double> decay;
    for (const auto& t : terms) {
        const double s2 = t.width * t.width;
        amplitude.push_back(t.coeff * std::exp(-r_c * r_c / s2));
        decay.push_back(2.0 * r_c / s2);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < system.size(); ++i) {
        over_cutoff_images(system, i, r_c, reach, [&](std::size_t j, const Vec3&, double r) {
            double g = 0.0;
            for (std::size_t k = 0; k < amplitude.size(); ++k) {
                g += amplitude[k] * std::exp(-decay[k] * (r - r_c));
            }
            total += q[i] * q[j] / r * g;
        });
    }
    return 0.5 * r_c * total;
}

Vec3 FG_down(const ParticleSystem& system, const SogParams& params, std::size_t i) {
    if (i >= system.size()) {
        throw DomainError("FG_down: particle index out of range");
    }
    const auto terms = down_terms(params);
    if (terms.empty()) {
        return {0.0, 0.0, 0.0};
    }
    const double r_c = params.r_c();
    const double reach = down_reach(terms, r_c, system.L());
    const auto& q = system.charges();
    Vec3 f{0.0, 0.0, 0.0};
    over_cutoff_images(system, i, r_c, reach, [&](std::size_t j, const Vec3& d, double r) {
        double radial = 0.0;
        for (const auto& t : terms) {
            const double s2 = t.width * t.width;
            radial += t.coeff * std::exp(-r_c * r_c / s2) * (1.0 + 2.0 * r_c * r / s2) *
                      std::exp(-2.0 * r_c * (r - r_c) / s2);
        }
        f = f + (q[j] * radial / (r * r * r)) * d;
    });
    return (r_c * q[i]) * f;
}

ErrorBreakdown error_breakdown(const ParticleSystem& system, const SogParams& params, bool with_spectral,
                               int m_max) {
    ErrorBreakdown out;
    if (with_spectral && system.size() <= 256) {
        out.E_T = spectral_ET(system, params, {}, m_max);
    }
    out.E_G_up = EG_up(system, params);
    out.E_G_down = EG_down(system, params);
    const auto summary = SystemSummary::from(system, params.r_c());
    out.F_T_scale = closed_form_force_terms(summary, params).trapezoid;
    out.F_G_up.reserve(system.size());
    out.F_G_down.reserve(system.size());
    for (std::size_t i = 0; i < system.size(); ++i) {
        out.F_G_up.push_back(FG_up(system, params, i));
        out.F_G_down.push_back(FG_down(system, params, i));
    }
    out.total_energy_estimate = out.E_T + out.E_G_up + out.E_G_down;
    return out;
}

ClosedFormTerms closed_form_energy_terms(const SystemSummary& summary, const SogParams& params, int m_max) {
    summary.validate();
    if (m_max < 1) {
        throw DomainError("closed form: m_max must be >= 1");
    }
    const double r_c = params.r_c();
    const double V = summary.V;
    const double Q = summary.Q;
    ClosedFormTerms out;
    cplx trap = 0.0;
    double scale = 0.0;
    for (int m = -m_max; m <= m_max; ++m) {
        if (m == 0) {
            continue;
        }
        const cplx alpha = SpectralIndex(m, params.b()).alpha();
        // r_c^{1 + 2 alpha} / (1 + 2 alpha): the Mellin-regularised
        // int_{r_c}^inf r^{2 alpha} dr up to sign.
        const cplx mellin = std::exp((1.0 + 2.0 * alpha) * std::log(r_c)) / (1.0 + 2.0 * alpha);
        const cplx term = C_m(m, params.b(), params.sigma()) * std::sqrt(-kPi * mellin / V);
        trap += term;
        scale += std::abs(term);
    }
    if (std::abs(trap.imag()) > 1e-10 * std::max(scale, 1e-300)) {
        throw ConvergenceError("closed_form_energy_error: imaginary residue after +-m pairing");
    }
    // Each m contributes with its modulus: the signed +-m sum depends on the
    // phase beta log(sqrt(2) sigma / r_c) and can cancel far below the
    // configuration-to-configuration spread it is meant to describe.
    out.trapezoid = Q * scale;

    double down = 0.0;
    for (const auto& t : down_terms(params)) {
        down += t.coeff * t.width * std::exp(-r_c * r_c / (t.width * t.width));
    }
    out.down = 0.5 * Q * std::sqrt(kPi * r_c / V) * std::abs(down);

    const double b = params.b();
    const double s_M = gaussian_term(b, params.sigma(), params.M()).width;
    out.up = std::log(b) / (kSqrtPi * (b - 1.0) * s_M) * std::abs(summary.over_cutoff_pair_weight);
    return out;
}

ClosedFormTerms closed_form_force_terms(const SystemSummary& summary, const SogParams& params, int m_max) {
    summary.validate();
    if (m_max < 1) {
        throw DomainError("closed form: m_max must be >= 1");
    }
    const double r_c = params.r_c();
    const double NV = static_cast<double>(summary.N) * summary.V;
    const double Q = summary.Q;
    ClosedFormTerms out;
    // Ideal-gas variance of the aliasing force kernel sum_m C_m (alpha_m - 1)
    // r^{alpha_m - 2} beyond r_c, all (m, m') pairs: int_{r_c}^inf r^{g - 2} dr
    // with g = alpha_m + conj(alpha_m') converges since Re g = 0.
    std::vector<cplx> amp;
    std::vector<cplx> alphas;
    for (int m = -m_max; m <= m_max; ++m) {
        if (m != 0) {
            alphas.push_back(SpectralIndex(m, params.b()).alpha());
            amp.push_back(C_m(m, params.b(), params.sigma()) * (alphas.back() - 1.0));
        }
    }
    cplx var = 0.0;
    for (std::size_t u = 0; u < amp.size(); ++u) {
        for (std::size_t v = 0; v < amp.size(); ++v) {
            const cplx g = alphas[u] + std::conj(alphas[v]);
            var += amp[u] * std::conj(amp[v]) * std::exp((g - 1.0) * std::log(r_c)) / (1.0 - g);
        }
    }
    if (std::abs(var.imag()) > 1e-10 * std::abs(var)) {
        throw ConvergenceError("closed_form_force_error: imaginary residue in the aliasing variance");
    }
    out.trapezoid = Q / std::sqrt(NV) * std::sqrt(4.0 * kPi * std::max(var.real(), 0.0));

    double down = 0.0;
    for (const auto& t : down_terms(params)) {
        const double s = t.width;
        down += t.coeff / s * std::sqrt(kPi * (4.0 * r_c * r_c * r_c + 3.0 * r_c * s * s)) *
                std::exp(-r_c * r_c / (s * s));
    }
    out.down = Q / std::sqrt(NV) * std::abs(down);

    const double b = params.b();
    const double s_next = gaussian_term(b, params.sigma(), params.M() + 1).width;
    // 4 log b from d/dr of w_l e^{-r^2/s_l^2}, and 1/(1 - b^{-3}) from summing
    // the s_l^{-3} tail beyond M + 1.
    const double tail = 1.0 / (1.0 - std::pow(b, -3.0));
    out.up = 4.0 * Q * std::log(b) * tail * B_factor(summary.L / 2.0, s_next) /
             (std::sqrt(kPi * NV) * s_next * s_next * s_next);
    return out;
}

double closed_form_energy_error(const SystemSummary& summary, const SogParams& params, int m_max) {
    return closed_form_energy_terms(summary, params, m_max).total();
}

double closed_form_force_error(const SystemSummary& summary, const SogParams& params, int m_max) {
    return closed_form_force_terms(summary, params, m_max).total();
}

double B_factor(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0)) {
        throw DomainError("B_factor: x and y must be positive");
    }
    const double z = x / y;
    const double radicand = 3.0 * std::sqrt(2.0 * kPi * kPi * kPi) / 16.0 * std::pow(y, 5) *
                                std::erf(std::sqrt(2.0) * z) -
                            (0.75 * x * std::pow(y, 4) * kPi + x * x * x * y * y * kPi) *
                                std::exp(-2.0 * z * z);
    if (radicand < 0.0) {
        // The bracket is 4 pi int_0^x r^4 e^{-2r^2/y^2} dr > 0; a negative
        // value can only be cancellation for x << y, where that integral is
        // 4 pi x^5 / 5 to leading order.
        if (z < 1e-2) {
            return std::sqrt(4.0 * kPi / 5.0) * std::pow(x, 2.5);
        }
        throw DomainError("B_factor: negative radicand");
    }
    if (z < 1e-2) {
        return std::sqrt(4.0 * kPi / 5.0) * std::pow(x, 2.5) * std::sqrt(1.0 - 10.0 / 7.0 * z * z);
    }
    return std::sqrt(radicand);
}

std::string breakdown_csv_header() {
    return "b,sigma,M,l_min,continuity,E_T,E_G_up,E_G_down,dU_est,dF_est";
}

std::string breakdown_csv_row(const SogParams& params, const ErrorBreakdown& breakdown, double dU_est,
                              double dF_est) {
    std::ostringstream row;
    row.imbue(std::locale::classic());
    row << std::setprecision(17) << params.b() << ',' << params.sigma() << ',' << params.M() << ','
        << params.l_min() << ',' << to_string(params.continuity()) << ',' << std::setprecision(6)
        << breakdown.E_T << ',' << breakdown.E_G_up << ',' << breakdown.E_G_down << ',' << dU_est << ','
        << dF_est;
    return row.str();
}

} // namespace useries
