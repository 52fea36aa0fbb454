#include "useries/sog.hpp"

#include "useries/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>

namespace useries {

namespace {

constexpr double kPi = std::numbers::pi;

void check_base(double b, double sigma) {
    if (!(b > 1.0) || !std::isfinite(b)) {
        throw DomainError("base b must be a finite number > 1");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DomainError("sigma must be a finite number > 0");
    }
}

double width(double b, double sigma, int l) { return std::sqrt(2.0) * std::pow(b, l) * sigma; }

double far_sum(const std::vector<GaussianTerm>& terms, double r) {
    const double r2 = r * r;
    double sum = 0.0;
    // Widest terms first: they are the largest near the cutoff.
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
        sum += it->weight * std::exp(-r2 / (it->width * it->width));
    }
    return sum;
}

double far_deriv_sum(const std::vector<GaussianTerm>& terms, double r) {
    const double r2 = r * r;
    double sum = 0.0;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
        const double s2 = it->width * it->width;
        sum += -2.0 * r / s2 * it->weight * std::exp(-r2 / s2);
    }
    return sum;
}

// Geometric grid with 512 points per decade on [lo, hi].
std::vector<double> scan_grid(double lo, double hi) {
    constexpr double kPerDecade = 512.0;
    const int n = std::max(2, static_cast<int>(std::ceil(std::log10(hi / lo) * kPerDecade)) + 1);
    std::vector<double> grid(static_cast<std::size_t>(n));
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
    }
    grid.back() = hi;
    return grid;
}

// Bisection to machine resolution of a bracketed sign change.
double bisect(const std::function<double(double)>& f, double lo, double hi, double f_lo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || (hi - lo) <= 1e-15 * hi) {
            break;
        }
        const double f_mid = f(mid);
        if (f_mid == 0.0) {
            return mid;
        }
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Golden-section minimisation of |f| on [lo, hi]. If a sign change turns up
// on the way, the bracket is bisected instead.
double touch_point(const std::function<double(double)>& f, double lo, double hi) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double d = hi;
    double b = d - inv_phi * (d - a);
    double c = a + inv_phi * (d - a);
    double fb = f(b);
    double fc = f(c);
    const double f_ref = fb;
    for (int it = 0; it < 120 && (d - a) > 1e-15 * d; ++it) {
        if ((fc < 0.0) != (f_ref < 0.0) && fc != 0.0) {
            return bisect(f, b < c ? b : c, b < c ? c : b, b < c ? fb : fc);
        }
        if (std::abs(fb) < std::abs(fc)) {
            d = c;
            c = b;
            fc = fb;
            b = d - inv_phi * (d - a);
            fb = f(b);
            if ((fb < 0.0) != (f_ref < 0.0) && fb != 0.0) {
                return bisect(f, b, c, fb);
            }
        } else {
            a = b;
            b = c;
            fb = fc;
            c = a + inv_phi * (d - a);
            fc = f(c);
        }
    }
    return std::abs(fb) < std::abs(fc) ? b : c;
}

struct RootSearch {
    std::optional<double> root;
    double best_r = 0.0;
    double best_value = 0.0;
};

// Smallest root of f on the grid: a sign change, or a local minimum of
// |f| that touches zero (|f| <= touch_tol(r)).
RootSearch smallest_root(const std::function<double(double)>& f, const std::vector<double>& grid,
                         const std::function<double(double)>& touch_tol) {
    RootSearch out;
    std::vector<double> values;
    values.reserve(grid.size());
    out.best_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = f(grid[i]);
        values.push_back(v);
        if (std::abs(v) < std::abs(out.best_value)) {
            out.best_value = v;
            out.best_r = grid[i];
        }
        if (v == 0.0) {
            out.root = grid[i];
            return out;
        }
        if (i >= 1 && (values[i - 1] < 0.0) != (v < 0.0)) {
            out.root = bisect(f, grid[i - 1], grid[i], values[i - 1]);
            return out;
        }
        // Near-tangent zero between grid[i-2] and grid[i].
        if (i >= 2 && std::abs(values[i - 1]) < std::abs(values[i - 2]) &&
            std::abs(values[i - 1]) < std::abs(v) &&
            std::abs(values[i - 1]) < 1e4 * touch_tol(grid[i - 1])) {
            const double r = touch_point(f, grid[i - 2], grid[i]);
            if (std::abs(f(r)) <= touch_tol(r)) {
                out.root = r;
                return out;
            }
        }
    }
    return out;
}

[[noreturn]] void no_root(const char* what, double b, double sigma, int M, const RootSearch& s) {
    std::ostringstream msg;
    msg.precision(6);
    msg << what << ": no root for b=" << b << ", sigma=" << sigma << ", M=" << M
        << "; closest sample r=" << s.best_r << " with residual " << s.best_value;
    throw NoRootError(msg.str());
}

} // namespace

std::string to_string(Continuity c) { return c == Continuity::C0 ? "c0" : "c1"; }

Continuity parse_continuity(std::string_view text) {
    if (text == "c0" || text == "C0") {
        return Continuity::C0;
    }
    if (text == "c1" || text == "C1") {
        return Continuity::C1;
    }
    throw DomainError("continuity must be c0 or c1, got '" + std::string(text) + "'");
}

GaussianTerm gaussian_term(double b, double sigma, int l) {
    check_base(b, sigma);
    const double s = width(b, sigma, l);
    const double w = std::sqrt(2.0 / kPi) * std::log(b) / (std::pow(b, l) * sigma);
    if (!(s > 0.0) || !std::isfinite(s) || !(w > 0.0) || !std::isfinite(w)) {
        throw DomainError("Gaussian term l=" + std::to_string(l) + " overflows");
    }
    return {l, w, s};
}

std::vector<GaussianTerm> gaussian_terms(double b, double sigma, int l_min, int l_max) {
    check_base(b, sigma);
    if (l_min > l_max) {
        throw DomainError("gaussian_terms: l_min must not exceed l_max");
    }
    std::vector<GaussianTerm> out;
    out.reserve(static_cast<std::size_t>(l_max - l_min + 1));
    for (int l = l_min; l <= l_max; ++l) {
        out.push_back(gaussian_term(b, sigma, l));
    }
    return out;
}

BsaValue bsa_eval(double r, double b, double sigma, int l_abs_max) {
    check_base(b, sigma);
    if (!(r > 0.0)) {
        throw DomainError("bsa_eval: r must be positive");
    }
    if (l_abs_max < 0) {
        throw DomainError("bsa_eval: l_abs_max must be >= 0");
    }
    const auto terms = gaussian_terms(b, sigma, -l_abs_max, l_abs_max);
    BsaValue out;
    out.value = far_sum(terms, r);
    const auto above = gaussian_term(b, sigma, l_abs_max + 1);
    const auto below = gaussian_term(b, sigma, -l_abs_max - 1);
    out.truncation_bound = above.weight * b / (b - 1.0) +
                           2.0 * below.weight * std::exp(-r * r / (below.width * below.width));
    return out;
}

double bsa_uniform_error_bound(double b) {
    if (!(b > 1.0)) {
        throw DomainError("bsa_uniform_error_bound: b must exceed 1");
    }
    return 2.0 * std::sqrt(2.0) * std::exp(-kPi * kPi / (2.0 * std::log(b)));
}

std::vector<std::string> Admissibility::warnings() const {
    std::vector<std::string> out;
    if (!widest_covers_box) {
        out.emplace_back("s_{M+1} < 10 L: the widest dropped Gaussian is not flat over the box");
    }
    if (!narrowest_inside_cut) {
        out.emplace_back("s_{l_min-1} >= r_c: dropped narrow Gaussians reach beyond the cutoff");
    }
    if (!s0_inside_cut) {
        out.emplace_back("s_0 >= r_c: the omega-scaled Gaussian reaches beyond the cutoff");
    }
    if (!box_holds_cutoff) {
        out.emplace_back("L < 2 r_c: minimum image does not cover the near part");
    }
    return out;
}

SogParams::SogParams(double b, double sigma, int M, int l_min, double r_c, Continuity continuity,
                     double omega, CutoffSource source)
    : b_(b), sigma_(sigma), M_(M), l_min_(l_min), continuity_(continuity), omega_(omega), r_c_(r_c),
      source_(source) {
    check_base(b, sigma);
    if (M < 0) {
        throw DomainError("M must be >= 0");
    }
    if (l_min > M) {
        throw DomainError("l_min must not exceed M");
    }
    if (!(r_c > 0.0) || !std::isfinite(r_c)) {
        throw DomainError("r_c must be a finite number > 0");
    }
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw DomainError("omega must be a finite number > 0");
    }
    if (continuity == Continuity::C0 && omega != 1.0) {
        throw DomainError("C0 decompositions have omega = 1");
    }
    if (continuity == Continuity::C1 && l_min > 0) {
        throw DomainError("C1 needs the l = 0 term (l_min <= 0)");
    }
    terms_ = gaussian_terms(b, sigma, l_min, M);
    scaled_ = terms_;
    for (auto& t : scaled_) {
        if (t.index == 0) {
            t.weight *= omega;
        }
    }
}

SogParams SogParams::with_cutoff(double b, double sigma, int M, int l_min, double r_c,
                                 Continuity continuity, double omega) {
    return SogParams(b, sigma, M, l_min, r_c, continuity, omega, CutoffSource::Prescribed);
}

double SogParams::far(double r) const {
    if (!(r >= 0.0)) {
        throw DomainError("far part: r must be >= 0");
    }
    return far_sum(scaled_, r);
}

double SogParams::far_deriv(double r) const {
    if (!(r >= 0.0)) {
        throw DomainError("far part: r must be >= 0");
    }
    return far_deriv_sum(scaled_, r);
}

double SogParams::near(double r) const {
    if (!(r > 0.0)) {
        throw DomainError("near part: r must be > 0");
    }
    return r < r_c_ ? 1.0 / r - far(r) : 0.0;
}

double SogParams::near_deriv(double r) const {
    if (!(r > 0.0)) {
        throw DomainError("near part: r must be > 0");
    }
    return r < r_c_ ? -1.0 / (r * r) - far_deriv(r) : 0.0;
}

double SogParams::c0_residual() const { return r_c_ * far(r_c_) - 1.0; }

double SogParams::c1_residual() const { return -1.0 / (r_c_ * r_c_) - far_deriv(r_c_); }

Admissibility SogParams::admissibility(double L) const {
    Admissibility a;
    a.widest_covers_box = width(b_, sigma_, M_ + 1) >= 10.0 * L;
    a.narrowest_inside_cut = width(b_, sigma_, l_min_ - 1) < r_c_;
    if (continuity_ == Continuity::C1) {
        a.s0_inside_cut = width(b_, sigma_, 0) < r_c_;
    }
    a.box_holds_cutoff = L >= 2.0 * r_c_;
    return a;
}

SogParams SogParams::truncated(int M) const {
    return SogParams(b_, sigma_, M, l_min_, r_c_, continuity_, omega_, CutoffSource::Prescribed);
}

SogParams SogParams::with_l_min(int l_min) const {
    return SogParams(b_, sigma_, M_, l_min, r_c_, continuity_, omega_, CutoffSource::Prescribed);
}

double far_eval(const SogParams& params, double r) { return params.far(r); }

double far_deriv(const SogParams& params, double r) { return params.far_deriv(r); }

double near_eval(const SogParams& params, double r) { return params.near(r); }

SogParams solve_c0(double b, double sigma, int M, int l_min) {
    check_base(b, sigma);
    if (M < 0 || l_min > M) {
        throw DomainError("solve_c0: need M >= 0 and l_min <= M");
    }
    const auto terms = gaussian_terms(b, sigma, l_min, M);
    const auto residual = [&](double r) { return r * far_sum(terms, r) - 1.0; };
    const double lo = sigma / 100.0;
    const double hi = terms.back().width;
    if (!(hi > lo)) {
        throw NoRootError("solve_c0: empty scan interval (s_M <= sigma/100)");
    }
    // rF - 1 only changes sign at a root; tangencies are not roots here.
    const auto search = smallest_root(residual, scan_grid(lo, hi), [](double) { return 0.0; });
    if (!search.root) {
        no_root("solve_c0", b, sigma, M, search);
    }
    SogParams out(b, sigma, M, l_min, *search.root, Continuity::C0, 1.0, CutoffSource::Solved);
    if (std::abs(out.c0_residual()) > 1e-12) {
        std::ostringstream msg;
        msg << "solve_c0: residual " << out.c0_residual() << " at r_c=" << out.r_c();
        throw ConvergenceError(msg.str());
    }
    return out;
}

SogParams solve_c1(double b, double sigma, int M, int l_min) {
    check_base(b, sigma);
    if (M < 0 || l_min > 0) {
        throw DomainError("solve_c1: need M >= 0 and l_min <= 0");
    }
    const auto terms = gaussian_terms(b, sigma, l_min, M);
    const auto zero = std::find_if(terms.begin(), terms.end(), [](const auto& t) { return t.index == 0; });
    const double w0 = zero->weight;
    const double s0 = zero->width;
    // Eliminate omega with the C0 equation; what is left is a scalar
    // equation in r.
    const auto omega_at = [&](double r) {
        const double g0 = w0 * std::exp(-r * r / (s0 * s0));
        return 1.0 + (1.0 / r - far_sum(terms, r)) / g0;
    };
    const auto reduced = [&](double r) {
        const double g0 = w0 * std::exp(-r * r / (s0 * s0));
        const double extra = (omega_at(r) - 1.0) * (-2.0 * r / (s0 * s0)) * g0;
        return -1.0 / (r * r) - far_deriv_sum(terms, r) - extra;
    };
    const double lo = sigma / 100.0;
    // Beyond ~25 s_0 the l = 0 Gaussian underflows and omega is undefined.
    const double hi = std::min(terms.back().width, 25.0 * s0);
    if (!(hi > lo)) {
        throw NoRootError("solve_c1: empty scan interval");
    }
    const auto search = smallest_root(reduced, scan_grid(lo, hi),
                                      [](double r) { return std::min(1e-12, 1e-10 / (r * r)); });
    if (!search.root) {
        no_root("solve_c1", b, sigma, M, search);
    }
    const double r_c = *search.root;
    SogParams out(b, sigma, M, l_min, r_c, Continuity::C1, omega_at(r_c), CutoffSource::Solved);
    const double e0 = out.c0_residual();
    const double e1 = out.c1_residual();
    if (std::abs(e0) > 1e-12 || std::abs(e1) > 1e-12) {
        std::ostringstream msg;
        msg << "solve_c1: residuals (" << e0 << ", " << e1 << ") at r_c=" << r_c
            << ", omega=" << out.omega();
        throw ConvergenceError(msg.str());
    }
    return out;
}

} // namespace useries
