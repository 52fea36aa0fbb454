#pragma once

// u-series decomposition of 1/r: a finite Gaussian sum F(r) (far part) and a
// compactly supported remainder 1/r - F(r) on r < r_c (near part).

#include <string>
#include <string_view>
#include <vector>

namespace useries {

enum class Continuity { C0, C1 };

std::string to_string(Continuity c);
/// Accepts "c0"/"C0"/"c1"/"C1"; throws DomainError otherwise.
Continuity parse_continuity(std::string_view text);

struct GaussianTerm {
    int index = 0;
    double weight = 0.0; // w_l
    double width = 0.0;  // s_l
};

/// w_l = (pi/2)^{-1/2} b^{-l} sigma^{-1} log b, s_l = sqrt(2) b^l sigma.
GaussianTerm gaussian_term(double b, double sigma, int l);
std::vector<GaussianTerm> gaussian_terms(double b, double sigma, int l_min, int l_max);

struct BsaValue {
    double value = 0.0;
    /// Upper bound on the dropped |l| > l_abs_max tails.
    double truncation_bound = 0.0;
};

/// Bilateral series sum_{|l| <= l_abs_max} w_l exp(-r^2/s_l^2).
BsaValue bsa_eval(double r, double b, double sigma, int l_abs_max);

/// 2 sqrt(2) exp(-pi^2 / (2 log b)).
double bsa_uniform_error_bound(double b);

enum class CutoffSource {
    Solved,     // r_c (and omega) from the continuity equations
    Prescribed, // r_c supplied by the caller
};

struct Admissibility {
    bool widest_covers_box = false;   // s_{M+1} >= 10 L
    bool narrowest_inside_cut = false; // s_{l_min - 1} < r_c
    bool s0_inside_cut = true;         // C1 only: s_0 < r_c
    bool box_holds_cutoff = false;     // L >= 2 r_c

    [[nodiscard]] bool ok() const {
        return widest_covers_box && narrowest_inside_cut && s0_inside_cut && box_holds_cutoff;
    }
    [[nodiscard]] std::vector<std::string> warnings() const;
};

/// One u-series decomposition. Immutable; all members are thread-safe.
class SogParams {
public:
    /// Explicit cutoff; omega multiplies the l = 0 weight (C1 only).
    static SogParams with_cutoff(double b, double sigma, int M, int l_min, double r_c,
                                 Continuity continuity = Continuity::C0, double omega = 1.0);

    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] int M() const noexcept { return M_; }
    [[nodiscard]] int l_min() const noexcept { return l_min_; }
    [[nodiscard]] Continuity continuity() const noexcept { return continuity_; }
    [[nodiscard]] double omega() const noexcept { return omega_; }
    [[nodiscard]] double r_c() const noexcept { return r_c_; }
    [[nodiscard]] CutoffSource cutoff_source() const noexcept { return source_; }

    /// Terms l = l_min..M with the unscaled ladder weights.
    [[nodiscard]] const std::vector<GaussianTerm>& terms() const noexcept { return terms_; }
    /// Same terms with omega applied to l = 0.
    [[nodiscard]] const std::vector<GaussianTerm>& scaled_terms() const noexcept { return scaled_; }

    [[nodiscard]] double far(double r) const;
    [[nodiscard]] double far_deriv(double r) const;
    [[nodiscard]] double near(double r) const;
    [[nodiscard]] double near_deriv(double r) const;

    /// r_c F(r_c) - 1.
    [[nodiscard]] double c0_residual() const;
    /// -1/r_c^2 - F'(r_c).
    [[nodiscard]] double c1_residual() const;

    [[nodiscard]] Admissibility admissibility(double L) const;

    /// Same r_c, omega and continuity with the far sum cut at a different M.
    [[nodiscard]] SogParams truncated(int M) const;
    [[nodiscard]] SogParams with_l_min(int l_min) const;

private:
    SogParams(double b, double sigma, int M, int l_min, double r_c, Continuity continuity,
              double omega, CutoffSource source);

    friend SogParams solve_c0(double, double, int, int);
    friend SogParams solve_c1(double, double, int, int);

    double b_;
    double sigma_;
    int M_;
    int l_min_;
    Continuity continuity_;
    double omega_;
    double r_c_;
    CutoffSource source_;
    std::vector<GaussianTerm> terms_;
    std::vector<GaussianTerm> scaled_;
};

double far_eval(const SogParams& params, double r);
double far_deriv(const SogParams& params, double r);
double near_eval(const SogParams& params, double r);

/// Smallest root of r F(r) - 1 with omega = 1.
SogParams solve_c0(double b, double sigma, int M, int l_min = 0);

/// Smallest (r_c, omega) solving r F(r) = 1 and F'(r) = -1/r^2.
SogParams solve_c1(double b, double sigma, int M, int l_min = 0);

} // namespace useries
