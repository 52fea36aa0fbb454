#pragma once

// Charged particles in a periodic cube, generators, and the XYZQ format.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace useries {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Vec3& a) { return dot(a, a); }

class ParticleSystem {
public:
    /// Wraps positions into [0, L). Throws DomainError for N < 2, L <= 0,
    /// mismatched sizes, non-finite input, or |sum q| > 1e-12.
    ParticleSystem(double L, std::vector<Vec3> positions, std::vector<double> charges);

    [[nodiscard]] double L() const noexcept { return L_; }
    [[nodiscard]] double volume() const noexcept { return L_ * L_ * L_; }
    [[nodiscard]] std::size_t size() const noexcept { return charges_.size(); }
    [[nodiscard]] const std::vector<Vec3>& positions() const noexcept { return positions_; }
    [[nodiscard]] const std::vector<double>& charges() const noexcept { return charges_; }
    /// Q = sum q_i^2.
    [[nodiscard]] double charge_squared_sum() const noexcept;

    /// r_i - r_j reduced to the nearest image.
    [[nodiscard]] Vec3 minimum_image(std::size_t i, std::size_t j) const;

    [[nodiscard]] ParticleSystem translated(const Vec3& shift) const;
    /// Copy with one particle moved (used for finite differences).
    [[nodiscard]] ParticleSystem with_position(std::size_t i, const Vec3& r) const;

private:
    double L_;
    std::vector<Vec3> positions_;
    std::vector<double> charges_;
};

/// 8 alternating unit charges on the (L/2)-spaced sublattice; +1 at the origin.
ParticleSystem madelung_system(double L);

/// N/2 charges +1 and N/2 charges -1, uniform in the cube (mt19937_64).
ParticleSystem random_neutral_system(int N, double L, std::uint64_t seed);

/// XYZQ: line 1 N, line 2 L, then N lines "x y z q".
ParticleSystem read_system(std::istream& in);
ParticleSystem load_system(const std::filesystem::path& path);
void write_system(std::ostream& out, const ParticleSystem& system);
void save_system(const std::filesystem::path& path, const ParticleSystem& system);

} // namespace useries
