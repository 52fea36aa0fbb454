#include "useries/system.hpp"

#include "useries/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>

namespace useries {

namespace {

double wrap(double x, double L) {
    double y = x - L * std::floor(x / L);
    // floor can leave y == L after rounding.
    return y >= L ? 0.0 : y;
}

bool next_content_line(std::istream& in, std::string& line, int& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            return true;
        }
    }
    return false;
}

template <class T>
T parse_fields(const std::string& line, int line_no, std::size_t count, std::vector<double>* out) {
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    if constexpr (std::is_same_v<T, long long>) {
        long long n = 0;
        std::string rest;
        if (!(fields >> n) || (fields >> rest)) {
            throw ParseError("expected a single integer, got '" + line + "'", line_no);
        }
        return n;
    } else {
        out->clear();
        double v = 0.0;
        while (fields >> v) {
            out->push_back(v);
        }
        if (!fields.eof() || out->size() != count) {
            throw ParseError("expected " + std::to_string(count) + " numbers, got '" + line + "'",
                             line_no);
        }
        return T{};
    }
}

} // namespace

ParticleSystem::ParticleSystem(double L, std::vector<Vec3> positions, std::vector<double> charges)
    : L_(L), positions_(std::move(positions)), charges_(std::move(charges)) {
    if (!(L > 0.0) || !std::isfinite(L)) {
        throw DomainError("box length L must be a finite number > 0");
    }
    if (positions_.size() != charges_.size()) {
        throw DomainError("positions and charges differ in length");
    }
    if (charges_.size() < 2) {
        throw DomainError("a system needs at least 2 particles");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < charges_.size(); ++i) {
        if (!std::isfinite(charges_[i])) {
            throw DomainError("non-finite charge at particle " + std::to_string(i));
        }
        total += charges_[i];
        for (double& x : positions_[i]) {
            if (!std::isfinite(x)) {
                throw DomainError("non-finite coordinate at particle " + std::to_string(i));
            }
            x = wrap(x, L_);
        }
    }
    if (std::abs(total) > 1e-12) {
        std::ostringstream msg;
        msg << "system is not charge neutral (sum q = " << total << ")";
        throw DomainError(msg.str());
    }
}

double ParticleSystem::charge_squared_sum() const noexcept {
    double q2 = 0.0;
    for (double q : charges_) {
        q2 += q * q;
    }
    return q2;
}

Vec3 ParticleSystem::minimum_image(std::size_t i, std::size_t j) const {
    Vec3 d = positions_[i] - positions_[j];
    for (double& x : d) {
        x -= L_ * std::nearbyint(x / L_);
    }
    return d;
}

ParticleSystem ParticleSystem::translated(const Vec3& shift) const {
    auto moved = positions_;
    for (auto& p : moved) {
        p = p + shift;
    }
    return {L_, std::move(moved), charges_};
}

ParticleSystem ParticleSystem::with_position(std::size_t i, const Vec3& r) const {
    auto moved = positions_;
    moved.at(i) = r;
    return {L_, std::move(moved), charges_};
}

ParticleSystem madelung_system(double L) {
    if (!(L > 0.0)) {
        throw DomainError("madelung_system: L must be positive");
    }
    std::vector<Vec3> positions;
    std::vector<double> charges;
    const double a = L / 2.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                positions.push_back({i * a, j * a, k * a});
                charges.push_back((i + j + k) % 2 == 0 ? 1.0 : -1.0);
            }
        }
    }
    return {L, std::move(positions), std::move(charges)};
}

ParticleSystem random_neutral_system(int N, double L, std::uint64_t seed) {
    if (N < 2 || N % 2 != 0) {
        throw DomainError("random_neutral_system: N must be even and >= 2");
    }
    std::mt19937_64 rng(seed);
    // Explicit scaling instead of uniform_real_distribution, whose output
    // is implementation-defined.
    const auto uniform = [&] { return L * static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<Vec3> positions(static_cast<std::size_t>(N));
    std::vector<double> charges(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        positions[static_cast<std::size_t>(i)] = {uniform(), uniform(), uniform()};
        charges[static_cast<std::size_t>(i)] = i % 2 == 0 ? 1.0 : -1.0;
    }
    return {L, std::move(positions), std::move(charges)};
}

ParticleSystem read_system(std::istream& in) {
    std::string line;
    int line_no = 0;
    if (!next_content_line(in, line, line_no)) {
        throw ParseError("empty input, expected particle count", line_no + 1);
    }
    const long long n = parse_fields<long long>(line, line_no, 1, nullptr);
    if (n < 2) {
        throw ParseError("particle count must be >= 2", line_no);
    }
    if (!next_content_line(in, line, line_no)) {
        throw ParseError("missing box length line", line_no + 1);
    }
    std::vector<double> values;
    parse_fields<double>(line, line_no, 1, &values);
    const double L = values[0];
    if (!(L > 0.0)) {
        throw ParseError("box length must be positive", line_no);
    }
    std::vector<Vec3> positions;
    std::vector<double> charges;
    for (long long i = 0; i < n; ++i) {
        if (!next_content_line(in, line, line_no)) {
            throw ParseError("expected " + std::to_string(n) + " particle lines, found " +
                                 std::to_string(i),
                             line_no + 1);
        }
        parse_fields<double>(line, line_no, 4, &values);
        positions.push_back({values[0], values[1], values[2]});
        charges.push_back(values[3]);
    }
    if (next_content_line(in, line, line_no)) {
        throw ParseError("unexpected content after the last particle", line_no);
    }
    try {
        return {L, std::move(positions), std::move(charges)};
    } catch (const DomainError& e) {
        throw ParseError(e.what(), 0);
    }
}

ParticleSystem load_system(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open '" + path.string() + "'");
    }
    return read_system(in);
}

void write_system(std::ostream& out, const ParticleSystem& system) {
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf << std::setprecision(17);
    buf << system.size() << '\n' << system.L() << '\n';
    for (std::size_t i = 0; i < system.size(); ++i) {
        const auto& p = system.positions()[i];
        buf << p[0] << ' ' << p[1] << ' ' << p[2] << ' ' << system.charges()[i] << '\n';
    }
    out << buf.str();
}

void save_system(const std::filesystem::path& path, const ParticleSystem& system) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    write_system(out, system);
}

} // namespace useries
