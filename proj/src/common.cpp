#include "liedepth/common.hpp"

#include <algorithm>
#include <cmath>

namespace liedepth {

const char* to_string(StructureClass c) noexcept {
    switch (c) {
        case StructureClass::Abelian: return "abelian";
        case StructureClass::Nilpotent: return "nilpotent";
        case StructureClass::Solvable: return "solvable";
        case StructureClass::NonSolvable: return "non_solvable";
    }
    return "unknown";
}

bool all_finite(const Matrix& m) noexcept {
    return m.allFinite();
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    const double fro = m.norm();
    if (fro == 0.0) return 0.0;
    if (!std::isfinite(fro)) throw ValidationError("spectral_norm: non-finite matrix");
    if (m.rows() == 1 || m.cols() == 1) return fro;

    // Scale first so the Gram matrix neither overflows nor underflows.
    const Matrix scaled = m / fro;
    const Matrix gram = scaled.transpose() * scaled;
    const Eigen::Index n = gram.rows();
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
    v.normalize();

    double lambda = 0.0;
    for (int it = 0; it < 10000; ++it) {
        Vector w = gram * v;
        lambda = v.dot(w);
        const double residual = (w - lambda * v).norm();
        const double wn = w.norm();
        if (wn == 0.0) break;
        v = w / wn;
        if (residual <= 1e-10 * std::max(lambda, 1e-300)) {
            lambda = v.dot(gram * v);
            break;
        }
    }
    return fro * std::sqrt(std::max(lambda, 0.0));
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}
}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
        s = splitmix64(s);
        word = s;
    }
}

Rng Rng::for_index(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(seed) ^ splitmix64(index ^ 0xD1B54A32D192ED03ull));
}

// xoshiro256**
std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw ValidationError("Rng::below: empty range");
    // Rejection keeps the draw exactly uniform.
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

double Rng::normal() {
    // Box-Muller; u1 is kept away from zero.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace liedepth
