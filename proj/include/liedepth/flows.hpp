#ifndef LIEDEPTH_FLOWS_HPP
#define LIEDEPTH_FLOWS_HPP

#include "liedepth/common.hpp"

#include <span>
#include <vector>

namespace liedepth {

struct Segment {
    int symbol = 0;
    double duration = 0.0;

    bool operator==(const Segment&) const = default;
};

/// Piecewise-constant input path: segments applied in order over [0, T].
class PiecewisePath {
public:
    PiecewisePath() = default;
    /// Throws ValidationError on an empty list, a non-positive duration or a
    /// negative symbol.
    explicit PiecewisePath(std::vector<Segment> segments);

    const std::vector<Segment>& segments() const noexcept { return segments_; }
    std::size_t size() const noexcept { return segments_.size(); }
    bool empty() const noexcept { return segments_.empty(); }
    const Segment& operator[](std::size_t i) const { return segments_[i]; }
    double total() const noexcept;

    /// Throws if any symbol is >= alphabet_size.
    void check_symbols(std::size_t alphabet_size) const;

    bool operator==(const PiecewisePath&) const = default;

private:
    std::vector<Segment> segments_;
};

PiecewisePath reverse_path(const PiecewisePath& path);
PiecewisePath concat(const PiecewisePath& first, const PiecewisePath& second);
/// Segments reordered as order[0], order[1], ...; order must be a permutation.
PiecewisePath permute_segments(const PiecewisePath& path, std::span<const std::size_t> order);

/// Matrix exponential: scaling and squaring around a degree-13 Pade approximant.
Matrix expm(const Matrix& m);

/// Principal logarithm for |m - I|_2 < 1 (NumericalGuardError otherwise).
/// Inverse scaling and squaring: square roots until |X - I| <= 0.25, then the
/// atanh series of the Cayley transform.
Matrix logm_principal(const Matrix& m);

/// Phi(T, 0) = expm(A_k d_k) ... expm(A_1 d_1).
Matrix transition_matrix(std::span<const Matrix> generators, const PiecewisePath& path);

/// Sum of |A(symbol)|_2 * duration.
double generator_mass(std::span<const Matrix> generators, const PiecewisePath& path);

struct FlowResult {
    Matrix phi;
    Matrix omega1;
    Matrix omega2;
    Matrix omega3;
    int order = 3;
    double generator_mass = 0.0;
};

/// Magnus terms up to `order` (1..3) for a piecewise-constant path, by exact
/// reduction of the iterated integrals to sums over segment indices. Terms
/// above `order` are returned as zero matrices.
FlowResult magnus_terms(std::span<const Matrix> generators, const PiecewisePath& path, int order = 3);

Matrix magnus_omega2(std::span<const Matrix> generators, const PiecewisePath& path);
Matrix magnus_omega3(std::span<const Matrix> generators, const PiecewisePath& path);

/// |Omega_2|_2.
double commutator_mass(std::span<const Matrix> generators, const PiecewisePath& path);

/// expm(Omega_1 + ... + Omega_order). NumericalGuardError when the generator
/// mass of the path is >= 1.
Matrix truncated_flow(std::span<const Matrix> generators, const PiecewisePath& path, int order);

}  // namespace liedepth

#endif
