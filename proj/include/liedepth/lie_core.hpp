#ifndef LIEDEPTH_LIE_CORE_HPP
#define LIEDEPTH_LIE_CORE_HPP

#include "liedepth/common.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace liedepth {

inline constexpr double kDefaultSpanTol = 1e-9;

/// Matrix commutator ab - ba.
Matrix bracket(const Matrix& a, const Matrix& b);

/// tr(a^T b).
double trace_inner(const Matrix& a, const Matrix& b);

/// Orthonormal (trace inner product) spanning set of a subspace of n x n
/// real matrices.
class MatrixBasis {
public:
    explicit MatrixBasis(int n, double tol = kDefaultSpanTol);

    int ambient_dim() const noexcept { return n_; }
    std::size_t size() const noexcept { return elements_.size(); }
    bool empty() const noexcept { return elements_.empty(); }
    double tol() const noexcept { return tol_; }
    const std::vector<Matrix>& elements() const noexcept { return elements_; }
    const Matrix& operator[](std::size_t i) const { return elements_[i]; }

    /// Component of m orthogonal to the span (two Gram-Schmidt passes).
    Matrix residual(const Matrix& m) const;

    /// Span membership at the basis threshold tol * max(1, |m|).
    bool contains(const Matrix& m) const;

    /// In-place span_append; returns whether m enlarged the span.
    bool append(const Matrix& m);

private:
    void check_shape(const Matrix& m) const;

    int n_;
    double tol_;
    std::vector<Matrix> elements_;
};

/// Value-returning form of MatrixBasis::append.
std::pair<MatrixBasis, bool> span_append(MatrixBasis basis, const Matrix& m);

/// Smallest bracket-closed subspace containing the generators.
///
/// Rounds of pairwise brackets are taken breadth first over the current
/// basis (pairs involving at least one element added in the previous
/// round) until a round appends nothing. Throws ValidationError if the
/// dimension exceeds `cap` (default n^2).
MatrixBasis lie_closure(std::span<const Matrix> generators, std::optional<std::size_t> cap = std::nullopt,
                        double tol = kDefaultSpanTol);

/// Largest norm of the out-of-span part of [b_i, b_j] over basis pairs.
double closure_residual(const MatrixBasis& basis);

/// span{[x, y] : x in a, y in b}.
MatrixBasis bracket_span(const MatrixBasis& a, const MatrixBasis& b);

/// g^(0) = g, g^(i) = [g^(i-1), g^(i-1)]; stops at dimension 0 or when two
/// consecutive terms have equal dimension.
std::vector<MatrixBasis> derived_series(const MatrixBasis& basis);

/// g^0 = g, g^i = [g, g^(i-1)]; same stopping rule as derived_series.
std::vector<MatrixBasis> lower_central_series(const MatrixBasis& basis);

struct AlgebraReport {
    std::size_t dim = 0;
    StructureClass class_label = StructureClass::Abelian;
    std::optional<int> derived_length;
    std::optional<int> nilpotency_class;
    std::vector<std::size_t> derived_dims;
    std::vector<std::size_t> lower_central_dims;

    bool solvable() const noexcept { return derived_length.has_value(); }
    bool nilpotent() const noexcept { return nilpotency_class.has_value(); }
};

/// Requires a bracket-closed basis (checked, ValidationError otherwise).
AlgebraReport classify(const MatrixBasis& basis);

}  // namespace liedepth

#endif
