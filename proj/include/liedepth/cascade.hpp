#ifndef LIEDEPTH_CASCADE_HPP
#define LIEDEPTH_CASCADE_HPP

#include "liedepth/common.hpp"
#include "liedepth/flows.hpp"
#include "liedepth/ssm.hpp"

#include <optional>
#include <span>
#include <vector>

namespace liedepth {

// Cascade decomposition of an upper-triangular generator family.
//
// A peel at column c splits every generator A(x) into its strict column-c
// part N(x) (an element of the abelian ideal span{E_rc : r < c}) and the
// remainder s(theta(A(x))), where the section s simply zeroes that strict
// column. Zeroing is bracket preserving on the triangular subalgebra, so the
// extension splits. If Q(t) is the flow of the remainder family, the full
// flow factors as G(t) = Q(t) a(t) with
//   a' = Q^{-1} N(x) Q a,
// an abelian Lie equation on the ideal. Peeling repeats on the remainder,
// highest nonzero column first, until the remainder family commutes.

struct PeelResult {
    bool passthrough = false;           // family already abelian, nothing peeled
    int column = -1;
    std::vector<Matrix> ideal_basis;    // E_rc, r < column
    std::vector<Matrix> ideal_parts;    // per symbol N(x)
    SSMSpec quotient;                   // remainder family s(theta(A(x)))
    double section_defect = 0.0;        // max |s([X,Y]) - [s X, s Y]| over generator pairs
    double ideal_defect = 0.0;          // max out-of-ideal part of [A(x), E_rc]
};

/// One split peel of the highest column with a nonzero strict part.
/// Abelian input passes through unchanged unless error_if_abelian is set.
/// ValidationError if any generator is not upper triangular within tol.
PeelResult peel_split(const SSMSpec& ssm, bool error_if_abelian = false, double tol = 1e-10);

struct CascadeLayer {
    bool base = false;                       // abelian bottom layer (remainder after all peels)
    int column = -1;                         // peeled column for ideal layers
    std::vector<Matrix> ideal_basis;         // ideal layers: E_rc
    std::vector<Matrix> generators;          // base: per-symbol generators; ideal: per-symbol N(x)
    std::vector<Matrix> quotient_generators; // per-symbol family after this peel (conjugating flow)
    std::vector<int> section_columns;        // columns whose strict part the embedding zeroes
};

/// layers[0] is the base; layers[i] (i >= 1) is conjugated by the flow of
/// layers[0..i-1] and the reconstruction is
///   G = G_base * a_1 * ... * a_k.
struct CascadeDecomposition {
    std::vector<CascadeLayer> layers;
    int depth = 0;
    int derived_length = 0;   // of Lie({A(x)}), from the closure
    SSMSpec source;           // generators used (translations ignored)

    double max_layer_commutator() const;
};

/// ValidationError for non-solvable or non-triangular generator families.
CascadeDecomposition decompose(const SSMSpec& ssm);

struct CascadeCheck {
    double max_error = 0.0;            // |G_reconstructed - Phi|_2, max over paths
    double max_ideal_residual = 0.0;   // out-of-ideal part of conjugated generators
    double max_layer_commutator = 0.0;
};

/// Integrates the layers jointly with RK4 (substeps <= step inside each
/// segment), reassembles G(T) and compares it with transition_matrix.
CascadeCheck verify_cascade(const CascadeDecomposition& decomp, std::span<const PiecewisePath> paths, double step,
                            unsigned jobs = 1);

/// Reconstructed G(T) for one path.
Matrix cascade_flow(const CascadeDecomposition& decomp, const PiecewisePath& path, double step,
                    double* ideal_residual = nullptr);

/// Realization of a depth <= 2 decomposition as a DeepSSMSpec with per-symbol
/// linear couplings. Layer 0 carries vec(Q) and vec(q_cc Q^{-1}) restricted to
/// the leading c x c block; layer 1 carries vec(a). Both layers are abelian.
DeepSSMSpec to_deep_ssm(const CascadeDecomposition& decomp);

/// G(T) from the final layer states of to_deep_ssm's system.
Matrix deep_reconstruct(const CascadeDecomposition& decomp, std::span<const Vector> layer_states);

struct ScalingRow {
    double epsilon = 0.0;
    int order = 1;
    double error = 0.0;
    int replicate = 0;
    int depth_equiv = 1;   // ceil(log2 c) + 1, i.e. c = 2^{k-1} for powers of two
};

struct ScalingFit {
    int order = 1;
    double slope = 0.0;
    double intercept = 0.0;
    double expected = 0.0;  // c + 1
};

struct ScalingOptions {
    std::vector<int> orders{1, 2, 3};
    std::vector<double> eps_grid;
    std::size_t paths_per_point = 20;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    std::size_t segments = 6;
};

struct ScalingResult {
    std::vector<ScalingRow> rows;   // one per (epsilon, order, replicate)
    std::vector<ScalingFit> fits;   // log-log least squares of mean error vs epsilon
};

/// k >= 1 with c = 2^{k-1} when c is a power of two.
int depth_equivalent(int order);

/// Truncation-error sweep. Generators are scaled by epsilon and driven by
/// random paths of unit duration (the same paths for every epsilon).
/// ValidationError for commuting generators, epsilon outside (0, 1) or fewer
/// than three grid points.
ScalingResult scaling_experiment(std::span<const Matrix> generators, const ScalingOptions& options);

/// Log-spaced grid [lo, hi] with `points` entries.
std::vector<double> log_grid(double lo, double hi, std::size_t points);

}  // namespace liedepth

#endif
