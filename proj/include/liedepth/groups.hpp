#ifndef LIEDEPTH_GROUPS_HPP
#define LIEDEPTH_GROUPS_HPP

#include "liedepth/common.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace liedepth {

/// Finite group given by its full multiplication table.
///
/// compose(a, b) is "a then b": as permutations, compose(p, q)[i] = q[p[i]];
/// as matrices acting on column vectors, the element with matrix B * A.
struct FiniteGroup {
    std::string name;
    int order = 0;
    std::vector<int> table;              // table[a * order + b] = compose(a, b)
    int identity = 0;
    std::vector<int> inverse;
    std::vector<int> generators;
    std::vector<std::string> element_labels;

    int compose(int a, int b) const { return table[static_cast<std::size_t>(a) * order + b]; }
    void check_element(int a) const;
    /// Identity and inverse laws exhaustively; associativity exhaustively for
    /// order <= 60, otherwise over `samples` seeded triples. InvariantError on failure.
    void check_axioms(std::size_t samples = 200000, std::uint64_t seed = 0) const;
    bool is_abelian() const;
};

/// Builds a group from a full table, deriving identity and inverses.
FiniteGroup group_from_table(std::string name, int order, std::vector<int> table,
                             std::vector<int> generators = {}, std::vector<std::string> labels = {});

/// C<n> (n >= 1), D8, H3, S3, S4, S5, A4, A5.
///
/// Indexing: cyclic groups by residue; D8 as (r, f) -> 2r + f acting on
/// Z/4 by v -> r + (-1)^f v; S_n and A_n by lexicographic one-line
/// permutations; H3 as unitriangular 3x3 matrices over F_2 with entries
/// (a, b, c) = (m01, m02, m12) -> 4a + 2b + c.
FiniteGroup make_group(std::string_view name);

std::vector<std::string> group_names();

/// Left-to-right fold from the identity. ValidationError on invalid tokens.
int compose_word(const FiniteGroup& g, std::span<const int> tokens);

/// labels[i] = compose(labels[i-1], tokens[i]), labels[0] = tokens[0].
std::vector<int> prefix_labels(const FiniteGroup& g, std::span<const int> tokens);

/// Subgroup generated by `elements` (sorted element indices).
std::vector<int> generated_subgroup(const FiniteGroup& g, std::span<const int> elements);

/// Orders of G, [G,G], ... until the order stabilizes. Orders up to 120.
std::vector<std::size_t> group_derived_series(const FiniteGroup& g);
/// Orders of G, [G,G], [G,[G,G]], ... until stabilization.
std::vector<std::size_t> group_lower_central_series(const FiniteGroup& g);

struct GroupReport {
    StructureClass class_label = StructureClass::Abelian;
    std::vector<std::size_t> derived_orders;
    std::vector<std::size_t> lower_central_orders;
    int derived_length = -1;     // -1 when not solvable
    int nilpotency_class = -1;   // -1 when not nilpotent
};

GroupReport classify_group(const FiniteGroup& g);

struct WordRecord {
    std::vector<int> tokens;
    std::vector<int> labels;
};

/// Record `index` of the stream for `seed`; tokens uniform over elements.
/// With bos, both sequences are prefixed with the token id g.order.
WordRecord gen_word_record(const FiniteGroup& g, std::size_t length, std::uint64_t seed, std::uint64_t index,
                           bool bos = false);
std::vector<WordRecord> gen_word_dataset(const FiniteGroup& g, std::size_t length, std::size_t count,
                                         std::uint64_t seed, unsigned jobs = 1, bool bos = false);

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// The icosahedral rotation group generated by the permutation matrix P
/// (a 120 degree rotation) and the 72 degree rotation R.
struct A5Rotations {
    std::vector<Mat3> matrices;  // sorted lexicographically by rounded entries
    FiniteGroup group;           // table from matrix products, compose(g, h) ~ M_h * M_g
    int p_index = -1;
    int r_index = -1;
};

Mat3 a5_generator_p();
Mat3 a5_generator_r();

/// InvariantError unless the closure has exactly 60 elements.
const A5Rotations& a5_rotation_elements();

/// Number of (g, h) pairs where the matrix table disagrees with the abstract
/// A5 table under the best isomorphism found from generator images; 3600
/// (all pairs) if no bijective candidate exists.
std::size_t a5_isomorphism_mismatches();

struct RotationRecord {
    std::vector<int> tokens;
    Vec3 v0;
    std::vector<Vec3> targets;
};

/// v0 uniform on the sphere; targets[i] = M_{t_i} targets[i-1], targets[0] = M_{t_0} v0.
RotationRecord gen_rotation_record(std::size_t length, std::uint64_t seed, std::uint64_t index);
std::vector<RotationRecord> gen_rotation_dataset(std::size_t length, std::size_t count, std::uint64_t seed,
                                                 unsigned jobs = 1);

/// Fraction of sequences correct at every position. ValidationError on shape mismatch.
double sequence_accuracy(const std::vector<std::vector<int>>& predictions, const std::vector<std::vector<int>>& golds);

}  // namespace liedepth

#endif
