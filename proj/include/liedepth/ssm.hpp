#ifndef LIEDEPTH_SSM_HPP
#define LIEDEPTH_SSM_HPP

#include "liedepth/common.hpp"
#include "liedepth/flows.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace liedepth {

/// Affine system over a finite alphabet: h' = A(x) h + b(x), h(0) = h0.
struct SSMSpec {
    int n = 0;
    std::vector<std::string> alphabet;
    std::vector<Matrix> A;
    std::vector<Vector> b;
    Vector h0;

    std::size_t alphabet_size() const noexcept { return A.size(); }
    /// Throws ValidationError on shape mismatches or non-finite entries.
    void validate() const;
    /// Index of a symbol name, ValidationError if unknown.
    int symbol_index(std::string_view name) const;
    bool is_homogeneous(double tol = 0.0) const;

    /// Homogeneous system with the given generators, zero translations and h0 = e_0.
    static SSMSpec from_generators(std::vector<Matrix> generators, std::optional<Vector> h0 = std::nullopt);
};

// Overloads that read the generator family of an SSM.
Matrix transition_matrix(const SSMSpec& ssm, const PiecewisePath& path);
FlowResult magnus_terms(const SSMSpec& ssm, const PiecewisePath& path, int order = 3);
double commutator_mass(const SSMSpec& ssm, const PiecewisePath& path);
Matrix truncated_flow(const SSMSpec& ssm, const PiecewisePath& path, int order);
double generator_mass(const SSMSpec& ssm, const PiecewisePath& path);

/// (n+1)-dimensional homogeneous system with generators [[A, b], [0, 0]]
/// and initial state (h0, 1).
SSMSpec homogenize(const SSMSpec& ssm);

/// Exact h(T) via per-segment exponentials of the homogenized generators.
Vector simulate_state(const SSMSpec& ssm, const PiecewisePath& path);

/// True iff every pairwise generator commutator is below tol * max(1, |A||B|).
bool is_restricted(const SSMSpec& ssm, double tol = 1e-9);

/// Flow-space system on vec(Phi) (column-major): generators I (x) A(x),
/// initial state vec(I). Requires b == 0.
SSMSpec lift(const SSMSpec& ssm);

/// phi(Phi, h0) = Phi h0 with Phi recovered from a lifted state.
Vector project_lifted(const Vector& lifted_state, const Vector& h0);

/// Layered system. Layer 0 is driven directly by the external symbol. For
/// i >= 1 the coefficient vector u_i (one weight per layer-i symbol) is
///   u_i = couplings[i][x] * [h_{i-1}; ...; h_0; 1],
/// so the coupling is linear in lower-layer states for each external symbol,
/// and layer i evolves with A = sum_k u_k A_i(k), b = sum_k u_k b_i(k).
struct DeepSSMSpec {
    std::vector<SSMSpec> layers;
    std::vector<std::vector<Matrix>> couplings;

    std::size_t external_alphabet_size() const;
    /// Columns expected in couplings[i][x].
    Eigen::Index coupling_width(std::size_t layer) const;
    void validate() const;
};

/// Fixed-step RK4 integration of the whole stack; each segment is split into
/// equal substeps no longer than `step` (default: min duration / 64).
/// Returns the final state of every layer.
std::vector<Vector> deep_simulate(const DeepSSMSpec& deep, const PiecewisePath& path,
                                  std::optional<double> step = std::nullopt);

struct PathSampler {
    double horizon = 1.0;
    /// Durations drawn uniformly from {unit, 2 unit, 3 unit, 4 unit}; the last
    /// segment is clipped to end exactly at the horizon.
    double duration_unit = 0.25;
    /// Optional rejection bound on generator mass.
    std::optional<double> mass_bound;
};

/// Sample `index` of the stream seeded by `seed`. Prefixes are shared across
/// horizons: the path for horizon T is the clipped prefix of the path for
/// any longer horizon drawn with the same (seed, index).
PiecewisePath sample_path(const SSMSpec& ssm, const PathSampler& sampler, std::uint64_t seed, std::uint64_t index);

struct SimErrorReport {
    double delta_hat = 0.0;
    Matrix P;
    double horizon = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double duration_unit = 0.25;
};

struct SimErrorOptions {
    double horizon = 1.0;
    std::size_t samples = 200;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    double duration_unit = 0.25;
    std::optional<double> mass_bound;
};

/// Fitted-inf / sampled-sup estimate of the simulation error of `approximant`
/// for `target`: P is the least-squares map from approximant endpoints to
/// target endpoints, delta_hat the largest residual under it.
SimErrorReport estimate_sim_error(const SSMSpec& target, const SSMSpec& approximant, const SimErrorOptions& options);

/// max_x |P h_approx(T) - h_target(T)| over the given paths with P fixed.
double max_residual(const Matrix& P, const SSMSpec& target, const SSMSpec& approximant,
                    std::span<const PiecewisePath> paths);

struct FourPathReport {
    double lhs_norm = 0.0;       // |(h1 - h1') - (h2 - h2')|
    double rhs_norm = 0.0;       // |M (h1(T) - h2(T))|
    double residual = 0.0;       // |lhs - rhs|
    double m_norm = 0.0;         // |Phi_xy - Phi_reverse(xy)|_2
    double prefix_gap = 0.0;     // |h1(T) - h2(T)|
    double first_pair_gap = 0.0; // |h1 - h1'|
};

/// Probe built from prefix_i + xy and prefix_i + reverse(xy), i = 1, 2.
FourPathReport four_path_probe(const SSMSpec& ssm, const PiecewisePath& prefix1, const PiecewisePath& prefix2,
                               const PiecewisePath& xy);

}  // namespace liedepth

#endif
