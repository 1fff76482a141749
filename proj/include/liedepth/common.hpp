#ifndef LIEDEPTH_COMMON_HPP
#define LIEDEPTH_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace liedepth {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr const char* kVersion = "0.3.0";

// Numeric values double as process exit codes for the CLI.
enum class ErrorKind : int {
    Validation = 2,
    NumericalGuard = 3,
    Invariant = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

// Raised when an input leaves the regime an approximation is valid in
// (generator mass >= 1, logarithm outside its convergence ball, ...).
struct NumericalGuardError : Error {
    explicit NumericalGuardError(const std::string& what) : Error(ErrorKind::NumericalGuard, what) {}
};

struct InvariantError : Error {
    explicit InvariantError(const std::string& what) : Error(ErrorKind::Invariant, what) {}
};

/// Shared structural label for Lie algebras and finite groups.
enum class StructureClass { Abelian, Nilpotent, Solvable, NonSolvable };

const char* to_string(StructureClass c) noexcept;

bool all_finite(const Matrix& m) noexcept;

/// Largest singular value by power iteration on m^T m.
///
/// Deterministic start vector, stops once the eigen-residual drops below
/// 1e-10 relative to the current estimate (or after 10000 sweeps).
double spectral_norm(const Matrix& m);

/// Seedable generator with a portable output sequence. All mapping from raw
/// 64-bit draws to doubles/integers is done here rather than through
/// <random> distributions, whose outputs are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent stream for record/sample `index` of a run seeded with `seed`.
    static Rng for_index(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform on {0, ..., n-1}; n > 0.
    std::uint64_t below(std::uint64_t n);
    double normal();

private:
    std::uint64_t state_[4];
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Runs fn(i) for i in [0, count) on up to `jobs` threads with a static
/// strided assignment. If any call throws, the exception raised by the
/// smallest failing index is rethrown, so failures are reproducible.
template <class F>
void parallel_for(std::size_t count, unsigned jobs, F&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::size_t> error_index(workers, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                try {
                    fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    error_index[w] = i;
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    std::size_t best = count;
    std::exception_ptr first;
    for (unsigned w = 0; w < workers; ++w) {
        if (errors[w] && error_index[w] < best) {
            best = error_index[w];
            first = errors[w];
        }
    }
    if (first) std::rethrow_exception(first);
}

}  // namespace liedepth

#endif
