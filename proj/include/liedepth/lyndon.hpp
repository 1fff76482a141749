#ifndef LIEDEPTH_LYNDON_HPP
#define LIEDEPTH_LYNDON_HPP

#include "liedepth/common.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace liedepth {

/// Letters are integers; order is lexicographic with a proper prefix
/// smaller than any extension.
using Word = std::vector<int>;

/// Counts are unsigned 128-bit; anything that would not fit throws ValidationError.
using WideCount = unsigned __int128;

std::string to_decimal(WideCount v);

bool is_lyndon(std::span<const int> w);

/// Chen-Fox-Lyndon factorization by Duval's algorithm: factors are Lyndon,
/// non-increasing, and concatenate to w. ValidationError for an empty word.
std::vector<Word> cfl_factorize(std::span<const int> w);

/// (l1, l2) with l2 the longest proper Lyndon suffix. ValidationError for
/// length < 2 or non-Lyndon input.
std::pair<Word, Word> costandard_split(std::span<const int> l);

struct BracketTree {
    int letter = -1;  // >= 0 on leaves
    std::shared_ptr<const BracketTree> left;
    std::shared_ptr<const BracketTree> right;

    bool leaf() const noexcept { return letter >= 0; }
    Word leaves() const;
    /// "0" for leaves, "[l,r]" for nodes.
    std::string str() const;
};

/// Recursive costandard bracketing. ValidationError for non-Lyndon input.
std::shared_ptr<const BracketTree> bracket_tree(std::span<const int> l);

/// Leaves map through `assignment`, nodes to the commutator of their children.
Matrix evaluate(const BracketTree& tree, std::span<const Matrix> assignment);

/// Lyndon words over {0..n-1} of length 1..max_len in lexicographic order
/// (Duval's successor method). Visits stop early if fn returns false.
void for_each_lyndon(int n, int max_len, const std::function<bool(const Word&)>& fn);
std::vector<Word> enumerate_lyndon(int n, int max_len);

/// Moebius function values mu(0..limit) by linear sieve (mu(0) unused, 0).
std::vector<int> moebius_table(int limit);

/// (1/m) sum_{d | m} mu(m/d) n^d.
WideCount lyndon_count(int n, int m);
/// sum_{m=1}^{T} lyndon_count(n, m).
WideCount witt_dimension(int n, int T);

/// ceil(log2 T) + 1.
int depth_bound(long long T);
WideCount width_bound(int n, int T);

struct LyndonTableRow {
    int n = 0;
    int m = 0;
    WideCount count = 0;
    WideCount cumulative = 0;
};

std::vector<LyndonTableRow> lyndon_table(int n, int T);

}  // namespace liedepth

#endif
