#include "liedepth/lyndon.hpp"

#include "liedepth/lie_core.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace liedepth {

std::string to_decimal(WideCount v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

namespace {

void require_nonempty(std::span<const int> w, const char* who) {
    if (w.empty()) throw ValidationError(std::string(who) + ": empty word");
    for (int a : w) {
        if (a < 0) throw ValidationError(std::string(who) + ": negative letter");
    }
}

}  // namespace

std::vector<Word> cfl_factorize(std::span<const int> w) {
    require_nonempty(w, "cfl_factorize");
    std::vector<Word> out;
    const std::size_t n = w.size();
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        std::size_t k = i;
        while (j < n && w[k] <= w[j]) {
            k = (w[k] < w[j]) ? i : k + 1;
            ++j;
        }
        while (i <= k) {
            out.emplace_back(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(i + j - k));
            i += j - k;
        }
    }
    return out;
}

bool is_lyndon(std::span<const int> w) {
    if (w.empty()) return false;
    return cfl_factorize(w).size() == 1;
}

std::pair<Word, Word> costandard_split(std::span<const int> l) {
    require_nonempty(l, "costandard_split");
    if (l.size() < 2) throw ValidationError("costandard_split: word of length 1 has no split");
    if (!is_lyndon(l)) throw ValidationError("costandard_split: word is not Lyndon");
    for (std::size_t i = 1; i < l.size(); ++i) {
        if (is_lyndon(l.subspan(i))) {
            return {Word(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(i)),
                    Word(l.begin() + static_cast<std::ptrdiff_t>(i), l.end())};
        }
    }
    throw InvariantError("costandard_split: no Lyndon suffix found");
}

Word BracketTree::leaves() const {
    if (leaf()) return {letter};
    Word w = left->leaves();
    const Word r = right->leaves();
    w.insert(w.end(), r.begin(), r.end());
    return w;
}

std::string BracketTree::str() const {
    if (leaf()) return std::to_string(letter);
    return "[" + left->str() + "," + right->str() + "]";
}

std::shared_ptr<const BracketTree> bracket_tree(std::span<const int> l) {
    require_nonempty(l, "bracket_tree");
    if (!is_lyndon(l)) throw ValidationError("bracket_tree: word is not Lyndon");
    auto node = std::make_shared<BracketTree>();
    if (l.size() == 1) {
        node->letter = l[0];
        return node;
    }
    const auto [l1, l2] = costandard_split(l);
    node->left = bracket_tree(l1);
    node->right = bracket_tree(l2);
    return node;
}

Matrix evaluate(const BracketTree& tree, std::span<const Matrix> assignment) {
    if (tree.leaf()) {
        if (static_cast<std::size_t>(tree.letter) >= assignment.size()) {
            throw ValidationError("evaluate: no matrix assigned to letter " + std::to_string(tree.letter));
        }
        return assignment[tree.letter];
    }
    return bracket(evaluate(*tree.left, assignment), evaluate(*tree.right, assignment));
}

void for_each_lyndon(int n, int max_len, const std::function<bool(const Word&)>& fn) {
    if (n < 1) throw ValidationError("for_each_lyndon: alphabet size must be positive");
    if (max_len < 1) throw ValidationError("for_each_lyndon: max length must be positive");
    Word w{0};
    for (;;) {
        if (!fn(w)) return;
        // Successor: repeat w up to max_len, strip trailing maximal letters, bump the last.
        const std::size_t m = w.size();
        while (w.size() < static_cast<std::size_t>(max_len)) w.push_back(w[w.size() - m]);
        while (!w.empty() && w.back() == n - 1) w.pop_back();
        if (w.empty()) return;
        ++w.back();
    }
}

std::vector<Word> enumerate_lyndon(int n, int max_len) {
    std::vector<Word> out;
    for_each_lyndon(n, max_len, [&](const Word& w) {
        out.push_back(w);
        return true;
    });
    return out;
}

std::vector<int> moebius_table(int limit) {
    if (limit < 0) throw ValidationError("moebius_table: negative limit");
    std::vector<int> mu(static_cast<std::size_t>(limit) + 1, 0);
    if (limit >= 1) mu[1] = 1;
    std::vector<int> primes;
    std::vector<char> composite(static_cast<std::size_t>(limit) + 1, 0);
    for (int i = 2; i <= limit; ++i) {
        if (!composite[i]) {
            primes.push_back(i);
            mu[i] = -1;
        }
        for (int p : primes) {
            const long long ip = static_cast<long long>(i) * p;
            if (ip > limit) break;
            composite[ip] = 1;
            if (i % p == 0) {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    return mu;
}

namespace {

constexpr WideCount kWideMax = std::numeric_limits<WideCount>::max();

// n^d, ValidationError past the 127-bit headroom the signed sum needs.
WideCount checked_pow(int n, int d) {
    const WideCount cap = kWideMax >> 1;
    WideCount r = 1;
    for (int i = 0; i < d; ++i) {
        if (r > cap / static_cast<WideCount>(n)) {
            throw ValidationError("lyndon_count: " + std::to_string(n) + "^" + std::to_string(d) +
                                  " exceeds the 127-bit counting range");
        }
        r *= static_cast<WideCount>(n);
    }
    return r;
}

}  // namespace

WideCount lyndon_count(int n, int m) {
    if (n < 1) throw ValidationError("lyndon_count: alphabet size must be positive");
    if (m < 1) throw ValidationError("lyndon_count: length must be positive");
    const std::vector<int> mu = moebius_table(m);
    WideCount plus = 0;
    WideCount minus = 0;
    for (int d = 1; d <= m; ++d) {
        if (m % d != 0 || mu[m / d] == 0) continue;
        const WideCount p = checked_pow(n, d);
        WideCount& acc = mu[m / d] > 0 ? plus : minus;
        if (acc > (kWideMax >> 1) - p) throw ValidationError("lyndon_count: sum exceeds the 127-bit counting range");
        acc += p;
    }
    if (plus < minus) throw InvariantError("lyndon_count: negative necklace sum");
    const WideCount total = plus - minus;
    if (total % static_cast<WideCount>(m) != 0) throw InvariantError("lyndon_count: sum not divisible by length");
    return total / static_cast<WideCount>(m);
}

WideCount witt_dimension(int n, int T) {
    if (T < 1) throw ValidationError("witt_dimension: T must be positive");
    WideCount total = 0;
    for (int m = 1; m <= T; ++m) {
        const WideCount c = lyndon_count(n, m);
        if (total > kWideMax - c) throw ValidationError("witt_dimension: total exceeds the 128-bit range");
        total += c;
    }
    return total;
}

int depth_bound(long long T) {
    if (T < 1) throw ValidationError("depth_bound: T must be positive");
    const auto t = static_cast<unsigned long long>(T);
    int k = 0;
    while ((1ULL << k) < t) ++k;
    return k + 1;
}

WideCount width_bound(int n, int T) { return witt_dimension(n, T); }

std::vector<LyndonTableRow> lyndon_table(int n, int T) {
    if (T < 1) throw ValidationError("lyndon_table: T must be positive");
    std::vector<LyndonTableRow> rows;
    WideCount cumulative = 0;
    for (int m = 1; m <= T; ++m) {
        const WideCount c = lyndon_count(n, m);
        if (cumulative > kWideMax - c) throw ValidationError("lyndon_table: total exceeds the 128-bit range");
        cumulative += c;
        rows.push_back({n, m, c, cumulative});
    }
    return rows;
}

}  // namespace liedepth
