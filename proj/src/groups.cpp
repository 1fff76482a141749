#include "liedepth/groups.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <string>

namespace liedepth {

void FiniteGroup::check_element(int a) const {
    if (a < 0 || a >= order) {
        throw ValidationError(name + ": element " + std::to_string(a) + " outside 0.." + std::to_string(order - 1));
    }
}

void FiniteGroup::check_axioms(std::size_t samples, std::uint64_t seed) const {
    if (order <= 0 || table.size() != static_cast<std::size_t>(order) * order) {
        throw InvariantError(name + ": table has wrong size");
    }
    for (int v : table) {
        if (v < 0 || v >= order) throw InvariantError(name + ": table entry out of range");
    }
    for (int a = 0; a < order; ++a) {
        if (compose(identity, a) != a || compose(a, identity) != a) throw InvariantError(name + ": identity law fails");
        if (compose(a, inverse[a]) != identity || compose(inverse[a], a) != identity) {
            throw InvariantError(name + ": inverse law fails for " + std::to_string(a));
        }
    }
    auto assoc = [&](int a, int b, int c) {
        if (compose(compose(a, b), c) != compose(a, compose(b, c))) {
            throw InvariantError(name + ": associativity fails at (" + std::to_string(a) + "," + std::to_string(b) + "," +
                                 std::to_string(c) + ")");
        }
    };
    if (order <= 60) {
        for (int a = 0; a < order; ++a)
            for (int b = 0; b < order; ++b)
                for (int c = 0; c < order; ++c) assoc(a, b, c);
        return;
    }
    Rng rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        const auto pick = [&] { return static_cast<int>(rng.below(static_cast<std::uint64_t>(order))); };
        const int a = pick();
        const int b = pick();
        assoc(a, b, pick());
    }
}

bool FiniteGroup::is_abelian() const {
    for (int a = 0; a < order; ++a)
        for (int b = a + 1; b < order; ++b)
            if (compose(a, b) != compose(b, a)) return false;
    return true;
}

FiniteGroup group_from_table(std::string name, int order, std::vector<int> table, std::vector<int> generators,
                             std::vector<std::string> labels) {
    if (order <= 0 || table.size() != static_cast<std::size_t>(order) * order) {
        throw ValidationError(name + ": table must have order^2 entries");
    }
    FiniteGroup g;
    g.name = std::move(name);
    g.order = order;
    g.table = std::move(table);
    g.identity = -1;
    for (int e = 0; e < order && g.identity < 0; ++e) {
        bool ok = true;
        for (int a = 0; a < order && ok; ++a) ok = g.compose(e, a) == a && g.compose(a, e) == a;
        if (ok) g.identity = e;
    }
    if (g.identity < 0) throw InvariantError(g.name + ": no identity element");
    g.inverse.assign(order, -1);
    for (int a = 0; a < order; ++a) {
        for (int b = 0; b < order; ++b) {
            if (g.compose(a, b) == g.identity) {
                g.inverse[a] = b;
                break;
            }
        }
        if (g.inverse[a] < 0) throw InvariantError(g.name + ": element " + std::to_string(a) + " has no inverse");
    }
    g.generators = std::move(generators);
    g.element_labels = std::move(labels);
    if (g.element_labels.empty()) {
        for (int a = 0; a < order; ++a) g.element_labels.push_back(std::to_string(a));
    }
    return g;
}

namespace {

using Perm = std::vector<int>;

std::string perm_label(const Perm& p) {
    std::string s = "[";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + std::to_string(p[i]);
    return s + "]";
}

bool is_even(const Perm& p) {
    int inversions = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) inversions += p[i] > p[j];
    return inversions % 2 == 0;
}

FiniteGroup permutation_group(std::string name, int degree, bool alternating) {
    std::vector<Perm> elems;
    Perm p(degree);
    std::iota(p.begin(), p.end(), 0);
    do {
        if (!alternating || is_even(p)) elems.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    std::map<Perm, int> index;
    for (std::size_t i = 0; i < elems.size(); ++i) index[elems[i]] = static_cast<int>(i);

    const int order = static_cast<int>(elems.size());
    std::vector<int> table(static_cast<std::size_t>(order) * order);
    for (int a = 0; a < order; ++a) {
        for (int b = 0; b < order; ++b) {
            Perm c(degree);
            for (int i = 0; i < degree; ++i) c[i] = elems[b][elems[a][i]];
            table[static_cast<std::size_t>(a) * order + b] = index.at(c);
        }
    }

    std::vector<int> gens;
    auto find = [&](const Perm& q) {
        const auto it = index.find(q);
        if (it != index.end()) gens.push_back(it->second);
    };
    Perm cycle(degree);
    for (int i = 0; i < degree; ++i) cycle[i] = (i + 1) % degree;
    if (alternating) {
        // (0 1 2) and the long cycle (odd degree) or (1 2 ... n-1).
        Perm c3(degree);
        std::iota(c3.begin(), c3.end(), 0);
        c3[0] = 1, c3[1] = 2, c3[2] = 0;
        find(c3);
        if (degree % 2 == 1) {
            find(cycle);
        } else {
            Perm c(degree);
            std::iota(c.begin(), c.end(), 0);
            for (int i = 1; i < degree; ++i) c[i] = i + 1 < degree ? i + 1 : 1;
            find(c);
        }
    } else {
        Perm t(degree);
        std::iota(t.begin(), t.end(), 0);
        std::swap(t[0], t[1]);
        find(t);
        find(cycle);
    }

    std::vector<std::string> labels;
    for (const auto& e : elems) labels.push_back(perm_label(e));
    return group_from_table(std::move(name), order, std::move(table), std::move(gens), std::move(labels));
}

FiniteGroup cyclic_group(int n) {
    std::vector<int> table(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) table[static_cast<std::size_t>(a) * n + b] = (a + b) % n;
    return group_from_table("C" + std::to_string(n), n, std::move(table), {n > 1 ? 1 : 0});
}

// Symmetries of the square as maps v -> r + (-1)^f v on Z/4.
FiniteGroup dihedral8() {
    auto apply = [](int e, int v) {
        const int r = e / 2, f = e % 2;
        return ((f ? -v : v) + r + 8) % 4;
    };
    std::vector<int> table(64);
    for (int a = 0; a < 8; ++a) {
        for (int b = 0; b < 8; ++b) {
            // a first, then b.
            const int img0 = apply(b, apply(a, 0));
            const int img1 = apply(b, apply(a, 1));
            const int f = ((img1 - img0 + 4) % 4) == 1 ? 0 : 1;
            table[a * 8 + b] = 2 * img0 + f;
        }
    }
    std::vector<std::string> labels;
    for (int e = 0; e < 8; ++e) labels.push_back("r" + std::to_string(e / 2) + (e % 2 ? "f" : ""));
    return group_from_table("D8", 8, std::move(table), {2, 1}, std::move(labels));
}

// Unitriangular [[1,a,b],[0,1,c],[0,0,1]] over F_2; "g then h" is H * G.
FiniteGroup heisenberg3() {
    auto unpack = [](int e) { return std::array<int, 3>{(e >> 2) & 1, (e >> 1) & 1, e & 1}; };
    std::vector<int> table(64);
    for (int g = 0; g < 8; ++g) {
        for (int h = 0; h < 8; ++h) {
            const auto [ga, gb, gc] = unpack(g);
            const auto [ha, hb, hc] = unpack(h);
            const int a = (ha + ga) & 1;
            const int b = (hb + ha * gc + gb) & 1;
            const int c = (hc + gc) & 1;
            table[g * 8 + h] = 4 * a + 2 * b + c;
        }
    }
    std::vector<std::string> labels;
    for (int e = 0; e < 8; ++e) {
        const auto [a, b, c] = unpack(e);
        labels.push_back("(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")");
    }
    return group_from_table("H3", 8, std::move(table), {4, 1}, std::move(labels));
}

}  // namespace

std::vector<std::string> group_names() { return {"C2", "C3", "C60", "D8", "H3", "S3", "S4", "S5", "A4", "A5"}; }

FiniteGroup make_group(std::string_view name) {
    const std::string s(name);
    if (s.size() >= 2 && s[0] == 'C' && std::all_of(s.begin() + 1, s.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
        if (s.size() > 6) throw ValidationError("make_group: cyclic order too large");
        const int n = std::stoi(s.substr(1));
        if (n < 1 || n > 10000) throw ValidationError("make_group: cyclic order must be in 1..10000");
        return cyclic_group(n);
    }
    if (s == "D8") return dihedral8();
    if (s == "H3") return heisenberg3();
    if (s == "S3") return permutation_group(s, 3, false);
    if (s == "S4") return permutation_group(s, 4, false);
    if (s == "S5") return permutation_group(s, 5, false);
    if (s == "A4") return permutation_group(s, 4, true);
    if (s == "A5") return permutation_group(s, 5, true);
    throw ValidationError("make_group: unknown group '" + s + "' (expected C<n>, D8, H3, S3, S4, S5, A4 or A5)");
}

int compose_word(const FiniteGroup& g, std::span<const int> tokens) {
    int acc = g.identity;
    for (int t : tokens) {
        g.check_element(t);
        acc = g.compose(acc, t);
    }
    return acc;
}

std::vector<int> prefix_labels(const FiniteGroup& g, std::span<const int> tokens) {
    std::vector<int> labels;
    labels.reserve(tokens.size());
    int acc = g.identity;
    for (int t : tokens) {
        g.check_element(t);
        acc = g.compose(acc, t);
        labels.push_back(acc);
    }
    return labels;
}

std::vector<int> generated_subgroup(const FiniteGroup& g, std::span<const int> elements) {
    std::vector<char> in(g.order, 0);
    std::vector<int> members{g.identity};
    in[g.identity] = 1;
    std::vector<int> gens;
    for (int e : elements) {
        g.check_element(e);
        if (std::find(gens.begin(), gens.end(), e) == gens.end()) gens.push_back(e);
    }
    // Finite groups: closure under right multiplication by generators suffices.
    for (std::size_t k = 0; k < members.size(); ++k) {
        for (int s : gens) {
            const int c = g.compose(members[k], s);
            if (!in[c]) {
                in[c] = 1;
                members.push_back(c);
            }
        }
    }
    std::sort(members.begin(), members.end());
    return members;
}

namespace {

int commutator(const FiniteGroup& g, int a, int b) {
    return g.compose(g.compose(g.inverse[a], g.inverse[b]), g.compose(a, b));
}

std::vector<int> commutator_subgroup(const FiniteGroup& g, const std::vector<int>& h, const std::vector<int>& k) {
    std::vector<char> seen(g.order, 0);
    std::vector<int> comms;
    for (int a : h) {
        for (int b : k) {
            const int c = commutator(g, a, b);
            if (!seen[c]) {
                seen[c] = 1;
                comms.push_back(c);
            }
        }
    }
    return generated_subgroup(g, comms);
}

std::vector<int> all_elements(const FiniteGroup& g) {
    std::vector<int> v(g.order);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

}  // namespace

std::vector<std::size_t> group_derived_series(const FiniteGroup& g) {
    if (g.order > 120) throw ValidationError("group_derived_series: order above 120");
    std::vector<int> h = all_elements(g);
    std::vector<std::size_t> orders{h.size()};
    while (h.size() > 1) {
        std::vector<int> next = commutator_subgroup(g, h, h);
        const bool stable = next.size() == h.size();
        orders.push_back(next.size());
        if (stable) break;
        h = std::move(next);
    }
    return orders;
}

std::vector<std::size_t> group_lower_central_series(const FiniteGroup& g) {
    if (g.order > 120) throw ValidationError("group_lower_central_series: order above 120");
    const std::vector<int> all = all_elements(g);
    std::vector<int> h = all;
    std::vector<std::size_t> orders{h.size()};
    while (h.size() > 1) {
        std::vector<int> next = commutator_subgroup(g, all, h);
        const bool stable = next.size() == h.size();
        orders.push_back(next.size());
        if (stable) break;
        h = std::move(next);
    }
    return orders;
}

GroupReport classify_group(const FiniteGroup& g) {
    GroupReport r;
    r.derived_orders = group_derived_series(g);
    r.lower_central_orders = group_lower_central_series(g);
    if (r.derived_orders.back() == 1) r.derived_length = static_cast<int>(r.derived_orders.size()) - 1;
    if (r.lower_central_orders.back() == 1) r.nilpotency_class = static_cast<int>(r.lower_central_orders.size()) - 1;
    if (g.order == 1 || g.is_abelian()) {
        r.class_label = StructureClass::Abelian;
    } else if (r.nilpotency_class > 0) {
        r.class_label = StructureClass::Nilpotent;
    } else if (r.derived_length > 0) {
        r.class_label = StructureClass::Solvable;
    } else {
        r.class_label = StructureClass::NonSolvable;
    }
    return r;
}

WordRecord gen_word_record(const FiniteGroup& g, std::size_t length, std::uint64_t seed, std::uint64_t index, bool bos) {
    if (length < 1) throw ValidationError("gen_word_record: length must be at least 1");
    Rng rng = Rng::for_index(seed, index);
    WordRecord rec;
    rec.tokens.reserve(length + (bos ? 1 : 0));
    if (bos) rec.tokens.push_back(g.order);
    std::vector<int> raw(length);
    for (auto& t : raw) t = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.order)));
    rec.tokens.insert(rec.tokens.end(), raw.begin(), raw.end());
    if (bos) rec.labels.push_back(g.order);
    const std::vector<int> labels = prefix_labels(g, raw);
    rec.labels.insert(rec.labels.end(), labels.begin(), labels.end());
    return rec;
}

std::vector<WordRecord> gen_word_dataset(const FiniteGroup& g, std::size_t length, std::size_t count,
                                         std::uint64_t seed, unsigned jobs, bool bos) {
    if (count < 1) throw ValidationError("gen_word_dataset: count must be at least 1");
    if (length < 1) throw ValidationError("gen_word_dataset: length must be at least 1");
    std::vector<WordRecord> out(count);
    parallel_for(count, jobs, [&](std::size_t i) { out[i] = gen_word_record(g, length, seed, i, bos); });
    return out;
}

Mat3 a5_generator_p() {
    Mat3 p;
    p << 0, 0, 1, 1, 0, 0, 0, 1, 0;
    return p;
}

Mat3 a5_generator_r() {
    const double s5 = std::sqrt(5.0);
    const double lo = (s5 - 1.0) / 4.0;
    const double hi = (s5 + 1.0) / 4.0;
    Mat3 r;
    r << lo, -hi, 0.5, hi, 0.5, lo, -0.5, lo, hi;
    return r;
}

namespace {

using Key = std::array<long long, 9>;

Key rounded_key(const Mat3& m) {
    Key k{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) k[3 * i + j] = std::llround(m(i, j) * 1e8);
    return k;
}

A5Rotations build_a5() {
    const Mat3 p = a5_generator_p();
    const Mat3 r = a5_generator_r();
    std::vector<Mat3> elems{Mat3::Identity()};
    auto find = [&](const Mat3& m) -> int {
        for (std::size_t i = 0; i < elems.size(); ++i) {
            if ((elems[i] - m).cwiseAbs().maxCoeff() <= 1e-9) return static_cast<int>(i);
        }
        return -1;
    };
    for (std::size_t k = 0; k < elems.size(); ++k) {
        for (const Mat3* gen : {&p, &r}) {
            const Mat3 next = (*gen) * elems[k];
            if (find(next) < 0) {
                elems.push_back(next);
                if (elems.size() > 60) throw InvariantError("a5_rotation_elements: closure exceeds 60 elements");
            }
        }
    }
    if (elems.size() != 60) {
        throw InvariantError("a5_rotation_elements: closure has " + std::to_string(elems.size()) + " elements, expected 60");
    }
    std::sort(elems.begin(), elems.end(), [](const Mat3& a, const Mat3& b) { return rounded_key(a) < rounded_key(b); });

    A5Rotations out;
    out.matrices = elems;
    std::vector<int> table(3600);
    for (int a = 0; a < 60; ++a) {
        for (int b = 0; b < 60; ++b) {
            const int c = find(elems[b] * elems[a]);
            if (c < 0) throw InvariantError("a5_rotation_elements: product left the closure");
            table[a * 60 + b] = c;
        }
    }
    out.p_index = find(p);
    out.r_index = find(r);
    std::vector<std::string> labels;
    for (int i = 0; i < 60; ++i) labels.push_back("M" + std::to_string(i));
    out.group = group_from_table("A5rot", 60, std::move(table), {out.p_index, out.r_index}, std::move(labels));
    for (const auto& m : out.matrices) {
        if ((m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-12 || std::abs(m.determinant() - 1.0) > 1e-12) {
            throw InvariantError("a5_rotation_elements: element is not a rotation");
        }
    }
    return out;
}

}  // namespace

const A5Rotations& a5_rotation_elements() {
    static const A5Rotations rot = build_a5();
    return rot;
}

std::size_t a5_isomorphism_mismatches() {
    const A5Rotations& rot = a5_rotation_elements();
    const FiniteGroup& m = rot.group;
    const FiniteGroup abstract = make_group("A5");

    // Words in P, R reaching every matrix element, breadth first from the identity.
    std::vector<int> parent(60, -1), via(60, -1), order{m.identity};
    std::vector<char> seen(60, 0);
    seen[m.identity] = 1;
    for (std::size_t k = 0; k < order.size(); ++k) {
        for (int gi = 0; gi < 2; ++gi) {
            const int next = m.compose(order[k], m.generators[gi]);
            if (!seen[next]) {
                seen[next] = 1;
                parent[next] = order[k];
                via[next] = gi;
                order.push_back(next);
            }
        }
    }

    std::size_t best = 3600;
    for (int ip = 0; ip < 60 && best > 0; ++ip) {
        for (int ir = 0; ir < 60 && best > 0; ++ir) {
            const int img[2] = {ip, ir};
            std::vector<int> phi(60, -1);
            phi[m.identity] = abstract.identity;
            for (std::size_t k = 1; k < order.size(); ++k) {
                const int e = order[k];
                phi[e] = abstract.compose(phi[parent[e]], img[via[e]]);
            }
            std::vector<char> hit(60, 0);
            bool bijective = true;
            for (int v : phi) {
                if (hit[v]) bijective = false;
                hit[v] = 1;
            }
            if (!bijective) continue;
            std::size_t mismatches = 0;
            for (int a = 0; a < 60; ++a)
                for (int b = 0; b < 60; ++b) mismatches += phi[m.compose(a, b)] != abstract.compose(phi[a], phi[b]);
            best = std::min(best, mismatches);
        }
    }
    return best;
}

RotationRecord gen_rotation_record(std::size_t length, std::uint64_t seed, std::uint64_t index) {
    if (length < 1) throw ValidationError("gen_rotation_record: length must be at least 1");
    const A5Rotations& rot = a5_rotation_elements();
    Rng rng = Rng::for_index(seed, index);
    RotationRecord rec;
    Vec3 v;
    do {
        v = Vec3(rng.normal(), rng.normal(), rng.normal());
    } while (v.norm() < 1e-6);
    rec.v0 = v / v.norm();
    rec.tokens.resize(length);
    for (auto& t : rec.tokens) t = static_cast<int>(rng.below(60));
    Vec3 cur = rec.v0;
    rec.targets.reserve(length);
    for (int t : rec.tokens) {
        cur = rot.matrices[t] * cur;
        rec.targets.push_back(cur);
    }
    return rec;
}

std::vector<RotationRecord> gen_rotation_dataset(std::size_t length, std::size_t count, std::uint64_t seed, unsigned jobs) {
    if (count < 1) throw ValidationError("gen_rotation_dataset: count must be at least 1");
    a5_rotation_elements();
    std::vector<RotationRecord> out(count);
    parallel_for(count, jobs, [&](std::size_t i) { out[i] = gen_rotation_record(length, seed, i); });
    return out;
}

double sequence_accuracy(const std::vector<std::vector<int>>& predictions, const std::vector<std::vector<int>>& golds) {
    if (predictions.size() != golds.size()) throw ValidationError("sequence_accuracy: sequence counts differ");
    if (golds.empty()) throw ValidationError("sequence_accuracy: no sequences");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < golds.size(); ++i) {
        if (predictions[i].size() != golds[i].size()) {
            throw ValidationError("sequence_accuracy: length mismatch in sequence " + std::to_string(i));
        }
        correct += predictions[i] == golds[i];
    }
    return static_cast<double>(correct) / static_cast<double>(golds.size());
}

}  // namespace liedepth
