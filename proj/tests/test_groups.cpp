#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "liedepth/groups.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

using namespace liedepth;

namespace {

using Perm = std::vector<int>;

// "p then q" on one-line notation.
Perm then(const Perm& p, const Perm& q) {
    Perm r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r[i] = q[p[i]];
    return r;
}

int parity(const Perm& p) {
    int inv = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) inv += p[i] > p[j];
    return inv % 2;
}

std::vector<Perm> lex_perms(int n, bool even_only) {
    Perm p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<Perm> out;
    do {
        if (!even_only || parity(p) == 0) out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

// Subgroup generated by all commutators of elements drawn from a and b.
std::set<Perm> commutator_subgroup(const std::set<Perm>& a, const std::set<Perm>& b) {
    auto inv = [](const Perm& p) {
        Perm r(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<int>(i);
        return r;
    };
    std::set<Perm> gens;
    for (const auto& x : a)
        for (const auto& y : b) gens.insert(then(then(then(inv(x), inv(y)), x), y));
    std::set<Perm> group = gens;
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Perm> cur(group.begin(), group.end());
        for (const auto& x : cur)
            for (const auto& g : gens)
                if (group.insert(then(x, g)).second) grew = true;
    }
    return group;
}

std::vector<std::size_t> perm_derived_orders(const std::set<Perm>& g) {
    std::vector<std::size_t> orders{g.size()};
    std::set<Perm> cur = g;
    for (;;) {
        auto next = commutator_subgroup(cur, cur);
        orders.push_back(next.size());
        if (next.size() == cur.size() || next.size() == 1) break;
        cur = std::move(next);
    }
    return orders;
}

}  // namespace

TEST_CASE("every named group satisfies the axioms") {
    for (const auto& name : group_names()) {
        CAPTURE(name);
        const auto g = make_group(name);
        CHECK_NOTHROW(g.check_axioms());
    }
    CHECK_NOTHROW(make_group("C17").check_axioms());
    CHECK_THROWS_AS(make_group("C0"), ValidationError);
    CHECK_THROWS_AS(make_group("Q8x"), ValidationError);
}

TEST_CASE("orders") {
    const std::map<std::string, int> expected{{"C2", 2}, {"C3", 3}, {"D8", 8}, {"H3", 8}, {"S3", 6},
                                              {"S4", 24}, {"A4", 12}, {"A5", 60}, {"S5", 120}};
    for (const auto& [name, order] : expected) CHECK(make_group(name).order == order);
}

TEST_CASE("symmetric group tables match brute-force composition") {
    for (int n : {3, 4, 5}) {
        for (bool alt : {false, true}) {
            if (alt && n == 3) continue;
            const auto perms = lex_perms(n, alt);
            const auto g = make_group((alt ? "A" : "S") + std::to_string(n));
            REQUIRE(g.order == static_cast<int>(perms.size()));
            std::map<Perm, int> index;
            for (std::size_t i = 0; i < perms.size(); ++i) index[perms[i]] = static_cast<int>(i);
            for (int a = 0; a < g.order; ++a)
                for (int b = 0; b < g.order; ++b) CHECK(g.compose(a, b) == index.at(then(perms[a], perms[b])));
        }
    }
}

TEST_CASE("derived series orders agree with the permutation oracle") {
    for (int n : {3, 4, 5}) {
        for (bool alt : {false, true}) {
            if (alt && n == 3) continue;
            const auto perms = lex_perms(n, alt);
            const std::set<Perm> all(perms.begin(), perms.end());
            const auto g = make_group((alt ? "A" : "S") + std::to_string(n));
            CHECK(group_derived_series(g) == perm_derived_orders(all));
        }
    }
}

TEST_CASE("structure labels") {
    const std::map<std::string, StructureClass> expected{
        {"C2", StructureClass::Abelian},    {"C3", StructureClass::Abelian},   {"D8", StructureClass::Nilpotent},
        {"H3", StructureClass::Nilpotent},  {"S3", StructureClass::Solvable},  {"S4", StructureClass::Solvable},
        {"A4", StructureClass::Solvable},   {"A5", StructureClass::NonSolvable}, {"S5", StructureClass::NonSolvable}};
    for (const auto& [name, cls] : expected) {
        CAPTURE(name);
        const auto r = classify_group(make_group(name));
        CHECK(r.class_label == cls);
    }
    CHECK(classify_group(make_group("S4")).derived_orders == std::vector<std::size_t>{24, 12, 4, 1});
    CHECK(classify_group(make_group("D8")).nilpotency_class == 2);
    CHECK(classify_group(make_group("A5")).derived_length == -1);
}

TEST_CASE("word records follow prefix folding") {
    for (const char* name : {"C3", "D8", "S3", "A5"}) {
        const auto g = make_group(name);
        const auto data = gen_word_dataset(g, 40, 100, 3);
        for (const auto& rec : data) {
            int acc = g.identity;
            for (std::size_t i = 0; i < rec.tokens.size(); ++i) {
                acc = g.compose(acc, rec.tokens[i]);
                CHECK(rec.labels[i] == acc);
            }
        }
        CHECK(data[7].tokens == gen_word_record(g, 40, 3, 7).tokens);
    }
}

TEST_CASE("word datasets do not depend on jobs") {
    const auto g = make_group("S4");
    const auto a = gen_word_dataset(g, 64, 50, 11, 1, true);
    const auto b = gen_word_dataset(g, 64, 50, 11, 4, true);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].tokens == b[i].tokens);
        CHECK(a[i].labels == b[i].labels);
    }
    CHECK(a[0].tokens.front() == g.order);
    CHECK(a[0].labels.front() == g.order);
    CHECK(a[0].tokens.size() == 65);
}

TEST_CASE("icosahedral rotations") {
    const auto& rot = a5_rotation_elements();
    REQUIRE(rot.matrices.size() == 60);
    const Mat3 p = a5_generator_p(), r = a5_generator_r();
    const Mat3 I = Mat3::Identity();
    CHECK((p * p * p - I).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((r * r * r * r * r - I).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(((p * r) * (p * r) - I).cwiseAbs().maxCoeff() <= 1e-12);
    for (const auto& m : rot.matrices) {
        CHECK((m.transpose() * m - I).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(m.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_NOTHROW(rot.group.check_axioms());
    CHECK(classify_group(rot.group).class_label == StructureClass::NonSolvable);
    CHECK(a5_isomorphism_mismatches() == 0);
}

TEST_CASE("rotation records") {
    const auto data = gen_rotation_dataset(20, 10, 5);
    const auto& rot = a5_rotation_elements();
    for (const auto& rec : data) {
        CHECK(rec.v0.norm() == doctest::Approx(1.0));
        Vec3 v = rec.v0;
        for (std::size_t i = 0; i < rec.tokens.size(); ++i) {
            v = rot.matrices[rec.tokens[i]] * v;
            CHECK((v - rec.targets[i]).norm() <= 1e-12);
        }
    }
}

TEST_CASE("sequence accuracy") {
    const std::vector<std::vector<int>> gold{{1, 2}, {3, 4}};
    CHECK(sequence_accuracy(gold, gold) == 1.0);
    CHECK(sequence_accuracy({{1, 2}, {3, 5}}, gold) == 0.5);
    CHECK_THROWS_AS(sequence_accuracy({{1}}, gold), ValidationError);
}

TEST_CASE("compose_word validation") {
    const auto g = make_group("C3");
    const std::vector<int> w{1, 1, 2};
    CHECK(compose_word(g, w) == 1);
    const std::vector<int> bad{3};
    CHECK_THROWS_AS(compose_word(g, bad), ValidationError);
}

TEST_CASE("transposition (0 1) then (1 2)") {
    // Points move through the left factor first: 0 -> 1 -> 2, so 0 lands on 2.
    const auto perms = lex_perms(3, false);
    const auto g = make_group("S3");
    std::map<Perm, int> index;
    for (std::size_t i = 0; i < perms.size(); ++i) index[perms[i]] = static_cast<int>(i);
    const int r = g.compose(index.at({1, 0, 2}), index.at({0, 2, 1}));
    CHECK(perms[r] == Perm{2, 0, 1});
}
