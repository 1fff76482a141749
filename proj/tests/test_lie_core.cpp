#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "liedepth/builtins.hpp"
#include "liedepth/lie_core.hpp"
#include "oracles.hpp"

#include <random>

using namespace liedepth;

namespace {

Matrix E(int n, int r, int c) {
    Matrix m = Matrix::Zero(n, n);
    m(r, c) = 1.0;
    return m;
}

AlgebraReport classify_gens(const std::vector<Matrix>& gens) { return classify(lie_closure(gens)); }

std::vector<int> to_int(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("bracket is antisymmetric and satisfies Jacobi") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix a(4, 4), b(4, 4), c(4, 4);
        for (Eigen::Index i = 0; i < 16; ++i) {
            a.data()[i] = rng.normal();
            b.data()[i] = rng.normal();
            c.data()[i] = rng.normal();
        }
        CHECK((bracket(a, b) + bracket(b, a)).norm() == doctest::Approx(0.0).epsilon(1e-12));
        const Matrix jac = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b));
        CHECK(jac.norm() <= 1e-10 * (1.0 + a.norm() * b.norm() * c.norm()));
    }
}

TEST_CASE("basis stays orthonormal and rejects dependent elements") {
    MatrixBasis basis(3);
    CHECK(basis.append(E(3, 0, 1)));
    CHECK(basis.append(E(3, 0, 1) + E(3, 1, 2)));
    CHECK_FALSE(basis.append(2.0 * E(3, 1, 2) - 3.0 * E(3, 0, 1)));
    CHECK(basis.size() == 2);
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j)
            CHECK(trace_inner(basis[i], basis[j]) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    CHECK(basis.contains(E(3, 1, 2)));
    CHECK_FALSE(basis.contains(E(3, 0, 2)));
    CHECK_THROWS_AS(basis.append(Matrix::Zero(2, 2)), ValidationError);
}

TEST_CASE("closure dimensions of reference families") {
    CHECK(lie_closure(builtin_algebra("so3").generators).size() == 3);
    CHECK(lie_closure(builtin_algebra("sl2").generators).size() == 3);
    CHECK(lie_closure(builtin_algebra("diagonal").generators).size() == 2);
    CHECK(lie_closure(builtin_algebra("strictly_upper_3").generators).size() == 3);
    CHECK(lie_closure(builtin_algebra("strictly_upper_4").generators).size() == 6);
    CHECK(lie_closure(builtin_algebra("upper_triangular_3").generators).size() == 6);
}

TEST_CASE("closure is bracket closed") {
    for (const auto& name : builtin_algebra_names()) {
        const auto basis = lie_closure(builtin_algebra(name).generators);
        CHECK(closure_residual(basis) <= 1e-10);
    }
}

TEST_CASE("closure cap raises") {
    CHECK_THROWS_AS(lie_closure(builtin_algebra("sl2").generators, 2), ValidationError);
}

TEST_CASE("classification labels") {
    CHECK(classify_gens(builtin_algebra("diagonal").generators).class_label == StructureClass::Abelian);
    const auto su3 = classify_gens(builtin_algebra("strictly_upper_3").generators);
    CHECK(su3.class_label == StructureClass::Nilpotent);
    CHECK(su3.nilpotency_class == 2);
    CHECK(su3.derived_length == 2);
    const auto ut2 = classify_gens(builtin_algebra("upper_triangular_2").generators);
    CHECK(ut2.class_label == StructureClass::Solvable);
    CHECK(ut2.derived_length == 2);
    CHECK_FALSE(ut2.nilpotent());
    CHECK(classify_gens(builtin_algebra("sl2").generators).class_label == StructureClass::NonSolvable);
    CHECK(classify_gens(builtin_algebra("so3").generators).class_label == StructureClass::NonSolvable);
    const auto su4 = classify_gens(builtin_algebra("strictly_upper_4").generators);
    CHECK(su4.nilpotency_class == 3);
    CHECK(su4.derived_length == 2);
}

TEST_CASE("series dimensions agree with the rank oracle") {
    for (const auto& name : builtin_algebra_names()) {
        CAPTURE(name);
        const auto gens = builtin_algebra(name).generators;
        const auto span = oracle::closure(gens);
        const auto basis = lie_closure(gens);
        CHECK(static_cast<int>(basis.size()) == oracle::rank_of(span));
        const auto report = classify(basis);
        CHECK(to_int(report.derived_dims) == oracle::series_dims(span, true));
        CHECK(to_int(report.lower_central_dims) == oracle::series_dims(span, false));
    }
}

TEST_CASE("random strictly upper families are nilpotent") {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + trial % 3;
        std::vector<Matrix> gens;
        for (int k = 0; k < 2; ++k) {
            Matrix m = Matrix::Zero(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = r + 1; c < n; ++c) m(r, c) = nd(gen);
            gens.push_back(m);
        }
        const auto report = classify_gens(gens);
        CHECK(report.nilpotent());
        CHECK(*report.nilpotency_class <= n - 1);
        // nilpotent implies solvable
        CHECK(report.solvable());
    }
}

TEST_CASE("classification is invariant under conjugation") {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd;
    Matrix s(3, 3);
    for (Eigen::Index i = 0; i < 9; ++i) s.data()[i] = nd(gen);
    s += 3.0 * Matrix::Identity(3, 3);
    const Matrix si = s.inverse();
    for (const char* name : {"diagonal", "strictly_upper_3", "upper_triangular_3", "so3"}) {
        CAPTURE(name);
        auto gens = builtin_algebra(name).generators;
        std::vector<Matrix> conj;
        for (const auto& g : gens) conj.push_back(s * g * si);
        const auto a = classify_gens(gens);
        const auto b = classify_gens(conj);
        CHECK(a.class_label == b.class_label);
        CHECK(a.dim == b.dim);
        CHECK(a.derived_dims == b.derived_dims);
    }
}

TEST_CASE("hand-built block triangular stack of two abelian layers is solvable") {
    // Base layer: diagonal commuting pair on the 2x2 block. Ideal layer:
    // coupling into the off-diagonal block. Every generator is block upper
    // triangular with abelian diagonal blocks.
    std::vector<Matrix> gens;
    Matrix a = Matrix::Zero(4, 4);
    a.diagonal() << 1.0, 0.5, -0.3, 0.2;
    a(0, 2) = 0.7;
    a(1, 3) = -0.4;
    Matrix b = Matrix::Zero(4, 4);
    b.diagonal() << -0.2, 0.9, 0.4, 0.1;
    b(0, 3) = 0.6;
    b(1, 2) = 0.3;
    gens.push_back(a);
    gens.push_back(b);
    const auto report = classify_gens(gens);
    CHECK(report.solvable());
    CHECK(*report.derived_length <= 2);
}

TEST_CASE("zero algebra") {
    const auto report = classify(lie_closure(std::vector<Matrix>{Matrix::Zero(2, 2)}));
    CHECK(report.dim == 0);
    CHECK(report.class_label == StructureClass::Abelian);
}

TEST_CASE("classify rejects a non-closed basis") {
    MatrixBasis basis(2);
    basis.append(E(2, 0, 1));
    basis.append(E(2, 1, 0));
    CHECK_THROWS_AS(classify(basis), ValidationError);
}
