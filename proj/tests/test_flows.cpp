#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "liedepth/builtins.hpp"
#include "liedepth/flows.hpp"
#include "liedepth/ssm.hpp"
#include "oracles.hpp"

#include <numeric>

using namespace liedepth;

namespace {

PiecewisePath random_path(Rng& rng, int symbols, int segments, double scale) {
    std::vector<Segment> segs;
    for (int k = 0; k < segments; ++k)
        segs.push_back({static_cast<int>(rng.below(symbols)), scale * rng.uniform(0.1, 1.0)});
    return PiecewisePath(segs);
}

Matrix random_matrix(Rng& rng, int n, double scale = 1.0) {
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
    return m;
}

}  // namespace

TEST_CASE("path validation") {
    CHECK_THROWS_AS(PiecewisePath(std::vector<Segment>{}), ValidationError);
    CHECK_THROWS_AS(PiecewisePath({{0, 0.0}}), ValidationError);
    CHECK_THROWS_AS(PiecewisePath({{-1, 1.0}}), ValidationError);
    PiecewisePath p({{0, 0.5}, {1, 0.25}});
    CHECK(p.total() == doctest::Approx(0.75));
    CHECK_THROWS_AS(p.check_symbols(1), ValidationError);
    CHECK(reverse_path(reverse_path(p)) == p);
    const std::vector<std::size_t> bad{0, 0};
    CHECK_THROWS_AS(permute_segments(p, bad), ValidationError);
}

TEST_CASE("expm matches the Taylor oracle") {
    Rng rng(3);
    for (double scale : {1e-3, 0.1, 1.0, 5.0}) {
        for (int t = 0; t < 10; ++t) {
            const Matrix m = random_matrix(rng, 4, scale);
            const Matrix ref = oracle::taylor_expm(m);
            CHECK((expm(m) - ref).norm() <= 1e-12 * std::max(1.0, ref.norm()));
        }
    }
    CHECK((expm(Matrix::Zero(3, 3)) - Matrix::Identity(3, 3)).norm() <= 1e-15);
}

TEST_CASE("logm inverts expm near the identity") {
    Rng rng(4);
    for (int t = 0; t < 20; ++t) {
        const Matrix m = random_matrix(rng, 3, 0.15);
        CHECK((logm_principal(expm(m)) - m).norm() <= 1e-12);
    }
    CHECK_THROWS_AS(logm_principal(-Matrix::Identity(2, 2)), NumericalGuardError);
}

TEST_CASE("transition matrix matches RK4 oracle") {
    const auto gens = builtin_algebra("so3").generators;
    Rng rng(9);
    for (int t = 0; t < 20; ++t) {
        const auto path = random_path(rng, 2, 5, 0.5);
        const Matrix ref = oracle::rk4_flow(gens, path, 400);
        CHECK((transition_matrix(gens, path) - ref).norm() <= 1e-8);
    }
}

TEST_CASE("cocycle and Liouville identities") {
    Rng rng(12);
    std::vector<Matrix> gens{random_matrix(rng, 3, 0.5), random_matrix(rng, 3, 0.5)};
    for (int t = 0; t < 30; ++t) {
        const auto a = random_path(rng, 2, 3, 0.7);
        const auto b = random_path(rng, 2, 3, 0.7);
        const Matrix lhs = transition_matrix(gens, concat(a, b));
        const Matrix rhs = transition_matrix(gens, b) * transition_matrix(gens, a);
        CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, lhs.norm()));
        double tr = 0.0;
        for (const auto& s : a.segments()) tr += gens[s.symbol].trace() * s.duration;
        CHECK(transition_matrix(gens, a).determinant() == doctest::Approx(std::exp(tr)).epsilon(1e-8));
    }
}

TEST_CASE("two-segment Omega_2 closed form") {
    Rng rng(21);
    for (int t = 0; t < 10; ++t) {
        const Matrix A = random_matrix(rng, 3), B = random_matrix(rng, 3);
        const double s = rng.uniform(0.1, 1.0), T = s + rng.uniform(0.1, 1.0);
        const std::vector<Matrix> gens{A, B};
        const PiecewisePath path({{0, s}, {1, T - s}});
        const Matrix expected = 0.5 * s * (T - s) * oracle::comm(B, A);
        CHECK((magnus_omega2(gens, path) - expected).norm() <= 1e-12 * std::max(1.0, expected.norm()));
    }
}

TEST_CASE("Omega_2 and Omega_3 agree with nested quadrature") {
    const auto gens = builtin_algebra("so3").generators;
    Rng rng(22);
    for (int t = 0; t < 5; ++t) {
        const auto path = random_path(rng, 2, 4, 0.6);
        const oracle::PathFn fn(gens, path);
        const Matrix o2 = oracle::omega2_quadrature(fn);
        const Matrix o3 = oracle::omega3_quadrature(fn);
        CHECK((magnus_omega2(gens, path) - o2).norm() <= 1e-10 * std::max(1.0, o2.norm()));
        CHECK((magnus_omega3(gens, path) - o3).norm() <= 1e-8 * std::max(1e-3, o3.norm()));
    }
}

TEST_CASE("Magnus truncation converges for small paths") {
    const auto gens = builtin_algebra("so3").generators;
    Rng rng(23);
    const auto path = random_path(rng, 2, 6, 0.02);
    const Matrix phi = transition_matrix(gens, path);
    const double e1 = (truncated_flow(gens, path, 1) - phi).norm();
    const double e2 = (truncated_flow(gens, path, 2) - phi).norm();
    const double e3 = (truncated_flow(gens, path, 3) - phi).norm();
    CHECK(e2 < e1);
    CHECK(e3 < e2);
    const auto r = magnus_terms(gens, path, 3);
    CHECK((r.phi - phi).norm() <= 1e-14);
    CHECK(commutator_mass(gens, path) == doctest::Approx(spectral_norm(r.omega2)));
}

TEST_CASE("truncated flow guards large mass") {
    const auto gens = builtin_algebra("so3").generators;
    CHECK_THROWS_AS(truncated_flow(gens, PiecewisePath({{0, 0.8}, {1, 0.8}}), 2), NumericalGuardError);
}

TEST_CASE("commuting family has vanishing higher terms") {
    const auto gens = builtin_algebra("diagonal").generators;
    Rng rng(2);
    for (int t = 0; t < 10; ++t) {
        const auto path = random_path(rng, 2, 5, 0.3);
        CHECK(magnus_omega2(gens, path).norm() <= 1e-12);
        CHECK(magnus_omega3(gens, path).norm() <= 1e-12);
        std::vector<std::size_t> order(path.size());
        std::iota(order.begin(), order.end(), 0);
        std::reverse(order.begin(), order.end());
        CHECK((transition_matrix(gens, permute_segments(path, order)) - transition_matrix(gens, path)).norm() <=
              1e-10);
    }
}

TEST_CASE("reversal negates even Magnus terms") {
    const auto gens = builtin_algebra("so3").generators;
    Rng rng(30);
    const auto path = random_path(rng, 2, 5, 0.2);
    const auto fwd = magnus_terms(gens, path, 3);
    const auto rev = magnus_terms(gens, reverse_path(path), 3);
    CHECK((fwd.omega1 - rev.omega1).norm() <= 1e-14);
    CHECK((fwd.omega2 + rev.omega2).norm() <= 1e-14);
    CHECK((fwd.omega3 - rev.omega3).norm() <= 1e-14);
}

TEST_CASE("spectral norm agrees with SVD") {
    Rng rng(40);
    for (int t = 0; t < 20; ++t) {
        const Matrix m = random_matrix(rng, 5);
        Eigen::JacobiSVD<Matrix> svd(m);
        CHECK(spectral_norm(m) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-9));
    }
}
