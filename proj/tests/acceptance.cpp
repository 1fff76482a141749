// End-to-end acceptance run. One line per criterion, exit status 1 if any fails.
#include "liedepth/builtins.hpp"
#include "liedepth/cascade.hpp"
#include "liedepth/flows.hpp"
#include "liedepth/groups.hpp"
#include "liedepth/io.hpp"
#include "liedepth/lie_core.hpp"
#include "liedepth/lyndon.hpp"
#include "liedepth/ssm.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace liedepth;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects failed sub-checks with a short reason each.
struct Verdict {
    std::vector<std::string> failures;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

std::string data(const std::string& rel) { return std::string(LIEDEPTH_DATA_DIR) + "/" + rel; }
SSMSpec load_ssm(const std::string& name) { return io::parse_ssm(io::read_file(data("ssm/" + name + ".json"))); }

PiecewisePath random_path(Rng& rng, int symbols, int segments, double lo, double hi) {
    std::vector<Segment> segs;
    for (int k = 0; k < segments; ++k) segs.push_back({static_cast<int>(rng.below(symbols)), rng.uniform(lo, hi)});
    return PiecewisePath(segs);
}

// Adjacent symbols differ so every breakpoint is a real switch.
PiecewisePath alternating_path(Rng& rng, int symbols, int segments, double total) {
    std::vector<double> w(segments);
    double sum = 0.0;
    for (auto& x : w) sum += (x = rng.uniform(0.2, 1.0));
    std::vector<Segment> segs;
    int prev = -1;
    for (int k = 0; k < segments; ++k) {
        int s = static_cast<int>(rng.below(symbols));
        if (s == prev) s = (s + 1) % symbols;
        prev = s;
        segs.push_back({s, total * w[k] / sum});
    }
    return PiecewisePath(segs);
}

PiecewisePath scaled(const PiecewisePath& p, double factor) {
    std::vector<Segment> segs = p.segments();
    for (auto& s : segs) s.duration *= factor;
    return PiecewisePath(segs);
}

Matrix random_matrix(Rng& rng, int n) {
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return m;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<PiecewisePath> unit_horizon_paths(const SSMSpec& ssm, std::size_t count, std::uint64_t seed) {
    std::vector<PiecewisePath> out;
    const PathSampler sampler{1.0, 0.125, std::nullopt};
    for (std::size_t i = 0; i < count; ++i) out.push_back(sample_path(ssm, sampler, seed, i));
    return out;
}

// ---------------------------------------------------------------------------

void criterion_classification(Verdict& v) {
    const auto t0 = Clock::now();
    const std::map<std::string, StructureClass> expected{{"diagonal", StructureClass::Abelian},
                                                         {"strictly_upper_3", StructureClass::Nilpotent},
                                                         {"upper_triangular_2", StructureClass::Solvable},
                                                         {"sl2", StructureClass::NonSolvable}};
    double worst_jacobi = 0.0;
    for (const auto& [name, cls] : expected) {
        const auto gens = io::parse_algebra(io::read_file(data("algebras/" + name + ".json"))).generators;
        const auto basis = lie_closure(gens);
        const auto r = classify(basis);
        v.require(r.class_label == cls, name + " label " + to_string(r.class_label));
        if (name == "strictly_upper_3")
            v.require(r.nilpotency_class == 2 && r.derived_length == 2, "strictly_upper_3 class/length");
        if (name == "upper_triangular_2") v.require(r.derived_length == 2, "upper_triangular_2 length");
        const auto& b = basis.elements();
        for (const auto& x : b)
            for (const auto& y : b)
                for (const auto& z : b) {
                    const Matrix j = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y));
                    worst_jacobi = std::max(worst_jacobi, j.norm());
                }
    }
    const double elapsed = seconds_since(t0);
    v.require(worst_jacobi <= 1e-10, "Jacobi residual");
    v.require(elapsed < 1.0, "runtime");
    v.detail << "jacobi=" << worst_jacobi << " time=" << elapsed << "s";
}

void criterion_magnus(Verdict& v) {
    Rng rng(101);
    double two_seg = 0.0;
    for (int t = 0; t < 20; ++t) {
        std::vector<Matrix> gens{random_matrix(rng, 3), random_matrix(rng, 3)};
        const double s = rng.uniform(0.05, 1.0), T = s + rng.uniform(0.05, 1.0);
        const Matrix expected = 0.5 * s * (T - s) * bracket(gens[1], gens[0]);
        two_seg = std::max(two_seg, (magnus_omega2(gens, PiecewisePath({{0, s}, {1, T - s}})) - expected).norm() /
                                        std::max(1.0, expected.norm()));
    }
    const auto so3 = builtin_algebra("so3").generators;
    double o3_rel = 0.0;
    for (int t = 0; t < 20; ++t) {
        const auto path = alternating_path(rng, 2, 3, rng.uniform(0.2, 0.9));
        const Matrix ref = oracle::omega3_quadrature(oracle::PathFn(so3, path));
        o3_rel = std::max(o3_rel, (magnus_omega3(so3, path) - ref).norm() / ref.norm());
    }
    const auto diag = builtin_algebra("diagonal").generators;
    double commuting = 0.0;
    for (int t = 0; t < 20; ++t) {
        const auto path = random_path(rng, 2, 5, 0.05, 0.3);
        commuting = std::max({commuting, spectral_norm(magnus_omega2(diag, path)),
                              spectral_norm(magnus_omega3(diag, path))});
    }
    v.require(two_seg <= 1e-12, "two-segment Omega_2");
    v.require(o3_rel <= 1e-8, "Omega_3 vs quadrature");
    v.require(commuting <= 1e-12, "commuting family");
    v.detail << "omega2_two_seg=" << two_seg << " omega3_rel=" << o3_rel << " commuting=" << commuting;
}

void criterion_flow_identities(Verdict& v) {
    Rng rng(202);
    std::vector<Matrix> gens;
    for (int k = 0; k < 3; ++k) gens.push_back(0.6 * random_matrix(rng, 3));
    double cocycle = 0.0, liouville = 0.0, ode = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto path = random_path(rng, 3, 6, 0.05, 0.5);
        const std::size_t split = 1 + rng.below(path.size() - 1);
        const PiecewisePath head(std::vector<Segment>(path.segments().begin(), path.segments().begin() + split));
        const PiecewisePath tail(std::vector<Segment>(path.segments().begin() + split, path.segments().end()));
        const Matrix phi = transition_matrix(gens, path);
        cocycle = std::max(cocycle, (phi - transition_matrix(gens, tail) * transition_matrix(gens, head)).norm() /
                                        phi.norm());
        double tr = 0.0;
        for (const auto& s : path.segments()) tr += gens[s.symbol].trace() * s.duration;
        liouville = std::max(liouville, std::abs(phi.determinant() - std::exp(tr)) / std::exp(tr));
        ode = std::max(ode, (phi - oracle::rk4_flow(gens, path, 200)).norm());
    }
    v.require(cocycle <= 1e-10, "cocycle");
    v.require(liouville <= 1e-8, "Liouville");
    v.require(ode <= 1e-8, "RK4 oracle");
    v.detail << "cocycle=" << cocycle << " liouville=" << liouville << " rk4=" << ode;
}

void criterion_abelian_obstruction(Verdict& v) {
    Rng rng(303);
    const auto diag = load_ssm("restricted_affine");
    double perm_dev = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto path = random_path(rng, 2, 6, 0.05, 0.5);
        std::vector<std::size_t> order(path.size());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        perm_dev = std::max(perm_dev, (transition_matrix(diag, permute_segments(path, order)) -
                                       transition_matrix(diag, path)).norm());
    }
    v.require(perm_dev <= 1e-10, "abelian permutation invariance");

    const auto so3 = builtin_algebra("so3").generators;
    int violations = 0, instances = 0;
    double worst_margin = INFINITY;
    for (int t = 0; t < 200; ++t) {
        const auto x = alternating_path(rng, 2, 2 + static_cast<int>(rng.below(5)), rng.uniform(0.05, 0.9));
        PiecewisePath xp;
        if (t % 2 == 0) {
            xp = reverse_path(x);
        } else {
            std::vector<std::size_t> order(x.size());
            std::iota(order.begin(), order.end(), 0);
            for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
            xp = permute_segments(x, order);
        }
        const Matrix phi = transition_matrix(so3, x), phip = transition_matrix(so3, xp);
        const Matrix om = logm_principal(phi), omp = logm_principal(phip);
        const double lhs = spectral_norm(phi - phip);
        const double rhs = std::exp(-std::max(spectral_norm(om), spectral_norm(omp))) * spectral_norm(om - omp);
        ++instances;
        if (lhs < rhs) ++violations;
        if (rhs > 0) worst_margin = std::min(worst_margin, lhs / rhs);
    }
    v.require(violations == 0, "lower-bound inequality violated " + std::to_string(violations) + "x");

    // Reversal removes the odd terms; what is left after 2 Omega_2 is the Omega_4 tail.
    std::vector<double> Ts = log_grid(1e-3, 1e-1, 9), residual;
    std::vector<PiecewisePath> shapes;
    for (int k = 0; k < 5; ++k) shapes.push_back(alternating_path(rng, 2, 6, 1.0));
    for (double T : Ts) {
        double acc = 0.0;
        for (const auto& shape : shapes) {
            const auto x = scaled(shape, T);
            const Matrix om = logm_principal(transition_matrix(so3, x));
            const Matrix omp = logm_principal(transition_matrix(so3, reverse_path(x)));
            acc += spectral_norm(om - omp - 2.0 * magnus_omega2(so3, x));
        }
        residual.push_back(acc / shapes.size());
    }
    const double slope = fit_slope(Ts, residual);
    v.require(std::abs(slope - 4.0) <= 0.3, "reversal residual slope");
    v.detail << "perm_dev=" << perm_dev << " bound_violations=" << violations << "/" << instances
             << " min_lhs/rhs=" << worst_margin << " reversal_slope=" << slope;
}

void criterion_four_path(Verdict& v) {
    const auto t0 = Clock::now();
    const std::vector<std::string> alphabet{"x", "y"};
    auto path = [&](const char* n) { return io::parse_path(io::read_file(data(std::string("paths/") + n + ".json")), alphabet); };
    const auto p1 = path("prefix1"), p2 = path("prefix2"), xy = path("xy");
    const auto restricted = four_path_probe(load_ssm("restricted_affine"), p1, p2, xy);
    const auto general = four_path_probe(load_ssm("general_affine"), p1, p2, xy);
    const double elapsed = seconds_since(t0);
    v.require(restricted.lhs_norm <= 1e-12, "restricted difference of differences");
    v.require(general.residual <= 1e-10, "general M identity");
    v.require(elapsed < 1.0, "runtime");
    v.detail << "restricted_lhs=" << restricted.lhs_norm << " general_residual=" << general.residual
             << " general_lhs=" << general.lhs_norm << " time=" << elapsed << "s";
}

void criterion_scaling(Verdict& v) {
    const auto t0 = Clock::now();
    ScalingOptions opt;
    opt.orders = {1, 2, 3};
    opt.eps_grid = log_grid(1e-3, 1e-1, 9);
    opt.paths_per_point = 20;
    opt.seed = 0;
    const auto r = scaling_experiment(builtin_algebra("so3").generators, opt);
    const double elapsed = seconds_since(t0);
    const std::map<int, std::pair<double, double>> target{{1, {2.0, 0.2}}, {2, {3.0, 0.2}}, {3, {4.0, 0.3}}};
    for (const auto& f : r.fits) {
        const auto [want, tol] = target.at(f.order);
        v.require(std::abs(f.slope - want) <= tol, "order " + std::to_string(f.order) + " slope");
        v.detail << "c" << f.order << "=" << f.slope << " ";
    }
    v.require(r.fits.size() == 3, "fit count");
    v.require(elapsed < 30.0, "runtime");
    v.detail << "time=" << elapsed << "s";
}

void criterion_cascade(Verdict& v) {
    const double step = 1.0 / 256;
    const std::vector<std::tuple<std::string, int, double>> cases{{"upper_triangular_2", 2, 1e-8},
                                                                   {"upper_triangular_3", 3, 1e-6}};
    for (const auto& [name, layers, tol] : cases) {
        const auto ssm = load_ssm(name);
        const auto d = decompose(ssm);
        const auto check = verify_cascade(d, unit_horizon_paths(ssm, 50, 7), step);
        v.require(d.depth == layers, name + " depth " + std::to_string(d.depth));
        v.require(d.max_layer_commutator() <= 1e-10, name + " layer commutator");
        v.require(check.max_error <= tol, name + " reconstruction");
        v.detail << name << ": depth=" << d.depth << " comm=" << d.max_layer_commutator()
                 << " err=" << check.max_error << "  ";
    }
    // Block triangular stack: abelian base on the top-left/bottom-right
    // diagonal blocks, abelian ideal layer in the off-diagonal block.
    const int k = 2;
    auto block = [&](const Vector& d1, const Vector& d2, const Matrix& c) {
        Matrix m = Matrix::Zero(2 * k, 2 * k);
        m.topLeftCorner(k, k) = d1.asDiagonal();
        m.bottomRightCorner(k, k) = d2.asDiagonal();
        m.topRightCorner(k, k) = c;
        return m;
    };
    Matrix c1(2, 2), c2(2, 2);
    c1 << 0.7, -0.2, 0.4, 1.1;
    c2 << -0.5, 0.3, 0.9, 0.2;
    const std::vector<Matrix> stack{block(Vector::LinSpaced(2, 0.3, -0.4), Vector::LinSpaced(2, 0.8, 0.1), c1),
                                    block(Vector::LinSpaced(2, -0.6, 0.2), Vector::LinSpaced(2, 0.5, -0.9), c2)};
    const auto report = classify(lie_closure(stack));
    v.require(report.solvable() && *report.derived_length <= 2, "block stack solvable with length <= 2");
    v.detail << "stack_class=" << to_string(report.class_label)
             << " stack_length=" << (report.derived_length ? *report.derived_length : -1);
}

void criterion_combinatorics(Verdict& v) {
    v.require(depth_bound(128) == 8, "depth_bound(128)");
    bool counts_ok = true;
    for (int n : {2, 3}) {
        std::map<int, WideCount> by_len;
        for_each_lyndon(n, 10, [&](const Word& w) {
            ++by_len[static_cast<int>(w.size())];
            return true;
        });
        for (int m = 1; m <= 10; ++m) counts_ok = counts_ok && by_len[m] == lyndon_count(n, m);
        counts_ok = counts_ok && std::accumulate(by_len.begin(), by_len.end(), WideCount(0),
                                                 [](WideCount a, const auto& kv) { return a + kv.second; }) ==
                                     witt_dimension(n, 10);
    }
    v.require(counts_ok, "enumeration vs Witt counts");
    v.require(witt_dimension(2, 5) == 14, "witt_dimension(2,5)");
    bool independent = true;
    for (int n : {2, 3}) {
        for (int T = 1; T <= 4; ++T) {
            const oracle::TensorAlgebra alg(n, T);
            std::vector<Matrix> evals;
            for (const auto& w : enumerate_lyndon(n, T)) evals.push_back(evaluate(*bracket_tree(w), alg.letters));
            independent = independent && static_cast<WideCount>(oracle::rank_of(evals, 1e-10)) == witt_dimension(n, T);
        }
    }
    v.require(independent, "bracket-tree independence");
    v.detail << "depth_bound(128)=" << depth_bound(128) << " witt(2,5)=" << to_decimal(witt_dimension(2, 5))
             << " witt(3,10)=" << to_decimal(witt_dimension(3, 10));
}

void criterion_groups(Verdict& v) {
    const auto& rot = a5_rotation_elements();
    const Mat3 p = a5_generator_p(), r = a5_generator_r(), I = Mat3::Identity();
    const double rel = std::max({(p * p * p - I).cwiseAbs().maxCoeff(),
                                 (r * r * r * r * r - I).cwiseAbs().maxCoeff(),
                                 ((p * r) * (p * r) - I).cwiseAbs().maxCoeff()});
    v.require(rot.matrices.size() == 60, "A5 closure size " + std::to_string(rot.matrices.size()));
    v.require(rel <= 1e-12, "A5 relations");

    const std::map<std::string, StructureClass> table{
        {"C2", StructureClass::Abelian},   {"C3", StructureClass::Abelian},    {"C60", StructureClass::Abelian},
        {"D8", StructureClass::Nilpotent}, {"H3", StructureClass::Nilpotent},  {"S3", StructureClass::Solvable},
        {"S4", StructureClass::Solvable},  {"A4", StructureClass::Solvable},   {"A5", StructureClass::NonSolvable},
        {"S5", StructureClass::NonSolvable}};
    std::size_t mismatches = 0;
    for (const auto& [name, cls] : table) {
        const auto g = make_group(name);
        v.require(classify_group(g).class_label == cls, name + " label");
        // brute-force oracle: fold the word through the table one token at a time
        for (const auto& rec : gen_word_dataset(g, 128, 1000, 17)) {
            int acc = g.identity;
            for (std::size_t i = 0; i < rec.tokens.size(); ++i) {
                acc = g.table[static_cast<std::size_t>(acc) * g.order + rec.tokens[i]];
                mismatches += rec.labels[i] != acc;
            }
        }
    }
    v.require(mismatches == 0, "word label mismatches " + std::to_string(mismatches));
    v.require(a5_isomorphism_mismatches() == 0, "A5 matrix table vs permutation table");

    double worst_time = 0.0;
    for (const char* name : {"A5", "S5"}) {
        const auto g = make_group(name);
        const auto t0 = Clock::now();
        const auto d = gen_word_dataset(g, 128, 1000, 3);
        worst_time = std::max(worst_time, seconds_since(t0));
    }
    const auto t0 = Clock::now();
    const auto rd = gen_rotation_dataset(128, 1000, 3);
    const double rot_time = seconds_since(t0);
    v.require(worst_time < 5.0 && rot_time < 5.0, "generation time");
    v.detail << "a5_elements=" << rot.matrices.size() << " relation_err=" << rel << " label_mismatches=" << mismatches
             << " gen_time=" << worst_time << "s rot_time=" << rot_time << "s";
}

void criterion_sim_error(Verdict& v) {
    const auto target = load_ssm("so3_target");
    SimErrorOptions self;
    self.horizon = 1.0;
    self.samples = 200;
    self.seed = 1;
    const auto s = estimate_sim_error(target, target, self);
    v.require(s.delta_hat <= 1e-10, "self delta_hat");
    v.require((s.P - Matrix::Identity(target.n, target.n)).cwiseAbs().maxCoeff() <= 1e-8, "self P");

    const auto approx = load_ssm("abelian_approx");
    auto sweep = [&](unsigned jobs) {
        std::string text;
        std::vector<double> deltas;
        for (double T : {1.0, 2.0, 4.0, 8.0}) {
            SimErrorOptions o;
            o.horizon = T;
            o.samples = 200;
            o.seed = 1;
            o.jobs = jobs;
            const auto r = estimate_sim_error(target, approx, o);
            deltas.push_back(r.delta_hat);
            text += io::dump(io::sim_error_json(r)) + "\n";
        }
        return std::make_pair(text, deltas);
    };
    const auto [text1, deltas] = sweep(1);
    const auto [text2, deltas2] = sweep(1);
    const auto [text4, deltas4] = sweep(4);
    bool monotone = true;
    for (std::size_t i = 1; i < deltas.size(); ++i) monotone = monotone && deltas[i] >= deltas[i - 1];
    v.require(monotone, "sweep non-decreasing");
    v.require(text1 == text2 && text1 == text4, "byte-for-byte reproducibility");
    v.detail << "self_delta=" << s.delta_hat << " sweep=";
    for (double d : deltas) v.detail << d << ",";
    v.detail << " reproducible=" << (text1 == text2 && text1 == text4 ? "yes" : "no");
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria{
        {"classification suite", criterion_classification},
        {"Magnus correctness", criterion_magnus},
        {"flow identities", criterion_flow_identities},
        {"abelian obstruction and reversal", criterion_abelian_obstruction},
        {"four-path probe", criterion_four_path},
        {"truncation scaling on so(3)", criterion_scaling},
        {"cascade decomposition", criterion_cascade},
        {"Lyndon combinatorics", criterion_combinatorics},
        {"finite groups and datasets", criterion_groups},
        {"simulation error estimator", criterion_sim_error},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        v.detail.precision(4);
        try {
            criteria[i].second(v);
        } catch (const std::exception& e) {
            v.failures.push_back(std::string("exception: ") + e.what());
        }
        const bool ok = v.failures.empty();
        failed += !ok;
        std::printf("[%s] %2zu %s | %s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.str().c_str());
        for (const auto& f : v.failures) std::printf("         - %s\n", f.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
