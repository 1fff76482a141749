#include "liedepth/cascade.hpp"

#include "liedepth/lie_core.hpp"
#include "liedepth/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace liedepth {

namespace {

constexpr double kCommuteTol = 1e-10;

double pair_scale(const Matrix& a, const Matrix& b) { return std::max(1.0, a.norm() * b.norm()); }

// Largest relative commutator over pairs of the family.
double max_commutator(const std::vector<Matrix>& family) {
    double worst = 0.0;
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            worst = std::max(worst, bracket(family[i], family[j]).norm() / pair_scale(family[i], family[j]));
        }
    }
    return worst;
}

void require_triangular(const SSMSpec& ssm, double tol) {
    for (std::size_t k = 0; k < ssm.A.size(); ++k) {
        const Matrix& a = ssm.A[k];
        const double scale = tol * std::max(1.0, a.norm());
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            for (Eigen::Index i = j + 1; i < a.rows(); ++i) {
                if (std::abs(a(i, j)) > scale) {
                    throw ValidationError("cascade: generator '" + (ssm.alphabet.empty() ? std::to_string(k) : ssm.alphabet[k]) +
                                          "' is not upper triangular (entry " + std::to_string(i) + "," +
                                          std::to_string(j) + ")");
                }
            }
        }
    }
}

Matrix strict_column(const Matrix& a, int c) {
    Matrix out = Matrix::Zero(a.rows(), a.cols());
    out.col(c).head(c) = a.col(c).head(c);
    return out;
}

Matrix zero_strict_column(const Matrix& a, int c) {
    Matrix out = a;
    out.col(c).head(c).setZero();
    return out;
}

Matrix elementary(Eigen::Index n, Eigen::Index r, Eigen::Index c) {
    Matrix e = Matrix::Zero(n, n);
    e(r, c) = 1.0;
    return e;
}

// Highest column whose strict part is nonzero for some generator.
int highest_column(const std::vector<Matrix>& family) {
    const Eigen::Index n = family.front().rows();
    for (Eigen::Index c = n - 1; c >= 1; --c) {
        for (const auto& a : family) {
            if (a.col(c).head(c).cwiseAbs().maxCoeff() > 0.0) return static_cast<int>(c);
        }
    }
    return -1;
}

SSMSpec homogeneous_copy(const SSMSpec& ssm, std::vector<Matrix> generators) {
    SSMSpec out;
    out.n = ssm.n;
    out.alphabet = ssm.alphabet;
    out.A = std::move(generators);
    out.b.assign(out.A.size(), Vector::Zero(ssm.n));
    out.h0 = ssm.h0.size() == ssm.n ? ssm.h0 : Vector(Vector::Unit(ssm.n, 0));
    return out;
}

}  // namespace

PeelResult peel_split(const SSMSpec& ssm, bool error_if_abelian, double tol) {
    ssm.validate();
    require_triangular(ssm, tol);

    PeelResult out;
    std::vector<Matrix> family;
    family.reserve(ssm.A.size());
    for (const auto& a : ssm.A) family.push_back(a.triangularView<Eigen::Upper>());

    const int c = max_commutator(family) <= kCommuteTol ? -1 : highest_column(family);
    if (c < 0) {
        if (error_if_abelian) throw ValidationError("peel_split: generator family is already abelian");
        out.passthrough = true;
        out.quotient = homogeneous_copy(ssm, family);
        return out;
    }

    out.column = c;
    const Eigen::Index n = ssm.n;
    for (Eigen::Index r = 0; r < c; ++r) out.ideal_basis.push_back(elementary(n, r, c));

    std::vector<Matrix> quotient;
    for (const auto& a : family) {
        out.ideal_parts.push_back(strict_column(a, c));
        quotient.push_back(zero_strict_column(a, c));
    }
    out.quotient = homogeneous_copy(ssm, quotient);

    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = 0; j < family.size(); ++j) {
            const Matrix lhs = zero_strict_column(bracket(family[i], family[j]), c);
            const Matrix rhs = bracket(quotient[i], quotient[j]);
            out.section_defect = std::max(out.section_defect, (lhs - rhs).norm() / pair_scale(family[i], family[j]));
        }
        for (const auto& e : out.ideal_basis) {
            const Matrix br = bracket(family[i], e);
            out.ideal_defect = std::max(out.ideal_defect, (br - strict_column(br, c)).norm() / std::max(1.0, family[i].norm()));
        }
    }
    if (out.section_defect > 1e-12 || out.ideal_defect > 1e-12) {
        throw InvariantError("peel_split: column " + std::to_string(c) + " does not split (section defect " +
                             std::to_string(out.section_defect) + ", ideal defect " + std::to_string(out.ideal_defect) + ")");
    }
    return out;
}

double CascadeDecomposition::max_layer_commutator() const {
    double worst = 0.0;
    for (const auto& layer : layers) {
        worst = std::max(worst, max_commutator(layer.base ? layer.generators : layer.ideal_basis));
        if (!layer.base) worst = std::max(worst, max_commutator(layer.generators));
    }
    return worst;
}

CascadeDecomposition decompose(const SSMSpec& ssm) {
    ssm.validate();
    const AlgebraReport report = classify(lie_closure(std::span<const Matrix>(ssm.A)));
    if (!report.solvable()) throw ValidationError("decompose: generated Lie algebra is not solvable");
    require_triangular(ssm, 1e-10);

    CascadeDecomposition out;
    out.derived_length = *report.derived_length;

    // Peels in order; the last remainder is the base.
    std::vector<PeelResult> peels;
    SSMSpec current = ssm;
    for (;;) {
        PeelResult p = peel_split(current);
        if (p.passthrough) {
            current = std::move(p.quotient);
            break;
        }
        current = p.quotient;
        peels.push_back(std::move(p));
    }
    std::vector<Matrix> upper;
    for (const auto& a : ssm.A) upper.push_back(a.triangularView<Eigen::Upper>());
    out.source = homogeneous_copy(ssm, std::move(upper));

    std::vector<int> zeroed;
    for (const auto& p : peels) zeroed.push_back(p.column);

    CascadeLayer base;
    base.base = true;
    base.generators = current.A;
    base.quotient_generators = current.A;
    base.section_columns = zeroed;
    out.layers.push_back(std::move(base));

    for (std::size_t i = peels.size(); i-- > 0;) {
        CascadeLayer layer;
        layer.column = peels[i].column;
        layer.ideal_basis = peels[i].ideal_basis;
        layer.generators = peels[i].ideal_parts;
        layer.quotient_generators = peels[i].quotient.A;
        layer.section_columns.assign(zeroed.begin(), zeroed.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        out.layers.push_back(std::move(layer));
    }
    out.depth = static_cast<int>(out.layers.size());

    const double comm = out.max_layer_commutator();
    if (comm > kCommuteTol) {
        throw InvariantError("decompose: layer family fails to commute (" + std::to_string(comm) + ")");
    }
    return out;
}

Matrix cascade_flow(const CascadeDecomposition& decomp, const PiecewisePath& path, double step, double* ideal_residual) {
    if (decomp.layers.empty()) throw ValidationError("cascade_flow: empty decomposition");
    if (!(step > 0.0)) throw ValidationError("cascade_flow: step must be positive");
    const std::size_t alphabet = decomp.layers.front().generators.size();
    path.check_symbols(alphabet);

    const Eigen::Index n = decomp.source.n;
    const Eigen::Index L = static_cast<Eigen::Index>(decomp.layers.size());
    Matrix state(n, n * L);
    for (Eigen::Index i = 0; i < L; ++i) state.middleCols(i * n, n) = Matrix::Identity(n, n);

    double residual = 0.0;
    double t0 = 0.0;
    for (const auto& seg : path.segments()) {
        const int x = seg.symbol;
        auto rhs = [&](double, const Matrix& y) {
            Matrix dy(n, n * L);
            dy.leftCols(n) = decomp.layers[0].generators[x] * y.leftCols(n);
            Matrix q = y.leftCols(n);
            for (Eigen::Index i = 1; i < L; ++i) {
                const auto& layer = decomp.layers[i];
                const Matrix gen = q.partialPivLu().solve(layer.generators[x] * q);
                Matrix off = gen;
                off.col(layer.column).head(layer.column).setZero();
                residual = std::max(residual, off.norm());
                dy.middleCols(i * n, n) = gen * y.middleCols(i * n, n);
                q = q * y.middleCols(i * n, n);
            }
            return dy;
        };
        state = rk4_integrate(state, t0, seg.duration, substeps_for(seg.duration, step), rhs);
        t0 += seg.duration;
    }

    Matrix g = state.leftCols(n);
    for (Eigen::Index i = 1; i < L; ++i) g = g * state.middleCols(i * n, n);
    if (ideal_residual) *ideal_residual = residual;
    return g;
}

CascadeCheck verify_cascade(const CascadeDecomposition& decomp, std::span<const PiecewisePath> paths, double step,
                            unsigned jobs) {
    if (paths.empty()) throw ValidationError("verify_cascade: no paths");
    std::vector<double> errors(paths.size(), 0.0);
    std::vector<double> residuals(paths.size(), 0.0);
    parallel_for(paths.size(), jobs, [&](std::size_t i) {
        const Matrix g = cascade_flow(decomp, paths[i], step, &residuals[i]);
        errors[i] = spectral_norm(g - transition_matrix(decomp.source, paths[i]));
    });

    CascadeCheck out;
    out.max_error = *std::max_element(errors.begin(), errors.end());
    out.max_ideal_residual = *std::max_element(residuals.begin(), residuals.end());
    out.max_layer_commutator = decomp.max_layer_commutator();
    if (out.max_ideal_residual > 1e-9) {
        throw InvariantError("verify_cascade: conjugated generator left the ideal (residual " +
                             std::to_string(out.max_ideal_residual) + ")");
    }
    return out;
}

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
}

Vector vec_identity(Eigen::Index n) {
    const Matrix id = Matrix::Identity(n, n);
    return Eigen::Map<const Vector>(id.data(), n * n);
}

}  // namespace

DeepSSMSpec to_deep_ssm(const CascadeDecomposition& decomp) {
    if (decomp.depth < 1 || decomp.depth > 2) {
        throw ValidationError("to_deep_ssm: linear-coupling realization needs depth 1 or 2, got " +
                              std::to_string(decomp.depth));
    }
    const Eigen::Index n = decomp.source.n;
    const Matrix id_n = Matrix::Identity(n, n);
    const auto& base = decomp.layers[0].generators;
    const std::size_t alphabet = base.size();

    DeepSSMSpec deep;
    if (decomp.depth == 1) {
        deep.layers.push_back(lift(homogeneous_copy(decomp.source, base)));
        deep.couplings.emplace_back();
        return deep;
    }

    const auto& ideal = decomp.layers[1];
    const Eigen::Index c = ideal.column;
    const Matrix id_c = Matrix::Identity(c, c);
    const Eigen::Index n0 = n * n + c * c;

    SSMSpec layer0;
    layer0.n = static_cast<int>(n0);
    layer0.alphabet = decomp.source.alphabet;
    for (const auto& f : base) {
        Matrix a = Matrix::Zero(n0, n0);
        a.topLeftCorner(n * n, n * n) = kron(id_n, f);
        const Matrix m = f(c, c) * id_c - f.topLeftCorner(c, c);
        a.bottomRightCorner(c * c, c * c) = kron(m.transpose(), id_c);
        layer0.A.push_back(std::move(a));
        layer0.b.push_back(Vector::Zero(n0));
    }
    layer0.h0.resize(n0);
    layer0.h0 << vec_identity(n), vec_identity(c);

    SSMSpec layer1;
    layer1.n = static_cast<int>(n * n);
    for (Eigen::Index r = 0; r < c; ++r) {
        layer1.alphabet.push_back("E" + std::to_string(r) + "_" + std::to_string(c));
        layer1.A.push_back(kron(id_n, elementary(n, r, c)));
        layer1.b.push_back(Vector::Zero(n * n));
    }
    layer1.h0 = vec_identity(n);

    // u_{r'} = sum_r Y(r', r) N(x)(r, c), Y stored column-major after vec(Q).
    std::vector<Matrix> coupling;
    for (std::size_t x = 0; x < alphabet; ++x) {
        Matrix v = Matrix::Zero(c, n0 + 1);
        const Matrix& nx = ideal.generators[x];
        for (Eigen::Index rp = 0; rp < c; ++rp) {
            for (Eigen::Index r = 0; r < c; ++r) v(rp, n * n + rp + r * c) = nx(r, c);
        }
        coupling.push_back(std::move(v));
    }

    deep.layers = {std::move(layer0), std::move(layer1)};
    deep.couplings = {{}, std::move(coupling)};
    deep.validate();
    return deep;
}

Matrix deep_reconstruct(const CascadeDecomposition& decomp, std::span<const Vector> layer_states) {
    const Eigen::Index n = decomp.source.n;
    if (layer_states.size() != static_cast<std::size_t>(decomp.depth)) {
        throw ValidationError("deep_reconstruct: expected one state per layer");
    }
    auto as_matrix = [n](const Vector& v) { return Matrix(Eigen::Map<const Matrix>(v.data(), n, n)); };
    if (layer_states[0].size() < n * n) throw ValidationError("deep_reconstruct: layer 0 state too short");
    Matrix g = as_matrix(layer_states[0]);
    if (decomp.depth == 2) {
        if (layer_states[1].size() != n * n) throw ValidationError("deep_reconstruct: layer 1 state has wrong length");
        g = g * as_matrix(layer_states[1]);
    }
    return g;
}

int depth_equivalent(int order) {
    if (order < 1) throw ValidationError("depth_equivalent: order must be positive");
    int k = 1;
    while ((1 << (k - 1)) < order) ++k;
    return k;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0) || !(hi > lo)) throw ValidationError("log_grid: need 0 < lo < hi");
    if (points < 2) throw ValidationError("log_grid: need at least two points");
    std::vector<double> out(points);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < points; ++i) {
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

namespace {

// Unit-duration path with `segments` pieces; cut points uniform, adjacent
// symbols distinct so consecutive pieces never merge.
PiecewisePath unit_path(std::size_t alphabet, std::size_t segments, std::uint64_t seed, std::uint64_t index) {
    Rng rng = Rng::for_index(seed, index);
    std::vector<double> cuts(segments - 1);
    for (auto& x : cuts) x = rng.uniform();
    cuts.push_back(0.0);
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    std::vector<Segment> segs;
    int prev = -1;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        int symbol = static_cast<int>(rng.below(alphabet));
        if (alphabet > 1 && symbol == prev) symbol = static_cast<int>((symbol + 1 + rng.below(alphabet - 1)) % alphabet);
        const double d = cuts[i + 1] - cuts[i];
        if (d > 0.0) segs.push_back({symbol, d});
        prev = symbol;
    }
    return PiecewisePath(std::move(segs));
}

}  // namespace

ScalingResult scaling_experiment(std::span<const Matrix> generators, const ScalingOptions& options) {
    if (generators.size() < 2) throw ValidationError("scaling_experiment: need at least two generators");
    if (options.eps_grid.size() < 3) throw ValidationError("scaling_experiment: need at least three epsilon values");
    if (options.paths_per_point < 1) throw ValidationError("scaling_experiment: paths_per_point must be positive");
    if (options.segments < 2) throw ValidationError("scaling_experiment: need at least two segments per path");
    if (options.orders.empty()) throw ValidationError("scaling_experiment: no truncation orders");
    for (int c : options.orders) {
        if (c < 1 || c > 3) throw ValidationError("scaling_experiment: orders must be in {1, 2, 3}");
    }
    for (double e : options.eps_grid) {
        if (!(e > 0.0) || !(e < 1.0)) throw ValidationError("scaling_experiment: epsilon values must lie in (0, 1)");
    }
    const std::vector<Matrix> family(generators.begin(), generators.end());
    if (max_commutator(family) <= kCommuteTol) {
        throw ValidationError("scaling_experiment: generators commute, truncation error sits at the rounding floor");
    }

    // Normalize so the generator mass of a unit path is exactly epsilon.
    std::vector<Matrix> unit;
    for (const auto& g : family) {
        const double s = spectral_norm(g);
        if (!(s > 0.0)) throw ValidationError("scaling_experiment: zero generator");
        unit.push_back(g / s);
    }

    std::vector<PiecewisePath> paths;
    for (std::size_t r = 0; r < options.paths_per_point; ++r) {
        paths.push_back(unit_path(unit.size(), options.segments, options.seed, r));
    }

    const std::size_t ne = options.eps_grid.size();
    const std::size_t no = options.orders.size();
    const std::size_t np = paths.size();
    std::vector<double> errors(ne * no * np, 0.0);
    parallel_for(ne * np, options.jobs, [&](std::size_t task) {
        const std::size_t ie = task / np;
        const std::size_t ip = task % np;
        std::vector<Matrix> scaled;
        for (const auto& g : unit) scaled.push_back(options.eps_grid[ie] * g);
        const Matrix phi = transition_matrix(std::span<const Matrix>(scaled), paths[ip]);
        for (std::size_t io = 0; io < no; ++io) {
            const Matrix trunc = truncated_flow(std::span<const Matrix>(scaled), paths[ip], options.orders[io]);
            errors[(ie * no + io) * np + ip] = spectral_norm(phi - trunc);
        }
    });

    ScalingResult out;
    for (std::size_t ie = 0; ie < ne; ++ie) {
        for (std::size_t io = 0; io < no; ++io) {
            for (std::size_t ip = 0; ip < np; ++ip) {
                ScalingRow row;
                row.epsilon = options.eps_grid[ie];
                row.order = options.orders[io];
                row.error = errors[(ie * no + io) * np + ip];
                row.replicate = static_cast<int>(ip);
                row.depth_equiv = depth_equivalent(row.order);
                out.rows.push_back(row);
            }
        }
    }

    for (std::size_t io = 0; io < no; ++io) {
        Eigen::MatrixXd design(ne, 2);
        Vector target(ne);
        for (std::size_t ie = 0; ie < ne; ++ie) {
            double mean = 0.0;
            for (std::size_t ip = 0; ip < np; ++ip) mean += errors[(ie * no + io) * np + ip];
            mean /= static_cast<double>(np);
            if (!(mean > 0.0)) {
                throw NumericalGuardError("scaling_experiment: zero mean error at epsilon " +
                                          std::to_string(options.eps_grid[ie]) + "; slope undefined");
            }
            design(ie, 0) = std::log(options.eps_grid[ie]);
            design(ie, 1) = 1.0;
            target(ie) = std::log(mean);
        }
        const Vector coef = design.colPivHouseholderQr().solve(target);
        ScalingFit fit;
        fit.order = options.orders[io];
        fit.slope = coef(0);
        fit.intercept = coef(1);
        fit.expected = fit.order + 1.0;
        out.fits.push_back(fit);
    }
    return out;
}

}  // namespace liedepth
