#include "liedepth/ssm.hpp"

#include "liedepth/lie_core.hpp"
#include "liedepth/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace liedepth {

void SSMSpec::validate() const {
    if (n <= 0) throw ValidationError("SSM: state dimension must be positive");
    if (A.empty()) throw ValidationError("SSM: alphabet must be nonempty");
    if (b.size() != A.size()) throw ValidationError("SSM: every symbol needs both A and b");
    if (!alphabet.empty() && alphabet.size() != A.size()) throw ValidationError("SSM: alphabet names do not match generator count");
    for (std::size_t k = 0; k < A.size(); ++k) {
        if (A[k].rows() != n || A[k].cols() != n) throw ValidationError("SSM: generator " + std::to_string(k) + " has wrong shape");
        if (b[k].size() != n) throw ValidationError("SSM: translation " + std::to_string(k) + " has wrong length");
        if (!A[k].allFinite() || !b[k].allFinite()) throw ValidationError("SSM: non-finite entries for symbol " + std::to_string(k));
    }
    if (h0.size() != n) throw ValidationError("SSM: h0 has wrong length");
    if (!h0.allFinite()) throw ValidationError("SSM: non-finite h0");
}

int SSMSpec::symbol_index(std::string_view name) const {
    for (std::size_t k = 0; k < alphabet.size(); ++k) {
        if (alphabet[k] == name) return static_cast<int>(k);
    }
    throw ValidationError("unknown symbol '" + std::string(name) + "'");
}

bool SSMSpec::is_homogeneous(double tol) const {
    return std::all_of(b.begin(), b.end(), [tol](const Vector& v) { return v.cwiseAbs().maxCoeff() <= tol; });
}

SSMSpec SSMSpec::from_generators(std::vector<Matrix> generators, std::optional<Vector> h0) {
    if (generators.empty()) throw ValidationError("from_generators: empty family");
    SSMSpec s;
    s.n = static_cast<int>(generators.front().rows());
    for (std::size_t k = 0; k < generators.size(); ++k) {
        s.alphabet.push_back("g" + std::to_string(k));
        s.b.push_back(Vector::Zero(s.n));
    }
    s.A = std::move(generators);
    s.h0 = h0 ? *h0 : Vector(Vector::Unit(s.n, 0));
    s.validate();
    return s;
}

Matrix transition_matrix(const SSMSpec& ssm, const PiecewisePath& path) {
    return transition_matrix(std::span<const Matrix>(ssm.A), path);
}
FlowResult magnus_terms(const SSMSpec& ssm, const PiecewisePath& path, int order) {
    return magnus_terms(std::span<const Matrix>(ssm.A), path, order);
}
double commutator_mass(const SSMSpec& ssm, const PiecewisePath& path) {
    return commutator_mass(std::span<const Matrix>(ssm.A), path);
}
Matrix truncated_flow(const SSMSpec& ssm, const PiecewisePath& path, int order) {
    return truncated_flow(std::span<const Matrix>(ssm.A), path, order);
}
double generator_mass(const SSMSpec& ssm, const PiecewisePath& path) {
    return generator_mass(std::span<const Matrix>(ssm.A), path);
}

SSMSpec homogenize(const SSMSpec& ssm) {
    ssm.validate();
    const int n = ssm.n;
    SSMSpec out;
    out.n = n + 1;
    out.alphabet = ssm.alphabet;
    for (std::size_t k = 0; k < ssm.A.size(); ++k) {
        Matrix g = Matrix::Zero(n + 1, n + 1);
        g.topLeftCorner(n, n) = ssm.A[k];
        g.topRightCorner(n, 1) = ssm.b[k];
        out.A.push_back(std::move(g));
        out.b.push_back(Vector::Zero(n + 1));
    }
    out.h0 = Vector::Zero(n + 1);
    out.h0.head(n) = ssm.h0;
    out.h0(n) = 1.0;
    return out;
}

Vector simulate_state(const SSMSpec& ssm, const PiecewisePath& path) {
    ssm.validate();
    path.check_symbols(ssm.alphabet_size());
    const SSMSpec hom = homogenize(ssm);
    Vector h = hom.h0;
    for (const auto& seg : path.segments()) h = expm(hom.A[seg.symbol] * seg.duration) * h;
    return h.head(ssm.n);
}

bool is_restricted(const SSMSpec& ssm, double tol) {
    ssm.validate();
    for (std::size_t i = 0; i < ssm.A.size(); ++i) {
        for (std::size_t j = i + 1; j < ssm.A.size(); ++j) {
            const double scale = std::max(1.0, ssm.A[i].norm() * ssm.A[j].norm());
            if (bracket(ssm.A[i], ssm.A[j]).norm() > tol * scale) return false;
        }
    }
    return true;
}

SSMSpec lift(const SSMSpec& ssm) {
    ssm.validate();
    if (!ssm.is_homogeneous()) throw ValidationError("lift: system has translations; homogenize first");
    const int n = ssm.n;
    const int m = n * n;
    SSMSpec out;
    out.n = m;
    out.alphabet = ssm.alphabet;
    for (const auto& a : ssm.A) {
        // I_n (x) A is block diagonal with n copies of A.
        Matrix g = Matrix::Zero(m, m);
        for (int blk = 0; blk < n; ++blk) g.block(blk * n, blk * n, n, n) = a;
        out.A.push_back(std::move(g));
        out.b.push_back(Vector::Zero(m));
    }
    const Matrix id = Matrix::Identity(n, n);
    out.h0 = Eigen::Map<const Vector>(id.data(), m);
    return out;
}

Vector project_lifted(const Vector& lifted_state, const Vector& h0) {
    const Eigen::Index n = h0.size();
    if (lifted_state.size() != n * n) throw ValidationError("project_lifted: lifted state must have n^2 entries");
    const Eigen::Map<const Matrix> phi(lifted_state.data(), n, n);
    return phi * h0;
}

std::size_t DeepSSMSpec::external_alphabet_size() const {
    if (layers.empty()) throw ValidationError("deep SSM: no layers");
    return layers.front().alphabet_size();
}

Eigen::Index DeepSSMSpec::coupling_width(std::size_t layer) const {
    Eigen::Index w = 1;
    for (std::size_t j = 0; j < layer; ++j) w += layers[j].n;
    return w;
}

void DeepSSMSpec::validate() const {
    if (layers.empty()) throw ValidationError("deep SSM: no layers");
    for (const auto& l : layers) l.validate();
    if (couplings.size() != layers.size()) {
        throw ValidationError("deep SSM: need one coupling entry per layer (layer 0 entry must be empty)");
    }
    if (!couplings.front().empty()) throw ValidationError("deep SSM: layer 0 takes the external input directly");
    const std::size_t ext = external_alphabet_size();
    for (std::size_t i = 1; i < layers.size(); ++i) {
        if (couplings[i].size() != ext) {
            throw ValidationError("deep SSM: layer " + std::to_string(i) + " needs one coupling map per external symbol");
        }
        for (const auto& v : couplings[i]) {
            if (v.rows() != static_cast<Eigen::Index>(layers[i].alphabet_size()) || v.cols() != coupling_width(i)) {
                throw ValidationError("deep SSM: coupling for layer " + std::to_string(i) + " must be " +
                                      std::to_string(layers[i].alphabet_size()) + "x" + std::to_string(coupling_width(i)));
            }
        }
    }
}

std::vector<Vector> deep_simulate(const DeepSSMSpec& deep, const PiecewisePath& path, std::optional<double> step) {
    deep.validate();
    path.check_symbols(deep.external_alphabet_size());
    double min_duration = path[0].duration;
    for (const auto& s : path.segments()) min_duration = std::min(min_duration, s.duration);
    const double h = step.value_or(min_duration / 64.0);
    if (!(h > 0.0)) throw ValidationError("deep_simulate: step must be positive");
    if (h > min_duration * (1.0 + 1e-12)) throw ValidationError("deep_simulate: step exceeds shortest segment");

    const std::size_t depth = deep.layers.size();
    std::vector<Eigen::Index> offset(depth + 1, 0);
    for (std::size_t i = 0; i < depth; ++i) offset[i + 1] = offset[i] + deep.layers[i].n;

    Vector y(offset[depth]);
    for (std::size_t i = 0; i < depth; ++i) y.segment(offset[i], deep.layers[i].n) = deep.layers[i].h0;

    double t0 = 0.0;
    for (const auto& seg : path.segments()) {
        const int x = seg.symbol;
        auto rhs = [&](double, const Vector& state) {
            Vector dy(state.size());
            const auto& base = deep.layers[0];
            const auto h0 = state.segment(offset[0], base.n);
            dy.segment(offset[0], base.n) = base.A[x] * h0 + base.b[x];
            for (std::size_t i = 1; i < depth; ++i) {
                const auto& layer = deep.layers[i];
                Vector z(deep.coupling_width(i));
                Eigen::Index pos = 0;
                for (std::size_t j = i; j-- > 0;) {
                    z.segment(pos, deep.layers[j].n) = state.segment(offset[j], deep.layers[j].n);
                    pos += deep.layers[j].n;
                }
                z(pos) = 1.0;
                const Vector u = deep.couplings[i][x] * z;
                const auto hi = state.segment(offset[i], layer.n);
                Vector d = Vector::Zero(layer.n);
                for (std::size_t k = 0; k < layer.alphabet_size(); ++k) {
                    if (u(k) != 0.0) d += u(k) * (layer.A[k] * hi + layer.b[k]);
                }
                dy.segment(offset[i], layer.n) = d;
            }
            return dy;
        };
        y = rk4_integrate(std::move(y), t0, seg.duration, substeps_for(seg.duration, h), rhs);
        t0 += seg.duration;
    }

    std::vector<Vector> out;
    for (std::size_t i = 0; i < depth; ++i) out.push_back(y.segment(offset[i], deep.layers[i].n));
    return out;
}

PiecewisePath sample_path(const SSMSpec& ssm, const PathSampler& sampler, std::uint64_t seed, std::uint64_t index) {
    if (!(sampler.horizon > 0.0)) throw ValidationError("sample_path: horizon must be positive");
    if (!(sampler.duration_unit > 0.0)) throw ValidationError("sample_path: duration unit must be positive");
    const std::uint64_t alphabet = ssm.alphabet_size();
    for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
        Rng rng = Rng::for_index(seed ^ splitmix64(attempt * 0x9E3779B97F4A7C15ull), index);
        std::vector<Segment> segs;
        double t = 0.0;
        const double horizon = sampler.horizon;
        while (t < horizon) {
            const int symbol = static_cast<int>(rng.below(alphabet));
            double d = static_cast<double>(1 + rng.below(4)) * sampler.duration_unit;
            if (t + d >= horizon * (1.0 - 1e-12)) d = horizon - t;
            if (d > 0.0) segs.push_back({symbol, d});
            t += d;
        }
        PiecewisePath path(std::move(segs));
        if (!sampler.mass_bound || generator_mass(ssm, path) <= *sampler.mass_bound) return path;
    }
    throw NumericalGuardError("sample_path: mass bound rejected 1000 consecutive draws");
}

namespace {

void check_pair(const SSMSpec& target, const SSMSpec& approximant) {
    target.validate();
    approximant.validate();
    if (target.alphabet_size() != approximant.alphabet_size()) {
        throw ValidationError("simulation error: systems must share the alphabet");
    }
}

}  // namespace

double max_residual(const Matrix& P, const SSMSpec& target, const SSMSpec& approximant,
                    std::span<const PiecewisePath> paths) {
    check_pair(target, approximant);
    if (P.rows() != target.n || P.cols() != approximant.n) throw ValidationError("max_residual: P has wrong shape");
    double worst = 0.0;
    for (const auto& p : paths) {
        worst = std::max(worst, (P * simulate_state(approximant, p) - simulate_state(target, p)).norm());
    }
    return worst;
}

SimErrorReport estimate_sim_error(const SSMSpec& target, const SSMSpec& approximant, const SimErrorOptions& options) {
    check_pair(target, approximant);
    const std::size_t need = static_cast<std::size_t>(std::max(target.n, approximant.n));
    if (options.samples < need) {
        throw ValidationError("estimate_sim_error: need at least " + std::to_string(need) + " samples");
    }
    PathSampler sampler{options.horizon, options.duration_unit, options.mass_bound};

    Matrix endpoints_approx(options.samples, approximant.n);
    Matrix endpoints_target(options.samples, target.n);
    parallel_for(options.samples, options.jobs, [&](std::size_t i) {
        const PiecewisePath path = sample_path(target, sampler, options.seed, i);
        endpoints_approx.row(i) = simulate_state(approximant, path).transpose();
        endpoints_target.row(i) = simulate_state(target, path).transpose();
    });

    Eigen::ColPivHouseholderQR<Matrix> qr(endpoints_approx);
    qr.setThreshold(1e-10);
    if (qr.rank() < approximant.n) {
        throw ValidationError("estimate_sim_error: degenerate least-squares system (approximant endpoints span rank " +
                              std::to_string(qr.rank()) + " < " + std::to_string(approximant.n) + ")");
    }
    const Matrix pt = qr.solve(endpoints_target);

    SimErrorReport report;
    report.P = pt.transpose();
    report.horizon = options.horizon;
    report.samples = options.samples;
    report.seed = options.seed;
    report.duration_unit = options.duration_unit;
    const Matrix residuals = endpoints_approx * pt - endpoints_target;
    report.delta_hat = residuals.rowwise().norm().maxCoeff();
    return report;
}

FourPathReport four_path_probe(const SSMSpec& ssm, const PiecewisePath& prefix1, const PiecewisePath& prefix2,
                               const PiecewisePath& xy) {
    ssm.validate();
    if (xy.size() < 2) throw ValidationError("four_path_probe: suffix needs at least two segments");
    const double t1 = prefix1.total();
    const double t2 = prefix2.total();
    if (std::abs(t1 - t2) > 1e-12 * std::max(1.0, std::max(t1, t2))) {
        throw ValidationError("four_path_probe: prefixes must end at the same time");
    }
    for (const auto* p : {&prefix1, &prefix2, &xy}) p->check_symbols(ssm.alphabet_size());

    const PiecewisePath yx = reverse_path(xy);
    const Vector h1 = simulate_state(ssm, concat(prefix1, xy));
    const Vector h1r = simulate_state(ssm, concat(prefix1, yx));
    const Vector h2 = simulate_state(ssm, concat(prefix2, xy));
    const Vector h2r = simulate_state(ssm, concat(prefix2, yx));
    const Vector mid1 = simulate_state(ssm, prefix1);
    const Vector mid2 = simulate_state(ssm, prefix2);
    const Matrix m = transition_matrix(ssm, xy) - transition_matrix(ssm, yx);

    const Vector lhs = (h1 - h1r) - (h2 - h2r);
    const Vector rhs = m * (mid1 - mid2);

    FourPathReport r;
    r.lhs_norm = lhs.norm();
    r.rhs_norm = rhs.norm();
    r.residual = (lhs - rhs).norm();
    r.m_norm = spectral_norm(m);
    r.prefix_gap = (mid1 - mid2).norm();
    r.first_pair_gap = (h1 - h1r).norm();
    return r;
}

}  // namespace liedepth
