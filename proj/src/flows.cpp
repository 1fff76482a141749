#include "liedepth/flows.hpp"

#include "liedepth/lie_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace liedepth {

PiecewisePath::PiecewisePath(std::vector<Segment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw ValidationError("PiecewisePath: at least one segment required");
    for (const auto& s : segments_) {
        if (s.symbol < 0) throw ValidationError("PiecewisePath: negative symbol index");
        if (!(s.duration > 0.0) || !std::isfinite(s.duration)) {
            throw ValidationError("PiecewisePath: durations must be finite and positive");
        }
    }
}

double PiecewisePath::total() const noexcept {
    double t = 0.0;
    for (const auto& s : segments_) t += s.duration;
    return t;
}

void PiecewisePath::check_symbols(std::size_t alphabet_size) const {
    for (const auto& s : segments_) {
        if (static_cast<std::size_t>(s.symbol) >= alphabet_size) {
            throw ValidationError("path symbol " + std::to_string(s.symbol) + " outside alphabet of size " +
                                  std::to_string(alphabet_size));
        }
    }
}

PiecewisePath reverse_path(const PiecewisePath& path) {
    std::vector<Segment> segs(path.segments().rbegin(), path.segments().rend());
    return PiecewisePath(std::move(segs));
}

PiecewisePath concat(const PiecewisePath& first, const PiecewisePath& second) {
    std::vector<Segment> segs = first.segments();
    segs.insert(segs.end(), second.segments().begin(), second.segments().end());
    return PiecewisePath(std::move(segs));
}

PiecewisePath permute_segments(const PiecewisePath& path, std::span<const std::size_t> order) {
    if (order.size() != path.size()) throw ValidationError("permute_segments: order length mismatch");
    std::vector<bool> seen(order.size(), false);
    std::vector<Segment> segs;
    segs.reserve(order.size());
    for (std::size_t k : order) {
        if (k >= order.size() || seen[k]) throw ValidationError("permute_segments: not a permutation");
        seen[k] = true;
        segs.push_back(path[k]);
    }
    return PiecewisePath(std::move(segs));
}

Matrix expm(const Matrix& m) {
    if (m.rows() != m.cols()) throw ValidationError("expm: matrix must be square");
    if (!all_finite(m)) throw ValidationError("expm: non-finite entries");
    const Eigen::Index n = m.rows();
    if (n == 0) return m;

    static constexpr std::array<double, 14> b{64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                              1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                              670442572800.0,      33522128640.0,       1323241920.0,
                                              40840800.0,          960960.0,            16380.0,
                                              182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
    int s = 0;
    if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    const Matrix a = (s > 0) ? Matrix(m / std::ldexp(1.0, s)) : m;

    const Matrix id = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    Matrix r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < s; ++k) r = r * r;
    if (!all_finite(r)) throw NumericalGuardError("expm: non-finite result");
    return r;
}

namespace {

// Denman-Beavers iteration for the principal square root.
Matrix sqrtm_db(const Matrix& m) {
    Matrix y = m;
    Matrix z = Matrix::Identity(m.rows(), m.cols());
    for (int it = 0; it < 100; ++it) {
        const Matrix y_inv = y.partialPivLu().inverse();
        const Matrix z_inv = z.partialPivLu().inverse();
        Matrix y_next = 0.5 * (y + z_inv);
        z = 0.5 * (z + y_inv);
        const double change = (y_next - y).norm();
        y = std::move(y_next);
        if (change <= 1e-15 * y.norm()) break;
    }
    return y;
}

}  // namespace

Matrix logm_principal(const Matrix& m) {
    if (m.rows() != m.cols()) throw ValidationError("logm_principal: matrix must be square");
    if (!all_finite(m)) throw ValidationError("logm_principal: non-finite entries");
    const Eigen::Index n = m.rows();
    const Matrix id = Matrix::Identity(n, n);
    const double dist = spectral_norm(m - id);
    if (!(dist < 1.0)) {
        throw NumericalGuardError("logm_principal: |m - I| = " + std::to_string(dist) +
                                  " >= 1; shorten the horizon");
    }

    Matrix x = m;
    int squarings = 0;
    while ((x - id).norm() > 0.25) {
        x = sqrtm_db(x);
        if (++squarings > 60) throw NumericalGuardError("logm_principal: square roots failed to approach identity");
    }

    // log X = 2 atanh(Z), Z = (X - I)(X + I)^{-1}.
    const Matrix z = (x + id).transpose().partialPivLu().solve((x - id).transpose()).transpose();
    const Matrix z2 = z * z;
    Matrix power = z;
    Matrix sum = z;
    for (int k = 1; k < 60; ++k) {
        power = power * z2;
        const Matrix term = power / static_cast<double>(2 * k + 1);
        sum += term;
        if (term.norm() <= 1e-18 * std::max(sum.norm(), 1e-300)) break;
    }
    return std::ldexp(2.0, squarings) * sum;
}

namespace {

void check_family(std::span<const Matrix> generators, const PiecewisePath& path, const char* who) {
    if (generators.empty()) throw ValidationError(std::string(who) + ": empty generator family");
    const Eigen::Index n = generators.front().rows();
    for (const auto& g : generators) {
        if (g.rows() != n || g.cols() != n) throw ValidationError(std::string(who) + ": generators must share one square shape");
    }
    if (path.empty()) throw ValidationError(std::string(who) + ": empty path");
    path.check_symbols(generators.size());
}

}  // namespace

Matrix transition_matrix(std::span<const Matrix> generators, const PiecewisePath& path) {
    check_family(generators, path, "transition_matrix");
    const Eigen::Index n = generators.front().rows();
    Matrix phi = Matrix::Identity(n, n);
    for (const auto& seg : path.segments()) phi = expm(generators[seg.symbol] * seg.duration) * phi;
    return phi;
}

double generator_mass(std::span<const Matrix> generators, const PiecewisePath& path) {
    check_family(generators, path, "generator_mass");
    std::vector<double> norms(generators.size());
    for (std::size_t i = 0; i < generators.size(); ++i) norms[i] = spectral_norm(generators[i]);
    double mass = 0.0;
    for (const auto& seg : path.segments()) mass += norms[seg.symbol] * seg.duration;
    return mass;
}

Matrix magnus_omega2(std::span<const Matrix> generators, const PiecewisePath& path) {
    check_family(generators, path, "magnus_omega2");
    const Eigen::Index n = generators.front().rows();
    // Omega_2 = 1/2 sum_{i>j} [A_i, A_j] d_i d_j = 1/2 sum_i [A_i d_i, S_i],
    // S_i = sum_{j<i} A_j d_j. Same-segment pairs commute and drop out.
    Matrix prefix = Matrix::Zero(n, n);
    Matrix acc = Matrix::Zero(n, n);
    for (const auto& seg : path.segments()) {
        const Matrix step = generators[seg.symbol] * seg.duration;
        acc += bracket(step, prefix);
        prefix += step;
    }
    return 0.5 * acc;
}

Matrix magnus_omega3(std::span<const Matrix> generators, const PiecewisePath& path) {
    check_family(generators, path, "magnus_omega3");
    const Eigen::Index n = generators.front().rows();
    const std::size_t k = path.size();

    // Integrand [A1,[A2,A3]] + [A3,[A2,A1]] over t1 > t2 > t3. With segment
    // indices i >= j >= l for (t1, t2, t3) the simplex cell volumes are
    //   i > j > l : d_i d_j d_l
    //   i = j > l : d_i^2 / 2 * d_l
    //   i > j = l : d_i * d_j^2 / 2
    // and i = j = l contributes nothing. Prefix sums S_j (segments before j)
    // and suffix sums U_j (segments after j) collapse the triple sum.
    std::vector<Matrix> prefix(k, Matrix::Zero(n, n));
    std::vector<Matrix> suffix(k, Matrix::Zero(n, n));
    for (std::size_t j = 1; j < k; ++j) {
        prefix[j] = prefix[j - 1] + generators[path[j - 1].symbol] * path[j - 1].duration;
    }
    for (std::size_t j = k - 1; j-- > 0;) {
        suffix[j] = suffix[j + 1] + generators[path[j + 1].symbol] * path[j + 1].duration;
    }

    Matrix acc = Matrix::Zero(n, n);
    for (std::size_t j = 0; j < k; ++j) {
        const Matrix& a = generators[path[j].symbol];
        const double d = path[j].duration;
        const Matrix& s = prefix[j];
        const Matrix& u = suffix[j];
        acc += d * (bracket(u, bracket(a, s)) + bracket(s, bracket(a, u)));
        acc += 0.5 * d * d * (bracket(a, bracket(a, s)) + bracket(a, bracket(a, u)));
    }
    return acc / 6.0;
}

FlowResult magnus_terms(std::span<const Matrix> generators, const PiecewisePath& path, int order) {
    if (order < 1 || order > 3) throw ValidationError("magnus_terms: order must be 1, 2 or 3");
    check_family(generators, path, "magnus_terms");
    const Eigen::Index n = generators.front().rows();

    FlowResult out;
    out.order = order;
    out.phi = transition_matrix(generators, path);
    out.omega1 = Matrix::Zero(n, n);
    for (const auto& seg : path.segments()) out.omega1 += generators[seg.symbol] * seg.duration;
    out.omega2 = order >= 2 ? magnus_omega2(generators, path) : Matrix::Zero(n, n);
    out.omega3 = order >= 3 ? magnus_omega3(generators, path) : Matrix::Zero(n, n);
    out.generator_mass = generator_mass(generators, path);
    return out;
}

double commutator_mass(std::span<const Matrix> generators, const PiecewisePath& path) {
    return spectral_norm(magnus_omega2(generators, path));
}

Matrix truncated_flow(std::span<const Matrix> generators, const PiecewisePath& path, int order) {
    if (order < 1 || order > 3) throw ValidationError("truncated_flow: order must be 1, 2 or 3");
    const double mass = generator_mass(generators, path);
    if (!(mass < 1.0)) {
        throw NumericalGuardError("truncated_flow: generator mass " + std::to_string(mass) +
                                  " >= 1; split the path into shorter windows");
    }
    const Eigen::Index n = generators.front().rows();
    Matrix omega = Matrix::Zero(n, n);
    for (const auto& seg : path.segments()) omega += generators[seg.symbol] * seg.duration;
    if (order >= 2) omega += magnus_omega2(generators, path);
    if (order >= 3) omega += magnus_omega3(generators, path);
    return expm(omega);
}

}  // namespace liedepth
