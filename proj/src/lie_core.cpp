#include "liedepth/lie_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace liedepth {

Matrix bracket(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw ValidationError("bracket: dimension mismatch (" + std::to_string(a.rows()) + "x" +
                              std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                              std::to_string(b.cols()) + ")");
    }
    return a * b - b * a;
}

double trace_inner(const Matrix& a, const Matrix& b) {
    return (a.array() * b.array()).sum();
}

MatrixBasis::MatrixBasis(int n, double tol) : n_(n), tol_(tol) {
    if (n <= 0) throw ValidationError("MatrixBasis: dimension must be positive");
    if (!(tol >= 0.0) || !std::isfinite(tol)) throw ValidationError("MatrixBasis: tolerance must be finite and >= 0");
}

void MatrixBasis::check_shape(const Matrix& m) const {
    if (m.rows() != n_ || m.cols() != n_) {
        throw ValidationError("MatrixBasis: expected " + std::to_string(n_) + "x" + std::to_string(n_) + " matrix, got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (!all_finite(m)) throw ValidationError("MatrixBasis: non-finite entries");
}

Matrix MatrixBasis::residual(const Matrix& m) const {
    check_shape(m);
    Matrix r = m;
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& e : elements_) r -= trace_inner(e, r) * e;
    }
    return r;
}

bool MatrixBasis::contains(const Matrix& m) const {
    return residual(m).norm() <= tol_ * std::max(1.0, m.norm());
}

bool MatrixBasis::append(const Matrix& m) {
    Matrix r = residual(m);
    const double rn = r.norm();
    if (rn <= tol_ * std::max(1.0, m.norm())) return false;
    if (elements_.size() >= static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_)) {
        throw InvariantError("MatrixBasis: span exceeds ambient dimension n^2");
    }
    elements_.push_back(r / rn);
    return true;
}

std::pair<MatrixBasis, bool> span_append(MatrixBasis basis, const Matrix& m) {
    const bool appended = basis.append(m);
    return {std::move(basis), appended};
}

MatrixBasis lie_closure(std::span<const Matrix> generators, std::optional<std::size_t> cap, double tol) {
    if (generators.empty()) throw ValidationError("lie_closure: empty generator list");
    const int n = static_cast<int>(generators.front().rows());
    const std::size_t limit = cap.value_or(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    MatrixBasis basis(n, tol);

    auto push = [&](const Matrix& m) {
        if (basis.append(m) && basis.size() > limit) {
            throw ValidationError("lie_closure: dimension exceeds cap " + std::to_string(limit));
        }
    };
    for (const auto& g : generators) {
        if (g.rows() != n || g.cols() != n) throw ValidationError("lie_closure: generators must share one square shape");
        if (!all_finite(g)) throw ValidationError("lie_closure: non-finite generator entries");
        // Generators count by direction, so tiny ones are not lost to the threshold.
        // Brackets of orthonormal elements already live on the unit scale and are
        // pushed as is; normalizing them would promote roundoff to a new direction.
        const double nm = g.norm();
        if (nm > 0.0) push(g / nm);
    }

    std::size_t frontier = 0;
    while (frontier < basis.size()) {
        const std::size_t end = basis.size();
        for (std::size_t j = frontier; j < end; ++j) {
            for (std::size_t i = 0; i < j; ++i) push(bracket(basis[i], basis[j]));
        }
        frontier = end;
    }
    return basis;
}

double closure_residual(const MatrixBasis& basis) {
    double worst = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = i + 1; j < basis.size(); ++j) {
            worst = std::max(worst, basis.residual(bracket(basis[i], basis[j])).norm());
        }
    }
    return worst;
}

MatrixBasis bracket_span(const MatrixBasis& a, const MatrixBasis& b) {
    if (a.ambient_dim() != b.ambient_dim()) throw ValidationError("bracket_span: ambient dimension mismatch");
    MatrixBasis out(a.ambient_dim(), a.tol());
    for (const auto& x : a.elements()) {
        for (const auto& y : b.elements()) out.append(bracket(x, y));
    }
    return out;
}

namespace {

void require_closed(const MatrixBasis& basis, const char* who) {
    const double r = closure_residual(basis);
    if (r > std::max(basis.tol(), 1e-12) * 10.0) {
        throw ValidationError(std::string(who) + ": basis is not bracket-closed (residual " + std::to_string(r) + ")");
    }
}

template <class Next>
std::vector<MatrixBasis> run_series(const MatrixBasis& basis, Next next) {
    std::vector<MatrixBasis> series{basis};
    while (series.back().size() > 0) {
        MatrixBasis term = next(series.back());
        const bool stalled = term.size() == series.back().size();
        series.push_back(std::move(term));
        if (stalled) break;
    }
    return series;
}

std::optional<int> first_zero(const std::vector<MatrixBasis>& series) {
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].empty()) return static_cast<int>(i);
    }
    return std::nullopt;
}

}  // namespace

std::vector<MatrixBasis> derived_series(const MatrixBasis& basis) {
    require_closed(basis, "derived_series");
    return run_series(basis, [](const MatrixBasis& prev) { return bracket_span(prev, prev); });
}

std::vector<MatrixBasis> lower_central_series(const MatrixBasis& basis) {
    require_closed(basis, "lower_central_series");
    return run_series(basis, [&basis](const MatrixBasis& prev) { return bracket_span(basis, prev); });
}

AlgebraReport classify(const MatrixBasis& basis) {
    const auto derived = derived_series(basis);
    const auto lower = lower_central_series(basis);

    AlgebraReport report;
    report.dim = basis.size();
    for (const auto& t : derived) report.derived_dims.push_back(t.size());
    for (const auto& t : lower) report.lower_central_dims.push_back(t.size());
    report.derived_length = first_zero(derived);
    report.nilpotency_class = first_zero(lower);

    // The zero algebra is reported as abelian of class and length 1.
    if (report.dim == 0) {
        report.derived_length = 1;
        report.nilpotency_class = 1;
    }

    if (report.dim == 0 || report.derived_dims.at(1) == 0) {
        report.class_label = StructureClass::Abelian;
    } else if (report.nilpotency_class) {
        report.class_label = StructureClass::Nilpotent;
    } else if (report.derived_length) {
        report.class_label = StructureClass::Solvable;
    } else {
        report.class_label = StructureClass::NonSolvable;
    }
    return report;
}

}  // namespace liedepth
