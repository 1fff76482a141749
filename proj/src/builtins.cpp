#include "liedepth/builtins.hpp"

namespace liedepth {

namespace {

Matrix rows(int n, std::initializer_list<double> values) {
    Matrix m(n, n);
    auto it = values.begin();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = *it++;
    return m;
}

Matrix unit(int n, int r, int c) {
    Matrix m = Matrix::Zero(n, n);
    m(r, c) = 1.0;
    return m;
}

}  // namespace

std::vector<std::string> builtin_algebra_names() {
    return {"so3", "sl2", "diagonal", "upper_triangular_2", "upper_triangular_3", "strictly_upper_3", "strictly_upper_4"};
}

io::NamedGenerators builtin_algebra(std::string_view name) {
    if (name == "so3") {
        return {{"Lx", "Ly"}, {rows(3, {0, 0, 0, 0, 0, -1, 0, 1, 0}), rows(3, {0, 0, 1, 0, 0, 0, -1, 0, 0})}};
    }
    if (name == "sl2") return {{"E12", "E21"}, {unit(2, 0, 1), unit(2, 1, 0)}};
    if (name == "diagonal") {
        return {{"d1", "d2"}, {rows(3, {1, 0, 0, 0, 2, 0, 0, 0, 3}), rows(3, {-0.5, 0, 0, 0, 0.25, 0, 0, 0, 1})}};
    }
    if (name == "upper_triangular_2") {
        return {{"a", "b"}, {rows(2, {0.6, 0.8, 0, -0.3}), rows(2, {-0.2, 0.5, 0, 0.7})}};
    }
    if (name == "upper_triangular_3") {
        return {{"a", "b", "c"},
                {rows(3, {0.5, 0.3, -0.2, 0, -0.4, 0.6, 0, 0, 0.1}), rows(3, {-0.3, 0.7, 0.4, 0, 0.2, -0.5, 0, 0, 0.6}),
                 rows(3, {0.2, -0.1, 0.3, 0, 0.5, 0.2, 0, 0, -0.4})}};
    }
    if (name == "strictly_upper_3") return {{"E12", "E23"}, {unit(3, 0, 1), unit(3, 1, 2)}};
    if (name == "strictly_upper_4") return {{"E12", "E23", "E34"}, {unit(4, 0, 1), unit(4, 1, 2), unit(4, 2, 3)}};
    std::string known;
    for (const auto& n : builtin_algebra_names()) known += (known.empty() ? "" : ", ") + n;
    throw ValidationError("unknown builtin algebra '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace liedepth
