#include "liedepth/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace liedepth::io {

std::string format_double(double v) {
    if (!std::isfinite(v)) throw InvariantError("format_double: non-finite value");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

namespace {

void dump_into(std::string& out, const Json& j, int indent, int level) {
    const bool pretty = indent >= 0;
    auto newline = [&](int lvl) {
        if (!pretty) return;
        out.push_back('\n');
        out.append(static_cast<std::size_t>(indent * lvl), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out.push_back('{');
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out.push_back(',');
                first = false;
                newline(level + 1);
                out += Json(it.key()).dump();
                out += pretty ? ": " : ":";
                dump_into(out, it.value(), indent, level + 1);
            }
            newline(level);
            out.push_back('}');
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
            out.push_back('[');
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += (flat && pretty) ? ", " : ",";
                first = false;
                if (!flat) newline(level + 1);
                dump_into(out, e, indent, level + 1);
            }
            if (!flat) newline(level);
            out.push_back(']');
            return;
        }
        case Json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

}  // namespace

std::string dump(const Json& j, int indent) {
    std::string out;
    dump_into(out, j, indent, 0);
    return out;
}

Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

namespace {

double number(const Json& j, const std::string& what) {
    if (!j.is_number()) throw ValidationError(what + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ValidationError(what + ": non-finite number");
    return v;
}

long long integer(const Json& j, const std::string& what) {
    if (j.is_number_integer()) return j.get<long long>();
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (std::floor(v) == v && std::abs(v) < 9e15) return static_cast<long long>(v);
    }
    throw ValidationError(what + ": expected an integer");
}

const Json& field(const Json& j, const char* key, const std::string& what) {
    if (!j.is_object()) throw ValidationError(what + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw ValidationError(what + ": missing field '" + key + "'");
    return *it;
}

StructureClass class_from_string(const std::string& s) {
    for (StructureClass c : {StructureClass::Abelian, StructureClass::Nilpotent, StructureClass::Solvable,
                             StructureClass::NonSolvable}) {
        if (s == to_string(c)) return c;
    }
    throw ValidationError("unknown structure class '" + s + "'");
}

std::vector<std::size_t> sizes_from_json(const Json& j, const std::string& what) {
    if (!j.is_array()) throw ValidationError(what + ": expected an array");
    std::vector<std::size_t> out;
    for (const auto& e : j) {
        const long long v = integer(e, what);
        if (v < 0) throw ValidationError(what + ": negative entry");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

std::vector<int> ints_from_json(const Json& j, const std::string& what) {
    if (!j.is_array()) throw ValidationError(what + ": expected an array");
    std::vector<int> out;
    for (const auto& e : j) out.push_back(static_cast<int>(integer(e, what)));
    return out;
}

Json ints_json(const std::vector<int>& v) {
    Json out = Json::array();
    for (int x : v) out.push_back(x);
    return out;
}

}  // namespace

Matrix matrix_from_json(const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw ValidationError(what + ": expected a nonempty array of rows");
    const std::size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty()) throw ValidationError(what + ": rows must be nonempty arrays");
    const std::size_t cols = j[0].size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) throw ValidationError(what + ": ragged rows");
        for (std::size_t k = 0; k < cols; ++k) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                number(j[i][k], what + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
        }
    }
    return m;
}

Vector vector_from_json(const Json& j, const std::string& what) {
    if (!j.is_array()) throw ValidationError(what + ": expected an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], what);
    return v;
}

Json parse_json(std::string_view text, const std::string& what) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(what + ": " + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write '" + path + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw ValidationError("write failed for '" + path + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw ValidationError("cannot move output into '" + path + "': " + std::strerror(errno));
    }
}

NamedGenerators parse_algebra(std::string_view text) {
    const Json j = parse_json(text, "algebra");
    if (j.is_object() && j.contains("A")) {
        const SSMSpec s = parse_ssm(text);
        return {s.alphabet, s.A};
    }
    NamedGenerators out;
    const Json& gens = field(j, "generators", "algebra");
    if (!gens.is_array() || gens.empty()) throw ValidationError("algebra: 'generators' must be a nonempty array");
    for (std::size_t k = 0; k < gens.size(); ++k) {
        const std::string what = "algebra generator " + std::to_string(k);
        const Json& g = gens[k];
        if (g.is_array()) {
            out.generators.push_back(matrix_from_json(g, what));
            out.names.push_back("g" + std::to_string(k));
            continue;
        }
        out.generators.push_back(matrix_from_json(field(g, "rows", what), what));
        out.names.push_back(g.contains("name") ? g["name"].get<std::string>() : "g" + std::to_string(k));
    }
    const Eigen::Index n = j.contains("n") ? static_cast<Eigen::Index>(integer(j["n"], "algebra n")) : out.generators[0].rows();
    for (std::size_t k = 0; k < out.generators.size(); ++k) {
        if (out.generators[k].rows() != n || out.generators[k].cols() != n) {
            throw ValidationError("algebra: generator '" + out.names[k] + "' is not " + std::to_string(n) + "x" +
                                  std::to_string(n));
        }
    }
    return out;
}

std::string algebra_text(const NamedGenerators& g) {
    Json j;
    j["n"] = g.generators.empty() ? 0 : g.generators[0].rows();
    Json gens = Json::array();
    for (std::size_t k = 0; k < g.generators.size(); ++k) {
        Json e;
        e["name"] = g.names[k];
        e["rows"] = to_json(g.generators[k]);
        gens.push_back(std::move(e));
    }
    j["generators"] = std::move(gens);
    return dump(j) + "\n";
}

SSMSpec parse_ssm(std::string_view text) {
    const Json j = parse_json(text, "ssm");
    SSMSpec s;
    const Json& a = field(j, "A", "ssm");
    if (!a.is_object() || a.empty()) throw ValidationError("ssm: 'A' must map symbol names to matrices");
    if (j.contains("alphabet")) {
        for (const auto& name : j["alphabet"]) {
            if (!name.is_string()) throw ValidationError("ssm: alphabet entries must be strings");
            s.alphabet.push_back(name.get<std::string>());
        }
    } else {
        for (auto it = a.begin(); it != a.end(); ++it) s.alphabet.push_back(it.key());
    }
    for (const auto& name : s.alphabet) {
        if (!a.contains(name)) throw ValidationError("ssm: no generator for symbol '" + name + "'");
        s.A.push_back(matrix_from_json(a[name], "ssm A[" + name + "]"));
    }
    if (a.size() != s.alphabet.size()) throw ValidationError("ssm: 'A' has symbols outside the alphabet");
    s.n = j.contains("n") ? static_cast<int>(integer(j["n"], "ssm n")) : static_cast<int>(s.A[0].rows());
    for (const auto& name : s.alphabet) {
        if (j.contains("b") && j["b"].contains(name)) {
            s.b.push_back(vector_from_json(j["b"][name], "ssm b[" + name + "]"));
        } else {
            s.b.push_back(Vector::Zero(s.n));
        }
    }
    if (j.contains("b")) {
        for (auto it = j["b"].begin(); it != j["b"].end(); ++it) {
            if (!a.contains(it.key())) throw ValidationError("ssm: translation for unknown symbol '" + it.key() + "'");
        }
    }
    s.h0 = j.contains("h0") ? vector_from_json(j["h0"], "ssm h0") : Vector(Vector::Unit(s.n, 0));
    s.validate();
    return s;
}

std::string ssm_text(const SSMSpec& ssm) {
    Json j;
    j["n"] = ssm.n;
    j["alphabet"] = ssm.alphabet;
    Json a = Json::object();
    Json b = Json::object();
    for (std::size_t k = 0; k < ssm.A.size(); ++k) {
        a[ssm.alphabet[k]] = to_json(ssm.A[k]);
        b[ssm.alphabet[k]] = to_json(ssm.b[k]);
    }
    j["A"] = std::move(a);
    j["b"] = std::move(b);
    j["h0"] = to_json(ssm.h0);
    return dump(j) + "\n";
}

PiecewisePath parse_path(std::string_view text, const std::vector<std::string>& alphabet) {
    const Json j = parse_json(text, "path");
    const Json& segs = field(j, "segments", "path");
    if (!segs.is_array() || segs.empty()) throw ValidationError("path: 'segments' must be a nonempty array");
    std::vector<Segment> out;
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const std::string what = "path segment " + std::to_string(k);
        const Json& sym = field(segs[k], "symbol", what);
        int index = -1;
        if (sym.is_string()) {
            const auto name = sym.get<std::string>();
            for (std::size_t a = 0; a < alphabet.size(); ++a) {
                if (alphabet[a] == name) index = static_cast<int>(a);
            }
            if (index < 0) throw ValidationError(what + ": unknown symbol '" + name + "'");
        } else {
            index = static_cast<int>(integer(sym, what));
        }
        out.push_back({index, number(field(segs[k], "duration", what), what)});
    }
    PiecewisePath p(std::move(out));
    if (!alphabet.empty()) p.check_symbols(alphabet.size());
    return p;
}

std::string path_text(const PiecewisePath& path, const std::vector<std::string>& alphabet) {
    Json segs = Json::array();
    for (const auto& s : path.segments()) {
        Json e;
        if (static_cast<std::size_t>(s.symbol) < alphabet.size()) {
            e["symbol"] = alphabet[s.symbol];
        } else {
            e["symbol"] = s.symbol;
        }
        e["duration"] = s.duration;
        segs.push_back(std::move(e));
    }
    Json j;
    j["segments"] = std::move(segs);
    return dump(j) + "\n";
}

Json report_json(const AlgebraReport& r) {
    Json j;
    j["dim"] = r.dim;
    j["class"] = to_string(r.class_label);
    j["derived_length"] = r.derived_length ? Json(*r.derived_length) : Json(nullptr);
    j["nilpotency_class"] = r.nilpotency_class ? Json(*r.nilpotency_class) : Json(nullptr);
    j["derived_dims"] = r.derived_dims;
    j["lower_central_dims"] = r.lower_central_dims;
    return j;
}

AlgebraReport report_from_json(const Json& j) {
    AlgebraReport r;
    r.dim = static_cast<std::size_t>(integer(field(j, "dim", "report"), "report dim"));
    r.class_label = class_from_string(field(j, "class", "report").get<std::string>());
    const Json& dl = field(j, "derived_length", "report");
    if (!dl.is_null()) r.derived_length = static_cast<int>(integer(dl, "report derived_length"));
    const Json& nc = field(j, "nilpotency_class", "report");
    if (!nc.is_null()) r.nilpotency_class = static_cast<int>(integer(nc, "report nilpotency_class"));
    r.derived_dims = sizes_from_json(field(j, "derived_dims", "report"), "report derived_dims");
    r.lower_central_dims = sizes_from_json(field(j, "lower_central_dims", "report"), "report lower_central_dims");
    return r;
}

Json sim_error_json(const SimErrorReport& r) {
    Json j;
    j["delta_hat"] = r.delta_hat;
    j["horizon"] = r.horizon;
    j["samples"] = r.samples;
    j["seed"] = r.seed;
    j["duration_unit"] = r.duration_unit;
    j["P"] = to_json(r.P);
    return j;
}

SimErrorReport sim_error_from_json(const Json& j) {
    SimErrorReport r;
    r.delta_hat = number(field(j, "delta_hat", "simerror"), "simerror delta_hat");
    r.horizon = number(field(j, "horizon", "simerror"), "simerror horizon");
    r.samples = static_cast<std::size_t>(integer(field(j, "samples", "simerror"), "simerror samples"));
    const Json& seed = field(j, "seed", "simerror");
    if (!seed.is_number_unsigned() && !seed.is_number_integer()) throw ValidationError("simerror seed: expected an integer");
    r.seed = seed.get<std::uint64_t>();
    r.duration_unit = number(field(j, "duration_unit", "simerror"), "simerror duration_unit");
    r.P = matrix_from_json(field(j, "P", "simerror"), "simerror P");
    return r;
}

Json flow_json(const FlowResult& r) {
    Json j;
    j["order"] = r.order;
    j["generator_mass"] = r.generator_mass;
    j["commutator_mass"] = spectral_norm(r.omega2);
    j["phi"] = to_json(r.phi);
    j["omega1"] = to_json(r.omega1);
    j["omega2"] = to_json(r.omega2);
    j["omega3"] = to_json(r.omega3);
    return j;
}

Json four_path_json(const FourPathReport& r) {
    Json j;
    j["lhs_norm"] = r.lhs_norm;
    j["rhs_norm"] = r.rhs_norm;
    j["residual"] = r.residual;
    j["m_norm"] = r.m_norm;
    j["prefix_gap"] = r.prefix_gap;
    j["first_pair_gap"] = r.first_pair_gap;
    return j;
}

namespace {

Json family_json(const std::vector<std::string>& names, const std::vector<Matrix>& family) {
    Json out = Json::object();
    for (std::size_t k = 0; k < family.size(); ++k) out[names[k]] = to_json(family[k]);
    return out;
}

std::vector<Matrix> family_from_json(const Json& j, const std::vector<std::string>& names, const std::string& what) {
    std::vector<Matrix> out;
    for (const auto& name : names) out.push_back(matrix_from_json(field(j, name.c_str(), what), what + "[" + name + "]"));
    return out;
}

}  // namespace

Json cascade_json(const CascadeDecomposition& d) {
    Json j;
    j["depth"] = d.depth;
    j["derived_length"] = d.derived_length;
    j["n"] = d.source.n;
    j["alphabet"] = d.source.alphabet;
    j["source"] = family_json(d.source.alphabet, d.source.A);
    j["h0"] = to_json(d.source.h0);
    Json layers = Json::array();
    for (const auto& layer : d.layers) {
        Json l;
        l["role"] = layer.base ? "base" : "ideal";
        l["column"] = layer.column;
        Json basis = Json::array();
        for (const auto& e : layer.ideal_basis) {
            Eigen::Index r = 0, c = 0;
            e.cwiseAbs().maxCoeff(&r, &c);
            basis.push_back(Json::array({r, c}));
        }
        l["ideal_basis"] = std::move(basis);
        l["generators"] = family_json(d.source.alphabet, layer.generators);
        l["quotient_generators"] = family_json(d.source.alphabet, layer.quotient_generators);
        l["section_columns"] = ints_json(layer.section_columns);
        layers.push_back(std::move(l));
    }
    j["layers"] = std::move(layers);
    return j;
}

CascadeDecomposition cascade_from_json(const Json& j) {
    CascadeDecomposition d;
    d.depth = static_cast<int>(integer(field(j, "depth", "cascade"), "cascade depth"));
    d.derived_length = static_cast<int>(integer(field(j, "derived_length", "cascade"), "cascade derived_length"));
    d.source.n = static_cast<int>(integer(field(j, "n", "cascade"), "cascade n"));
    for (const auto& name : field(j, "alphabet", "cascade")) d.source.alphabet.push_back(name.get<std::string>());
    d.source.A = family_from_json(field(j, "source", "cascade"), d.source.alphabet, "cascade source");
    d.source.b.assign(d.source.A.size(), Vector::Zero(d.source.n));
    d.source.h0 = vector_from_json(field(j, "h0", "cascade"), "cascade h0");
    d.source.validate();
    for (const auto& l : field(j, "layers", "cascade")) {
        CascadeLayer layer;
        const std::string role = field(l, "role", "cascade layer").get<std::string>();
        if (role != "base" && role != "ideal") throw ValidationError("cascade layer: unknown role '" + role + "'");
        layer.base = role == "base";
        layer.column = static_cast<int>(integer(field(l, "column", "cascade layer"), "cascade layer column"));
        for (const auto& rc : field(l, "ideal_basis", "cascade layer")) {
            const auto idx = ints_from_json(rc, "cascade ideal basis");
            if (idx.size() != 2 || idx[0] < 0 || idx[1] < 0 || idx[0] >= d.source.n || idx[1] >= d.source.n) {
                throw ValidationError("cascade ideal basis: expected [row, col] inside the matrix");
            }
            Matrix e = Matrix::Zero(d.source.n, d.source.n);
            e(idx[0], idx[1]) = 1.0;
            layer.ideal_basis.push_back(std::move(e));
        }
        layer.generators = family_from_json(field(l, "generators", "cascade layer"), d.source.alphabet, "cascade layer generators");
        layer.quotient_generators = family_from_json(field(l, "quotient_generators", "cascade layer"), d.source.alphabet,
                                                     "cascade layer quotient_generators");
        layer.section_columns = ints_from_json(field(l, "section_columns", "cascade layer"), "cascade section_columns");
        d.layers.push_back(std::move(layer));
    }
    if (d.layers.empty() || !d.layers[0].base || static_cast<int>(d.layers.size()) != d.depth) {
        throw ValidationError("cascade: layer list must start with the base and match depth");
    }
    return d;
}

std::string scaling_csv(const ScalingResult& r) {
    std::string out = "epsilon,order,error,replicate,depth_equiv\n";
    for (const auto& row : r.rows) {
        out += format_double(row.epsilon) + "," + std::to_string(row.order) + "," + format_double(row.error) + "," +
               std::to_string(row.replicate) + "," + std::to_string(row.depth_equiv) + "\n";
    }
    out += "# fit,order,slope,intercept,expected\n";
    for (const auto& f : r.fits) {
        out += "# fit," + std::to_string(f.order) + "," + format_double(f.slope) + "," + format_double(f.intercept) + "," +
               format_double(f.expected) + "\n";
    }
    return out;
}

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string> lines(std::string_view text) {
    std::vector<std::string> out;
    for (auto& l : split(text, '\n')) {
        if (!l.empty() && l.back() == '\r') l.pop_back();
        if (!l.empty()) out.push_back(std::move(l));
    }
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) throw ValidationError(what + ": bad number '" + s + "'");
    return v;
}

long long to_int(const std::string& s, const std::string& what) {
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) throw ValidationError(what + ": bad integer '" + s + "'");
    return v;
}

}  // namespace

ScalingResult scaling_from_csv(std::string_view text) {
    ScalingResult r;
    const auto ls = lines(text);
    if (ls.empty() || ls[0] != "epsilon,order,error,replicate,depth_equiv") throw ValidationError("scaling csv: missing header");
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto cells = split(ls[i], ',');
        if (ls[i].rfind("# fit,order", 0) == 0) continue;
        if (ls[i].rfind("# fit,", 0) == 0) {
            if (cells.size() != 5) throw ValidationError("scaling csv: fit row needs 5 cells");
            ScalingFit f;
            f.order = static_cast<int>(to_int(cells[1], "scaling fit order"));
            f.slope = to_double(cells[2], "scaling fit slope");
            f.intercept = to_double(cells[3], "scaling fit intercept");
            f.expected = to_double(cells[4], "scaling fit expected");
            r.fits.push_back(f);
            continue;
        }
        if (cells.size() != 5) throw ValidationError("scaling csv: line " + std::to_string(i + 1) + " needs 5 cells");
        ScalingRow row;
        row.epsilon = to_double(cells[0], "scaling epsilon");
        row.order = static_cast<int>(to_int(cells[1], "scaling order"));
        row.error = to_double(cells[2], "scaling error");
        row.replicate = static_cast<int>(to_int(cells[3], "scaling replicate"));
        row.depth_equiv = static_cast<int>(to_int(cells[4], "scaling depth_equiv"));
        r.rows.push_back(row);
    }
    return r;
}

std::string word_jsonl(const std::vector<WordRecord>& records) {
    std::string out;
    for (const auto& rec : records) {
        Json j;
        j["tokens"] = ints_json(rec.tokens);
        j["labels"] = ints_json(rec.labels);
        out += dump(j, -1);
        out.push_back('\n');
    }
    return out;
}

std::vector<WordRecord> words_from_jsonl(std::string_view text) {
    std::vector<WordRecord> out;
    std::size_t lineno = 0;
    for (const auto& l : lines(text)) {
        const std::string what = "word record " + std::to_string(++lineno);
        const Json j = parse_json(l, what);
        WordRecord rec;
        rec.tokens = ints_from_json(field(j, "tokens", what), what);
        rec.labels = ints_from_json(field(j, "labels", what), what);
        out.push_back(std::move(rec));
    }
    return out;
}

std::string rotation_jsonl(const std::vector<RotationRecord>& records) {
    std::string out;
    for (const auto& rec : records) {
        Json j;
        j["tokens"] = ints_json(rec.tokens);
        j["v0"] = Json::array({rec.v0.x(), rec.v0.y(), rec.v0.z()});
        Json targets = Json::array();
        for (const auto& t : rec.targets) targets.push_back(Json::array({t.x(), t.y(), t.z()}));
        j["targets"] = std::move(targets);
        out += dump(j, -1);
        out.push_back('\n');
    }
    return out;
}

std::vector<RotationRecord> rotations_from_jsonl(std::string_view text) {
    std::vector<RotationRecord> out;
    std::size_t lineno = 0;
    auto vec3 = [](const Json& j, const std::string& what) {
        const Vector v = vector_from_json(j, what);
        if (v.size() != 3) throw ValidationError(what + ": expected 3 components");
        return Vec3(v(0), v(1), v(2));
    };
    for (const auto& l : lines(text)) {
        const std::string what = "rotation record " + std::to_string(++lineno);
        const Json j = parse_json(l, what);
        RotationRecord rec;
        rec.tokens = ints_from_json(field(j, "tokens", what), what);
        rec.v0 = vec3(field(j, "v0", what), what + " v0");
        for (const auto& t : field(j, "targets", what)) rec.targets.push_back(vec3(t, what + " target"));
        out.push_back(std::move(rec));
    }
    return out;
}

std::string lyndon_csv(const std::vector<LyndonTableRow>& rows) {
    std::string out = "n,m,count,cumulative\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n) + "," + std::to_string(r.m) + "," + to_decimal(r.count) + "," + to_decimal(r.cumulative) + "\n";
    }
    return out;
}

WideCount parse_wide(std::string_view s) {
    if (s.empty()) throw ValidationError("parse_wide: empty string");
    WideCount v = 0;
    const WideCount max = ~WideCount{0};
    for (char ch : s) {
        if (ch < '0' || ch > '9') throw ValidationError("parse_wide: bad digit in '" + std::string(s) + "'");
        const auto d = static_cast<WideCount>(ch - '0');
        if (v > (max - d) / 10) throw ValidationError("parse_wide: value exceeds 128 bits");
        v = v * 10 + d;
    }
    return v;
}

std::vector<LyndonTableRow> lyndon_from_csv(std::string_view text) {
    const auto ls = lines(text);
    if (ls.empty() || ls[0] != "n,m,count,cumulative") throw ValidationError("lyndon csv: missing header");
    std::vector<LyndonTableRow> out;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto cells = split(ls[i], ',');
        if (cells.size() != 4) throw ValidationError("lyndon csv: line " + std::to_string(i + 1) + " needs 4 cells");
        out.push_back({static_cast<int>(to_int(cells[0], "lyndon n")), static_cast<int>(to_int(cells[1], "lyndon m")),
                       parse_wide(cells[2]), parse_wide(cells[3])});
    }
    return out;
}

}  // namespace liedepth::io
