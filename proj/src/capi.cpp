#include "liedepth/liedepth.h"

#include "liedepth/builtins.hpp"
#include "liedepth/cascade.hpp"
#include "liedepth/groups.hpp"
#include "liedepth/io.hpp"
#include "liedepth/lie_core.hpp"
#include "liedepth/lyndon.hpp"
#include "liedepth/ssm.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

using namespace liedepth;

struct ld_algebra {
    io::NamedGenerators gens;
};
struct ld_ssm {
    SSMSpec spec;
};
struct ld_path {
    PiecewisePath path;
};
struct ld_group {
    FiniteGroup group;
};
struct ld_cascade {
    CascadeDecomposition decomp;
};

namespace {

thread_local std::string g_last_error;
std::atomic<double> g_tolerance{kDefaultSpanTol};

template <class F>
ld_status guarded(F&& fn) {
    try {
        fn();
        g_last_error.clear();
        return LD_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return static_cast<ld_status>(static_cast<int>(e.kind()));
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return LD_ERR_INVARIANT;
    } catch (const std::exception& e) {
        g_last_error = std::string("internal error: ") + e.what();
        return LD_ERR_INVARIANT;
    } catch (...) {
        g_last_error = "internal error";
        return LD_ERR_INVARIANT;
    }
}

void need(const void* p, const char* what) {
    if (!p) throw ValidationError(std::string(what) + " must not be null");
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void emit(char** out, const std::string& s) {
    need(out, "output pointer");
    *out = dup_string(s);
}

void emit_json(char** out, const io::Json& j) { emit(out, io::dump(j) + "\n"); }

template <class T, class... Args>
void make_handle(T** out, Args&&... args) {
    need(out, "output handle");
    *out = new T{std::forward<Args>(args)...};
}

void check_generators(const io::NamedGenerators& g) {
    if (g.generators.empty()) throw ValidationError("algebra has no generators");
    const Eigen::Index n = g.generators[0].rows();
    for (const auto& m : g.generators) {
        if (m.rows() != n || m.cols() != n) throw ValidationError("generators must share one square shape");
        if (!m.allFinite()) throw ValidationError("generators contain non-finite entries");
    }
}

void copy_out(const Matrix& m, double* dst, std::size_t capacity) {
    need(dst, "output buffer");
    const auto size = static_cast<std::size_t>(m.size());
    if (capacity < size) throw ValidationError("output buffer holds " + std::to_string(capacity) + " values, need " + std::to_string(size));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) dst[i * m.cols() + j] = m(i, j);
}

}  // namespace

extern "C" {

const char* ld_version(void) { return kVersion; }
const char* ld_last_error(void) { return g_last_error.c_str(); }
void ld_free_string(char* s) { std::free(s); }

ld_status ld_set_default_tolerance(double tol) {
    return guarded([&] {
        if (!(tol > 0.0) || !(tol < 1.0)) throw ValidationError("tolerance must lie in (0, 1)");
        g_tolerance.store(tol);
    });
}

double ld_default_tolerance(void) { return g_tolerance.load(); }

ld_status ld_algebra_from_file(const char* path, ld_algebra** out) {
    return guarded([&] {
        need(path, "path");
        auto g = io::parse_algebra(io::read_file(path));
        check_generators(g);
        make_handle(out, std::move(g));
    });
}

ld_status ld_algebra_from_text(const char* json, ld_algebra** out) {
    return guarded([&] {
        need(json, "json");
        auto g = io::parse_algebra(json);
        check_generators(g);
        make_handle(out, std::move(g));
    });
}

ld_status ld_algebra_from_generators(int n, size_t count, const double* data, ld_algebra** out) {
    return guarded([&] {
        if (n <= 0) throw ValidationError("matrix size must be positive");
        if (count == 0) throw ValidationError("need at least one generator");
        need(data, "data");
        io::NamedGenerators g;
        for (size_t k = 0; k < count; ++k) {
            Matrix m(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) m(i, j) = data[k * n * n + i * n + j];
            g.generators.push_back(std::move(m));
            g.names.push_back("g" + std::to_string(k));
        }
        check_generators(g);
        make_handle(out, std::move(g));
    });
}

ld_status ld_algebra_builtin(const char* name, ld_algebra** out) {
    return guarded([&] {
        need(name, "name");
        make_handle(out, builtin_algebra(name));
    });
}

void ld_algebra_free(ld_algebra* a) { delete a; }

ld_status ld_algebra_generator_count(const ld_algebra* a, size_t* count) {
    return guarded([&] {
        need(a, "algebra");
        need(count, "count");
        *count = a->gens.generators.size();
    });
}

ld_status ld_algebra_dimension(const ld_algebra* a, size_t* dim) {
    return guarded([&] {
        need(a, "algebra");
        need(dim, "dim");
        *dim = lie_closure(a->gens.generators, std::nullopt, g_tolerance.load()).size();
    });
}

ld_status ld_algebra_classify_json(const ld_algebra* a, char** json) {
    return guarded([&] {
        need(a, "algebra");
        const MatrixBasis basis = lie_closure(a->gens.generators, std::nullopt, g_tolerance.load());
        io::Json j = io::report_json(classify(basis));
        j["n"] = a->gens.generators[0].rows();
        j["generators"] = a->gens.names;
        j["closure_residual"] = closure_residual(basis);
        j["tolerance"] = g_tolerance.load();
        emit_json(json, j);
    });
}

ld_status ld_ssm_from_file(const char* path, ld_ssm** out) {
    return guarded([&] {
        need(path, "path");
        make_handle(out, io::parse_ssm(io::read_file(path)));
    });
}

ld_status ld_ssm_from_text(const char* json, ld_ssm** out) {
    return guarded([&] {
        need(json, "json");
        make_handle(out, io::parse_ssm(json));
    });
}

ld_status ld_ssm_from_algebra(const ld_algebra* a, ld_ssm** out) {
    return guarded([&] {
        need(a, "algebra");
        SSMSpec s = SSMSpec::from_generators(a->gens.generators);
        s.alphabet = a->gens.names;
        make_handle(out, std::move(s));
    });
}

void ld_ssm_free(ld_ssm* s) { delete s; }

ld_status ld_ssm_dimension(const ld_ssm* s, int* n) {
    return guarded([&] {
        need(s, "ssm");
        need(n, "n");
        *n = s->spec.n;
    });
}

ld_status ld_ssm_is_restricted(const ld_ssm* s, int* restricted) {
    return guarded([&] {
        need(s, "ssm");
        need(restricted, "restricted");
        *restricted = is_restricted(s->spec) ? 1 : 0;
    });
}

ld_status ld_path_from_file(const char* path, const ld_ssm* alphabet, ld_path** out) {
    return guarded([&] {
        need(path, "path");
        need(alphabet, "ssm");
        make_handle(out, io::parse_path(io::read_file(path), alphabet->spec.alphabet));
    });
}

ld_status ld_path_from_text(const char* json, const ld_ssm* alphabet, ld_path** out) {
    return guarded([&] {
        need(json, "json");
        need(alphabet, "ssm");
        make_handle(out, io::parse_path(json, alphabet->spec.alphabet));
    });
}

void ld_path_free(ld_path* p) { delete p; }

ld_status ld_simulate_state(const ld_ssm* s, const ld_path* p, double* state, size_t capacity) {
    return guarded([&] {
        need(s, "ssm");
        need(p, "path");
        const Vector h = simulate_state(s->spec, p->path);
        copy_out(Matrix(h), state, capacity);
    });
}

ld_status ld_transition_matrix(const ld_ssm* s, const ld_path* p, double* phi, size_t capacity) {
    return guarded([&] {
        need(s, "ssm");
        need(p, "path");
        copy_out(transition_matrix(s->spec, p->path), phi, capacity);
    });
}

ld_status ld_flow_json(const ld_ssm* s, const ld_path* p, int order, char** json) {
    return guarded([&] {
        need(s, "ssm");
        need(p, "path");
        if (order < 0 || order > 3) throw ValidationError("order must be 0 (none), 1, 2 or 3");
        const FlowResult r = magnus_terms(s->spec, p->path, 3);
        io::Json j = io::flow_json(r);
        j["segments"] = p->path.size();
        j["total_duration"] = p->path.total();
        if (order > 0) {
            const Matrix trunc = truncated_flow(s->spec, p->path, order);
            j["truncation_order"] = order;
            j["truncation_error"] = spectral_norm(r.phi - trunc);
        }
        j["state"] = io::to_json(simulate_state(s->spec, p->path));
        emit_json(json, j);
    });
}

ld_status ld_fourpath_json(const ld_ssm* s, const ld_path* prefix1, const ld_path* prefix2, const ld_path* xy,
                           char** json) {
    return guarded([&] {
        need(s, "ssm");
        need(prefix1, "prefix1");
        need(prefix2, "prefix2");
        need(xy, "xy");
        io::Json j = io::four_path_json(four_path_probe(s->spec, prefix1->path, prefix2->path, xy->path));
        j["restricted"] = is_restricted(s->spec);
        emit_json(json, j);
    });
}

ld_status ld_simerror_json(const ld_ssm* target, const ld_ssm* approx, const ld_simerror_options* options,
                           char** json) {
    return guarded([&] {
        need(target, "target");
        need(approx, "approximant");
        need(options, "options");
        SimErrorOptions o;
        o.horizon = options->horizon;
        o.samples = options->samples;
        o.seed = options->seed;
        o.jobs = options->jobs == 0 ? 1 : options->jobs;
        o.duration_unit = options->duration_unit > 0.0 ? options->duration_unit : 0.25;
        if (options->mass_bound > 0.0) o.mass_bound = options->mass_bound;
        emit_json(json, io::sim_error_json(estimate_sim_error(target->spec, approx->spec, o)));
    });
}

ld_status ld_cascade_decompose(const ld_ssm* s, ld_cascade** out) {
    return guarded([&] {
        need(s, "ssm");
        make_handle(out, decompose(s->spec));
    });
}

void ld_cascade_free(ld_cascade* c) { delete c; }

ld_status ld_cascade_depth(const ld_cascade* c, int* depth) {
    return guarded([&] {
        need(c, "cascade");
        need(depth, "depth");
        *depth = c->decomp.depth;
    });
}

ld_status ld_cascade_json(const ld_cascade* c, char** json) {
    return guarded([&] {
        need(c, "cascade");
        emit_json(json, io::cascade_json(c->decomp));
    });
}

ld_status ld_cascade_from_json(const char* json, ld_cascade** out) {
    return guarded([&] {
        need(json, "json");
        make_handle(out, io::cascade_from_json(io::parse_json(json, "cascade")));
    });
}

ld_status ld_cascade_verify_json(const ld_cascade* c, size_t paths, uint64_t seed, double step, unsigned jobs,
                                 char** json) {
    return guarded([&] {
        need(c, "cascade");
        if (paths == 0) throw ValidationError("need at least one path");
        const double h = step > 0.0 ? step : 1.0 / 256.0;
        std::vector<PiecewisePath> ps;
        for (size_t i = 0; i < paths; ++i) ps.push_back(sample_path(c->decomp.source, PathSampler{}, seed, i));
        const CascadeCheck check = verify_cascade(c->decomp, ps, h, jobs == 0 ? 1 : jobs);
        io::Json j;
        j["depth"] = c->decomp.depth;
        j["derived_length"] = c->decomp.derived_length;
        j["paths"] = paths;
        j["seed"] = seed;
        j["step"] = h;
        j["max_error"] = check.max_error;
        j["max_ideal_residual"] = check.max_ideal_residual;
        j["max_layer_commutator"] = check.max_layer_commutator;
        emit_json(json, j);
    });
}

ld_status ld_scaling_csv(const ld_algebra* a, const int* orders, size_t order_count, double eps_lo, double eps_hi,
                         size_t points, size_t paths_per_point, uint64_t seed, unsigned jobs, char** csv) {
    return guarded([&] {
        need(a, "algebra");
        need(orders, "orders");
        if (points < 3) throw ValidationError("scaling needs at least three epsilon grid points");
        ScalingOptions o;
        o.orders.assign(orders, orders + order_count);
        o.eps_grid = log_grid(eps_lo, eps_hi, points);
        o.paths_per_point = paths_per_point;
        o.seed = seed;
        o.jobs = jobs == 0 ? 1 : jobs;
        emit(csv, io::scaling_csv(scaling_experiment(a->gens.generators, o)));
    });
}

ld_status ld_group_create(const char* name, ld_group** out) {
    return guarded([&] {
        need(name, "name");
        make_handle(out, make_group(name));
    });
}

void ld_group_free(ld_group* g) { delete g; }

ld_status ld_group_order(const ld_group* g, int* order) {
    return guarded([&] {
        need(g, "group");
        need(order, "order");
        *order = g->group.order;
    });
}

ld_status ld_group_compose_word(const ld_group* g, const int* tokens, size_t length, int* result) {
    return guarded([&] {
        need(g, "group");
        need(result, "result");
        if (length > 0) need(tokens, "tokens");
        *result = compose_word(g->group, std::span<const int>(tokens, length));
    });
}

ld_status ld_group_classify_json(const ld_group* g, char** json) {
    return guarded([&] {
        need(g, "group");
        const GroupReport r = classify_group(g->group);
        io::Json j;
        j["group"] = g->group.name;
        j["order"] = g->group.order;
        j["class"] = to_string(r.class_label);
        j["derived_orders"] = r.derived_orders;
        j["lower_central_orders"] = r.lower_central_orders;
        j["derived_length"] = r.derived_length >= 0 ? io::Json(r.derived_length) : io::Json(nullptr);
        j["nilpotency_class"] = r.nilpotency_class >= 0 ? io::Json(r.nilpotency_class) : io::Json(nullptr);
        emit_json(json, j);
    });
}

ld_status ld_wordgen_jsonl(const ld_group* g, size_t length, size_t count, uint64_t seed, unsigned jobs, int bos,
                           char** jsonl) {
    return guarded([&] {
        need(g, "group");
        emit(jsonl, io::word_jsonl(gen_word_dataset(g->group, length, count, seed, jobs == 0 ? 1 : jobs, bos != 0)));
    });
}

ld_status ld_wordgen_verify(const ld_group* g, const char* jsonl, int bos, size_t* records, size_t* mismatches) {
    return guarded([&] {
        need(g, "group");
        need(jsonl, "jsonl");
        need(records, "records");
        need(mismatches, "mismatches");
        const auto recs = io::words_from_jsonl(jsonl);
        const FiniteGroup& grp = g->group;
        size_t bad = 0;
        for (const auto& r : recs) {
            std::span<const int> tokens(r.tokens);
            std::span<const int> labels(r.labels);
            bool ok = tokens.size() == labels.size() && !tokens.empty();
            if (ok && bos) {
                ok = tokens[0] == grp.order && labels[0] == grp.order;
                tokens = tokens.subspan(1);
                labels = labels.subspan(1);
            }
            if (ok) {
                ok = std::all_of(tokens.begin(), tokens.end(), [&](int t) { return t >= 0 && t < grp.order; });
            }
            if (ok) {
                const auto expect = prefix_labels(grp, tokens);
                ok = std::equal(expect.begin(), expect.end(), labels.begin(), labels.end());
            }
            bad += ok ? 0 : 1;
        }
        *records = recs.size();
        *mismatches = bad;
    });
}

ld_status ld_rotgen_jsonl(size_t length, size_t count, uint64_t seed, unsigned jobs, char** jsonl) {
    return guarded([&] { emit(jsonl, io::rotation_jsonl(gen_rotation_dataset(length, count, seed, jobs == 0 ? 1 : jobs))); });
}

ld_status ld_rotgen_verify(const char* jsonl, double tol, size_t* records, size_t* mismatches) {
    return guarded([&] {
        need(jsonl, "jsonl");
        need(records, "records");
        need(mismatches, "mismatches");
        if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
        const auto recs = io::rotations_from_jsonl(jsonl);
        const auto& rot = a5_rotation_elements();
        size_t bad = 0;
        for (const auto& r : recs) {
            bool ok = r.tokens.size() == r.targets.size() && std::abs(r.v0.norm() - 1.0) <= 1e-12;
            Vec3 cur = r.v0;
            for (size_t i = 0; ok && i < r.tokens.size(); ++i) {
                if (r.tokens[i] < 0 || r.tokens[i] >= 60) {
                    ok = false;
                    break;
                }
                cur = rot.matrices[r.tokens[i]] * cur;
                ok = (cur - r.targets[i]).norm() <= tol && std::abs(r.targets[i].norm() - 1.0) <= 1e-12;
            }
            bad += ok ? 0 : 1;
        }
        *records = recs.size();
        *mismatches = bad;
    });
}

ld_status ld_depth_bound(long long T, int* depth) {
    return guarded([&] {
        need(depth, "depth");
        *depth = depth_bound(T);
    });
}

ld_status ld_witt_dimension(int n, int T, char** decimal) {
    return guarded([&] { emit(decimal, to_decimal(witt_dimension(n, T))); });
}

ld_status ld_lyndon_table_csv(int n, int T, char** csv) {
    return guarded([&] { emit(csv, io::lyndon_csv(lyndon_table(n, T))); });
}

ld_status ld_lyndon_factorize_json(const int* letters, size_t length, char** json) {
    return guarded([&] {
        if (length == 0) throw ValidationError("empty word");
        need(letters, "letters");
        const Word w(letters, letters + length);
        io::Json j;
        j["word"] = w;
        j["lyndon"] = is_lyndon(w);
        io::Json factors = io::Json::array();
        io::Json brackets = io::Json::array();
        for (const auto& f : cfl_factorize(w)) {
            factors.push_back(f);
            brackets.push_back(bracket_tree(f)->str());
        }
        j["factors"] = std::move(factors);
        j["brackets"] = std::move(brackets);
        emit_json(json, j);
    });
}

}  // extern "C"
