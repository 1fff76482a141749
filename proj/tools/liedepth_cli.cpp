// liedepth command line front end. Talks to the library only through the C API.
#include "liedepth/liedepth.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using Json = nlohmann::ordered_json;

struct Failure {
    int code;
    std::string message;
};

void check(ld_status s) {
    if (s != LD_OK) throw Failure{static_cast<int>(s), ld_last_error()};
}

[[noreturn]] void invalid(const std::string& msg) { throw Failure{LD_ERR_VALIDATION, msg}; }

std::string take(char* s) {
    std::string out(s ? s : "");
    ld_free_string(s);
    return out;
}

template <class T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Free(p); }
    T** out() { return &p; }
    T* get() const { return p; }
};

using Algebra = Handle<ld_algebra, ld_algebra_free>;
using Ssm = Handle<ld_ssm, ld_ssm_free>;
using Path = Handle<ld_path, ld_path_free>;
using Group = Handle<ld_group, ld_group_free>;
using Cascade = Handle<ld_cascade, ld_cascade_free>;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) invalid("cannot write '" + path + "'");
        out << text;
        if (!out) invalid("write failed for '" + path + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) invalid("cannot move output into '" + path + "'");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) invalid("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Result goes to --out (plus a sidecar "<out>.meta.json") or to stdout with
// the metadata on stderr. Metadata never includes --jobs, so outputs and
// sidecars are identical for any worker count.
struct Run {
    std::string subcommand;
    std::string out;
    std::uint64_t seed = 0;
    Json config = Json::object();

    void emit(const std::string& result) const {
        Json meta;
        meta["tool"] = "liedepth";
        meta["version"] = ld_version();
        meta["subcommand"] = subcommand;
        meta["seed"] = seed;
        meta["tolerance"] = fmt(ld_default_tolerance());
        meta["config"] = config;
        if (out.empty()) {
            std::cout << result;
            std::cout.flush();
            std::cerr << "# meta " << meta.dump() << "\n";
        } else {
            write_text(out, result);
            write_text(out + ".meta.json", meta.dump(2) + "\n");
        }
    }
};

std::vector<int> parse_ints(const std::string& s, const char* what) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            invalid(std::string(what) + ": expected comma-separated integers, got '" + s + "'");
        }
    }
    if (out.empty()) invalid(std::string(what) + ": empty list");
    return out;
}

std::vector<double> parse_doubles(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            invalid(std::string(what) + ": expected comma-separated numbers, got '" + s + "'");
        }
    }
    if (out.empty()) invalid(std::string(what) + ": empty list");
    return out;
}

void load_algebra(Algebra& a, const std::string& file, const std::string& builtin) {
    if (!file.empty() && !builtin.empty()) invalid("give either --algebra or --builtin, not both");
    if (!file.empty()) {
        check(ld_algebra_from_file(file.c_str(), a.out()));
    } else if (!builtin.empty()) {
        check(ld_algebra_builtin(builtin.c_str(), a.out()));
    } else {
        invalid("an algebra is required (--algebra FILE or --builtin NAME)");
    }
}

void load_ssm(Ssm& s, const std::string& file, const std::string& builtin) {
    if (!file.empty() && !builtin.empty()) invalid("give either --ssm or --builtin, not both");
    if (!file.empty()) {
        check(ld_ssm_from_file(file.c_str(), s.out()));
        return;
    }
    if (builtin.empty()) invalid("a system is required (--ssm FILE or --builtin NAME)");
    Algebra a;
    check(ld_algebra_builtin(builtin.c_str(), a.out()));
    check(ld_ssm_from_algebra(a.get(), s.out()));
}

void apply_tolerance(const std::string& flag) {
    if (!flag.empty()) {
        check(ld_set_default_tolerance(parse_doubles(flag, "--tol").at(0)));
        return;
    }
    if (const char* env = std::getenv("LIEDEPTH_TOL"); env && *env) {
        const auto v = parse_doubles(env, "LIEDEPTH_TOL");
        if (v.size() != 1) invalid("LIEDEPTH_TOL: expected a single number");
        check(ld_set_default_tolerance(v[0]));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lie-algebraic analysis of sequence models: classification, flows, cascades, word problems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ld_version()));

    std::string tol_flag;
    app.add_option("--tol", tol_flag, "Span tolerance (overrides LIEDEPTH_TOL)");

    Run run;
    unsigned jobs = 1;
    auto common = [&](CLI::App* sub, bool seeded) {
        sub->add_option("--out,-o", run.out, "Output file (default: stdout)");
        if (seeded) {
            sub->add_option("--seed", run.seed, "Random seed");
            sub->add_option("--jobs,-j", jobs, "Worker threads")->check(CLI::Range(1u, 256u));
        }
    };

    // classify
    std::string algebra_file, builtin;
    auto* classify = app.add_subcommand("classify", "Classify the Lie algebra generated by a matrix family");
    classify->add_option("--algebra", algebra_file, "Algebra or SSM JSON file");
    classify->add_option("--builtin", builtin, "Reference family (so3, sl2, diagonal, ...)");
    common(classify, false);

    // simerror
    std::string target_file, approx_file, horizons = "1";
    std::size_t samples = 200;
    double unit = 0.25, mass_bound = 0.0;
    auto* simerror = app.add_subcommand("simerror", "Estimate the simulation error of one SSM by another");
    simerror->add_option("--target", target_file, "Target SSM JSON")->required();
    simerror->add_option("--approx", approx_file, "Approximant SSM JSON")->required();
    simerror->add_option("--horizon", horizons, "Horizon or comma-separated horizons");
    simerror->add_option("--samples", samples, "Sampled paths per horizon");
    simerror->add_option("--unit", unit, "Segment duration unit");
    simerror->add_option("--mass-bound", mass_bound, "Reject paths with larger generator mass (0: off)");
    common(simerror, true);

    // scaling
    std::string orders = "1,2,3", eps = "1e-3..1e-1";
    std::size_t points = 9, paths = 20;
    auto* scaling = app.add_subcommand("scaling", "Truncation-order error scaling sweep");
    scaling->add_option("--algebra", algebra_file, "Algebra JSON file");
    scaling->add_option("--builtin", builtin, "Reference family (default so3)");
    scaling->add_option("--orders", orders, "Truncation orders, e.g. 1,2,3");
    scaling->add_option("--eps", eps, "Epsilon range LO..HI");
    scaling->add_option("--points", points, "Grid points (>= 3)");
    scaling->add_option("--paths", paths, "Paths per grid point");
    common(scaling, true);

    // wordgen
    std::string group_name;
    std::size_t length = 16, count = 100;
    bool bos = false, verify = false;
    auto* wordgen = app.add_subcommand("wordgen", "Generate a word-problem dataset (JSONL)");
    wordgen->add_option("--group", group_name, "C2, C3, Cn, D8, H3, S3, S4, S5, A4, A5")->required();
    wordgen->add_option("--len", length, "Sequence length");
    wordgen->add_option("--count", count, "Number of records");
    wordgen->add_flag("--bos", bos, "Prefix tokens and labels with the BOS id (= group order)");
    wordgen->add_flag("--verify", verify, "Re-check every label against prefix folding");
    common(wordgen, true);

    // rotgen
    auto* rotgen = app.add_subcommand("rotgen", "Generate the A5 rotation dataset (JSONL)");
    rotgen->add_option("--len", length, "Sequence length");
    rotgen->add_option("--count", count, "Number of records");
    rotgen->add_flag("--verify", verify, "Re-check every target by cumulative products");
    common(rotgen, true);

    // group
    auto* group = app.add_subcommand("group", "Derived and lower central series of a finite group");
    group->add_option("--group", group_name, "Group name")->required();
    common(group, false);

    // depth / witt / lyndon
    long long T = 1;
    int n_letters = 2;
    std::string factorize;
    auto* depth = app.add_subcommand("depth", "Depth bound ceil(log2 T) + 1");
    depth->add_option("--T", T, "Sequence length")->required();
    common(depth, false);
    auto* witt = app.add_subcommand("witt", "Witt dimension of the free Lie algebra truncated at degree T");
    witt->add_option("--n", n_letters, "Alphabet size")->required();
    witt->add_option("--T", T, "Maximal degree")->required();
    common(witt, false);
    auto* lyndon = app.add_subcommand("lyndon", "Lyndon counts per length, or factorize a word");
    lyndon->add_option("--n", n_letters, "Alphabet size");
    lyndon->add_option("--T", T, "Maximal length");
    lyndon->add_option("--factorize", factorize, "Comma-separated letters to factorize");
    common(lyndon, false);

    // cascade
    std::string ssm_file;
    double step = 0.0;
    std::size_t verify_paths = 50;
    auto* cascade = app.add_subcommand("cascade", "Split-extension cascade decomposition of a triangular SSM");
    cascade->add_option("--ssm", ssm_file, "SSM JSON file");
    cascade->add_option("--builtin", builtin, "Reference family");
    cascade->add_flag("--verify", verify, "Check the reconstruction on random unit-horizon paths");
    cascade->add_option("--paths", verify_paths, "Verification paths");
    cascade->add_option("--step", step, "Integrator step (default 1/256)");
    common(cascade, true);

    // fourpath
    std::string prefix1, prefix2, xy_file;
    auto* fourpath = app.add_subcommand("fourpath", "Four-path probe from two prefixes and a segment pair");
    fourpath->add_option("--ssm", ssm_file, "SSM JSON file")->required();
    fourpath->add_option("--prefix1", prefix1, "First prefix path JSON")->required();
    fourpath->add_option("--prefix2", prefix2, "Second prefix path JSON")->required();
    fourpath->add_option("--xy", xy_file, "Two-or-more segment path JSON")->required();
    common(fourpath, false);

    // flow
    std::string path_file;
    int order = 0;
    auto* flow = app.add_subcommand("flow", "Transition matrix and Magnus terms along a path");
    flow->add_option("--ssm", ssm_file, "SSM JSON file");
    flow->add_option("--builtin", builtin, "Reference family");
    flow->add_option("--path", path_file, "Path JSON file")->required();
    flow->add_option("--order", order, "Also report the truncated-flow error at this order (1..3)");
    common(flow, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return LD_ERR_VALIDATION;
    }

    try {
        apply_tolerance(tol_flag);
        CLI::App* sub = app.get_subcommands().front();
        run.subcommand = sub->get_name();
        for (const CLI::Option* opt : sub->get_options()) {
            if (opt->get_name() == "--help" || opt->get_name() == "--jobs" || opt->get_name() == "--out") continue;
            if (opt->count() == 0) continue;
            const auto results = opt->results();
            std::string joined;
            for (const auto& r : results) joined += (joined.empty() ? "" : " ") + r;
            run.config[opt->get_name()] = opt->get_expected_max() == 0 ? "true" : joined;
        }

        if (sub == classify) {
            Algebra a;
            load_algebra(a, algebra_file, builtin);
            char* json = nullptr;
            check(ld_algebra_classify_json(a.get(), &json));
            run.emit(take(json));
        } else if (sub == simerror) {
            Ssm tgt, apx;
            check(ld_ssm_from_file(target_file.c_str(), tgt.out()));
            check(ld_ssm_from_file(approx_file.c_str(), apx.out()));
            const auto hs = parse_doubles(horizons, "--horizon");
            std::string result;
            if (hs.size() > 1) result = "[\n";
            for (std::size_t i = 0; i < hs.size(); ++i) {
                ld_simerror_options o{hs[i], samples, run.seed, jobs, unit, mass_bound};
                char* json = nullptr;
                check(ld_simerror_json(tgt.get(), apx.get(), &o, &json));
                std::string r = take(json);
                if (hs.size() > 1) {
                    while (!r.empty() && r.back() == '\n') r.pop_back();
                    result += r + (i + 1 < hs.size() ? ",\n" : "\n");
                } else {
                    result = r;
                }
            }
            if (hs.size() > 1) result += "]\n";
            run.emit(result);
        } else if (sub == scaling) {
            Algebra a;
            load_algebra(a, algebra_file, algebra_file.empty() && builtin.empty() ? std::string("so3") : builtin);
            const auto dots = eps.find("..");
            if (dots == std::string::npos) invalid("--eps: expected LO..HI");
            const double lo = parse_doubles(eps.substr(0, dots), "--eps").at(0);
            const double hi = parse_doubles(eps.substr(dots + 2), "--eps").at(0);
            const auto os = parse_ints(orders, "--orders");
            char* csv = nullptr;
            check(ld_scaling_csv(a.get(), os.data(), os.size(), lo, hi, points, paths, run.seed, jobs, &csv));
            run.emit(take(csv));
        } else if (sub == wordgen) {
            Group g;
            check(ld_group_create(group_name.c_str(), g.out()));
            char* jsonl = nullptr;
            check(ld_wordgen_jsonl(g.get(), length, count, run.seed, jobs, bos ? 1 : 0, &jsonl));
            const std::string data = take(jsonl);
            if (verify) {
                std::size_t records = 0, bad = 0;
                check(ld_wordgen_verify(g.get(), data.c_str(), bos ? 1 : 0, &records, &bad));
                std::cerr << "verify: " << records << " records, " << bad << " mismatches\n";
                if (bad != 0 || records != count) throw Failure{LD_ERR_INVARIANT, "label oracle disagrees with generated data"};
            }
            run.config["bos_convention"] = "bos id = group order, label = itself";
            run.emit(data);
        } else if (sub == rotgen) {
            char* jsonl = nullptr;
            check(ld_rotgen_jsonl(length, count, run.seed, jobs, &jsonl));
            const std::string data = take(jsonl);
            if (verify) {
                std::size_t records = 0, bad = 0;
                check(ld_rotgen_verify(data.c_str(), 1e-12, &records, &bad));
                std::cerr << "verify: " << records << " records, " << bad << " mismatches\n";
                if (bad != 0 || records != count) throw Failure{LD_ERR_INVARIANT, "rotation oracle disagrees with generated data"};
            }
            run.emit(data);
        } else if (sub == group) {
            Group g;
            check(ld_group_create(group_name.c_str(), g.out()));
            char* json = nullptr;
            check(ld_group_classify_json(g.get(), &json));
            run.emit(take(json));
        } else if (sub == depth) {
            int d = 0;
            check(ld_depth_bound(T, &d));
            run.emit(std::to_string(d) + "\n");
        } else if (sub == witt) {
            if (T > 100000) invalid("--T too large");
            char* dec = nullptr;
            check(ld_witt_dimension(n_letters, static_cast<int>(T), &dec));
            run.emit(take(dec) + "\n");
        } else if (sub == lyndon) {
            if (!factorize.empty()) {
                const auto letters = parse_ints(factorize, "--factorize");
                char* json = nullptr;
                check(ld_lyndon_factorize_json(letters.data(), letters.size(), &json));
                run.emit(take(json));
            } else {
                if (T > 100000) invalid("--T too large");
                char* csv = nullptr;
                check(ld_lyndon_table_csv(n_letters, static_cast<int>(T), &csv));
                run.emit(take(csv));
            }
        } else if (sub == cascade) {
            Ssm s;
            load_ssm(s, ssm_file, builtin);
            Cascade c;
            check(ld_cascade_decompose(s.get(), c.out()));
            char* json = nullptr;
            check(ld_cascade_json(c.get(), &json));
            std::string result = take(json);
            if (verify) {
                char* report = nullptr;
                check(ld_cascade_verify_json(c.get(), verify_paths, run.seed, step, jobs, &report));
                std::string v = take(report);
                while (!result.empty() && result.back() == '\n') result.pop_back();
                while (!v.empty() && v.back() == '\n') v.pop_back();
                result = "{\n\"decomposition\": " + result + ",\n\"verification\": " + v + "\n}\n";
            }
            run.emit(result);
        } else if (sub == fourpath) {
            Ssm s;
            check(ld_ssm_from_file(ssm_file.c_str(), s.out()));
            Path p1, p2, xy;
            check(ld_path_from_file(prefix1.c_str(), s.get(), p1.out()));
            check(ld_path_from_file(prefix2.c_str(), s.get(), p2.out()));
            check(ld_path_from_file(xy_file.c_str(), s.get(), xy.out()));
            char* json = nullptr;
            check(ld_fourpath_json(s.get(), p1.get(), p2.get(), xy.get(), &json));
            run.emit(take(json));
        } else if (sub == flow) {
            Ssm s;
            load_ssm(s, ssm_file, builtin);
            Path p;
            check(ld_path_from_file(path_file.c_str(), s.get(), p.out()));
            char* json = nullptr;
            check(ld_flow_json(s.get(), p.get(), order, &json));
            run.emit(take(json));
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return LD_ERR_INVARIANT;
    }
    return 0;
}
