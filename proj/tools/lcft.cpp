// lcft command-line front end. Reads a JSON config, runs one subcommand and
// prints a JSON record embedding the resolved config and its FNV-1a hash.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "acceptance.hpp"
#include "lcft/bootstrap.hpp"
#include "lcft/dozz.hpp"
#include "lcft/errors.hpp"
#include "lcft/gmc_oracle.hpp"
#include "lcft/virasoro.hpp"

using nlohmann::json;
using namespace lcft;

namespace {

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

json cjson(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

// Reads fields from a config object, records the resolved value of each and
// rejects unknown fields. Paths are reported as config.a.b[2].
class Reader {
public:
    Reader(const json& in, std::string path) : in_(in), path_(std::move(path)) {
        if (!in_.is_object()) fail(path_, "must be an object");
    }

    double num(const std::string& key, std::optional<double> def) {
        const json* v = get(key, def.has_value());
        const double x = v ? as_num(*v, at(key)) : *def;
        out_[key] = x;
        return x;
    }
    long long integer(const std::string& key, long long def) {
        const json* v = get(key, true);
        if (v && !v->is_number_integer()) fail(at(key), "must be an integer");
        const long long x = v ? v->get<long long>() : def;
        out_[key] = x;
        return x;
    }
    std::vector<int> int_list(const std::string& key) {
        const json* v = get(key, true);
        std::vector<int> r;
        if (v && !v->is_array()) fail(at(key), "must be a list of integers");
        if (v)
            for (size_t i = 0; i < v->size(); ++i) {
                if (!(*v)[i].is_number_integer()) fail(at(key) + "[" + std::to_string(i) + "]", "must be an integer");
                r.push_back((*v)[i].get<int>());
            }
        out_[key] = r;
        return r;
    }
    bool flag(const std::string& key, bool def) {
        const json* v = get(key, true);
        if (v && !v->is_boolean()) fail(at(key), "must be true or false");
        const bool x = v ? v->get<bool>() : def;
        out_[key] = x;
        return x;
    }
    cplx complex(const std::string& key, std::optional<cplx> def) {
        const json* v = get(key, def.has_value());
        const cplx z = v ? as_complex(*v, at(key)) : *def;
        out_[key] = {z.real(), z.imag()};
        return z;
    }
    std::vector<cplx> complex_list(const std::string& key, std::optional<std::vector<cplx>> def) {
        const json* v = get(key, def.has_value());
        std::vector<cplx> r;
        if (v) {
            if (!v->is_array()) fail(at(key), "must be a list");
            for (size_t i = 0; i < v->size(); ++i) r.push_back(as_complex((*v)[i], at(key) + "[" + std::to_string(i) + "]"));
        } else {
            r = *def;
        }
        json o = json::array();
        for (cplx z : r) o.push_back({z.real(), z.imag()});
        out_[key] = o;
        return r;
    }
    std::vector<double> num_list(const std::string& key, std::optional<std::vector<double>> def) {
        const json* v = get(key, def.has_value());
        std::vector<double> r;
        if (v) {
            if (v->is_number()) r.push_back(v->get<double>());
            else if (!v->is_array()) fail(at(key), "must be a number or a list of numbers");
            else
                for (size_t i = 0; i < v->size(); ++i) r.push_back(as_num((*v)[i], at(key) + "[" + std::to_string(i) + "]"));
        } else {
            r = *def;
        }
        out_[key] = r;
        return r;
    }
    std::string choice(const std::string& key, const std::string& def, const std::set<std::string>& allowed) {
        const json* v = get(key, true);
        if (v && !v->is_string()) fail(at(key), "must be a string");
        const std::string s = v ? v->get<std::string>() : def;
        if (!allowed.count(s)) fail(at(key), "has unsupported value '" + s + "'");
        out_[key] = s;
        return s;
    }
    const json* raw(const std::string& key) {
        seen_.insert(key);
        return in_.contains(key) ? &in_.at(key) : nullptr;
    }
    Reader sub(const std::string& key) {
        seen_.insert(key);
        static const json empty = json::object();
        return Reader(in_.contains(key) ? in_.at(key) : empty, at(key));
    }
    void put(const std::string& key, json v) { out_[key] = std::move(v); }
    std::string at(const std::string& key) const { return path_ + "." + key; }

    // Throws on fields that were never read.
    json finish() const {
        for (auto it = in_.begin(); it != in_.end(); ++it)
            if (!seen_.count(it.key())) fail(at(it.key()), "unknown field");
        return out_;
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& what) {
        throw ValidationError(path + ": " + what);
    }

private:
    const json& in_;
    std::string path_;
    json out_ = json::object();
    std::set<std::string> seen_;

    const json* get(const std::string& key, bool optional) {
        seen_.insert(key);
        if (in_.contains(key) && !in_.at(key).is_null()) return &in_.at(key);
        if (!optional) fail(at(key), "is required");
        return nullptr;
    }
    static double as_num(const json& v, const std::string& path) {
        if (!v.is_number()) fail(path, "must be a number");
        return v.get<double>();
    }
    static cplx as_complex(const json& v, const std::string& path) {
        if (v.is_number()) return v.get<double>();
        if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
            return {v[0].get<double>(), v[1].get<double>()};
        if (v.is_object() && v.contains("re") && v["re"].is_number()) {
            for (auto it = v.begin(); it != v.end(); ++it)
                if (it.key() != "re" && it.key() != "im") fail(path + "." + it.key(), "unknown field");
            const double im = v.contains("im") ? as_num(v["im"], path + ".im") : 0.0;
            return {v["re"].get<double>(), im};
        }
        fail(path, "must be a number, [re, im] or {re, im}");
    }
};

CftParams read_params(Reader& r) {
    const double g = r.num("gamma", std::sqrt(2.0));
    const double mu = r.num("mu", 1.0);
    return CftParams(g, mu);
}

BootstrapOptions read_bootstrap(Reader& r, int threads, bool density) {
    BootstrapOptions o;
    o.N = static_cast<int>(r.integer("N", o.N));
    o.cond_guard = r.num("cond_guard", o.cond_guard);
    o.node_budget = r.num("node_budget", o.node_budget);
    Reader q = r.sub("quadrature");
    const double p_max = q.num("p_max", 12.0), width = q.num("panel_width", 0.5);
    const int per = static_cast<int>(q.integer("per_panel", 8));
    r.put("quadrature", q.finish());
    if (!(p_max > 0.0 && width > 0.0 && per > 0)) Reader::fail("config.quadrature", "p_max, panel_width and per_panel must be positive");
    if (o.N < 0) Reader::fail("config.N", "must be non-negative");
    o.quad = Quadrature::composite(p_max, width, per);
    o.threads = threads;
    o.keep_density = density;
    return o;
}

json correlator_json(const CorrelatorResult& c) {
    return {{"value", c.value},
            {"imag", c.imag},
            {"prefactor", c.prefactor},
            {"tail", c.tail},
            {"last_level", c.last_level},
            {"mu_exponent", c.mu_exponent},
            {"min_rho", c.min_rho},
            {"max_rho_imag", c.max_rho_imag},
            {"grid_points", c.grid_points},
            {"edges", c.edges}};
}

struct Context {
    std::string sub;
    int threads = 0;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

// Runs one subcommand; fills `cfg` with the resolved config and returns the result object.
json dispatch(const Context& ctx, const json& input, json& cfg) {
    Reader r(input, "config");
    json res;
    const bool want_csv = !ctx.out_dir.empty();
    const auto csv_path = [&](const char* name) { return (std::filesystem::path(ctx.out_dir) / name).string(); };

    if (ctx.sub == "upsilon") {
        const double g = r.num("gamma", std::sqrt(2.0));
        const auto zs = r.complex_list("z", std::nullopt);
        UpsilonEvaluator ev(g);
        res["values"] = json::array();
        for (cplx z : zs) res["values"].push_back({{"z", cjson(z)}, {"value", cjson(ev(z))}});
    } else if (ctx.sub == "dozz") {
        const CftParams prm = read_params(r);
        const auto a = r.complex_list("alpha", std::nullopt);
        if (a.size() != 3) Reader::fail("config.alpha", "needs exactly three weights");
        DozzEvaluator dz(prm);
        res["value"] = cjson(dz(a[0], a[1], a[2]));
        res["log_value"] = cjson(dz.log_constant(a[0], a[1], a[2]));
        res["mu_exponent"] = cjson(dz.mu_exponent(a[0], a[1], a[2]));
    } else if (ctx.sub == "shapovalov") {
        const CftParams prm(r.num("gamma", std::sqrt(2.0)), 1.0);
        const double c = r.num("c", prm.c_L());
        const json* d = r.raw("delta");
        const json* al = r.raw("alpha");
        if ((d == nullptr) == (al == nullptr)) Reader::fail("config", "give exactly one of delta or alpha");
        const cplx delta = d ? r.complex("delta", std::nullopt) : conformal_weight(r.complex("alpha", std::nullopt), prm);
        const int level = static_cast<int>(r.integer("level", 2));
        const bool inverse = r.flag("inverse", false);
        const double guard = r.num("cond_guard", 1e10);
        if (level < 0) Reader::fail("config.level", "must be non-negative");
        const auto F = shapovalov(delta, c, level);
        res["delta"] = cjson(delta);
        res["c"] = c;
        res["basis"] = json::array();
        for (const auto& b : F.basis) res["basis"].push_back(b.parts);
        res["F"] = json::array();
        for (int i = 0; i < F.F.rows(); ++i) {
            json row = json::array();
            for (int j = 0; j < F.F.cols(); ++j) row.push_back(cjson(F.F(i, j)));
            res["F"].push_back(row);
        }
        res["normalized_determinant"] = normalized_determinant(F);
        if (inverse) {
            const auto inv = shapovalov_inverse(F, guard);
            res["inverse"] = json::array();
            for (int i = 0; i < inv.inv.rows(); ++i) {
                json row = json::array();
                for (int j = 0; j < inv.inv.cols(); ++j) row.push_back(cjson(inv.inv(i, j)));
                res["inverse"].push_back(row);
            }
            res["residual"] = inv.residual;
            res["condition"] = inv.condition;
        }
    } else if (ctx.sub == "block") {
        const CftParams prm = read_params(r);
        const std::string kind = r.choice("kind", "torus", {"torus", "sphere"});
        const auto alphas = r.complex_list("alpha", std::nullopt);
        const auto ps = r.num_list("p", std::nullopt);
        const auto qs = r.complex_list("q", std::vector<cplx>{});
        const auto zs = r.complex_list("z", std::vector<cplx>{});
        BlockOptions bo;
        bo.N = static_cast<int>(r.integer("N", bo.N));
        bo.cond_guard = r.num("cond_guard", bo.cond_guard);
        const auto s = chain_block(kind == "torus" ? ChainKind::Torus : ChainKind::Sphere, alphas, ps, prm, bo, zs);
        res["abs_exponent"] = s.abs_exponent;
        res["coefficients"] = json::array();
        for (const auto& [n, v] : s.coeffs) res["coefficients"].push_back({{"n", n}, {"value", cjson(v)}});
        if (!qs.empty()) {
            res["holomorphic"] = cjson(s.holomorphic(qs));
            res["prefactor"] = s.prefactor(qs);
            res["value"] = cjson(s.value(qs));
        }
    } else if (ctx.sub == "torus1pt" || ctx.sub == "toruskpt" || ctx.sub == "spherekpt") {
        const CftParams prm = read_params(r);
        CorrelatorResult c;
        if (ctx.sub == "torus1pt") {
            const double alpha = r.num("alpha", std::nullopt);
            const cplx tau = r.complex("tau", cplx(0.0, 1.0));
            c = torus_one_point(alpha, tau, prm, read_bootstrap(r, ctx.threads, want_csv));
        } else if (ctx.sub == "toruskpt") {
            const auto alphas = r.num_list("alpha", std::nullopt);
            const auto x = r.complex_list("x", std::nullopt);
            const cplx tau = r.complex("tau", cplx(0.0, 1.0));
            c = torus_k_point(alphas, x, tau, prm, read_bootstrap(r, ctx.threads, want_csv));
        } else {
            const auto alphas = r.num_list("alpha", std::nullopt);
            const auto z = r.complex_list("z", std::nullopt);
            c = sphere_k_point(alphas, z, prm, read_bootstrap(r, ctx.threads, want_csv));
        }
        res = correlator_json(c);
        if (want_csv) write_density_csv(csv_path("density.csv"), c);
    } else if (ctx.sub == "graph") {
        const CftParams prm = read_params(r);
        const json* gj = r.raw("graph");
        if (!gj) Reader::fail("config.graph", "is required");
        std::string text;
        if (gj->is_string()) {
            std::ifstream f(gj->get<std::string>());
            if (!f) Reader::fail("config.graph", "cannot open " + gj->get<std::string>());
            std::stringstream ss;
            ss << f.rdbuf();
            text = ss.str();
        } else {
            text = gj->dump();
        }
        const AdmissibleGraph g = graph_from_json(text);
        r.put("graph", json::parse(graph_to_json(g)));
        const auto q = r.complex_list("q", std::vector<cplx>{});
        const auto alphas = r.num_list("alpha", std::vector<double>{});
        std::vector<std::optional<double>> metric;
        if (const json* m = r.raw("metric")) {
            if (!m->is_array()) Reader::fail("config.metric", "must be a list of numbers or nulls");
            for (size_t i = 0; i < m->size(); ++i) {
                if ((*m)[i].is_null()) metric.push_back(std::nullopt);
                else if ((*m)[i].is_number()) metric.push_back((*m)[i].get<double>());
                else Reader::fail("config.metric[" + std::to_string(i) + "]", "must be a number or null");
            }
            r.put("metric", *m);
        } else {
            r.put("metric", json::array());
        }
        const auto c = graph_correlator(g, q, alphas, metric, prm, read_bootstrap(r, ctx.threads, want_csv));
        res = correlator_json(c);
        res["genus"] = g.genus();
        if (want_csv) write_density_csv(csv_path("density.csv"), c);
    } else if (ctx.sub == "mc-torus1pt") {
        const CftParams prm = read_params(r);
        const auto alphas = r.num_list("alpha", std::nullopt);
        const cplx tau = r.complex("tau", cplx(0.0, 1.0));
        const int grid = static_cast<int>(r.integer("grid", 128));
        const double K = r.num("K", 0.0);
        McConfig mc;
        mc.samples = static_cast<long>(r.integer("samples", mc.samples));
        mc.batches = static_cast<int>(r.integer("batches", mc.batches));
        if (ctx.seed) {
            r.raw("seed");
            r.put("seed", *ctx.seed);
            mc.seed = *ctx.seed;
        } else {
            const json* s = r.raw("seed");
            if (s && !s->is_number_unsigned()) Reader::fail("config.seed", "must be a non-negative integer");
            mc.seed = s ? s->get<std::uint64_t>() : mc.seed;
            r.put("seed", mc.seed);
        }
        mc.threads = ctx.threads;
        const auto est = mc_torus_one_point(alphas, TorusGeometry(tau, grid, K), prm, mc);
        res["estimates"] = json::array();
        for (const auto& e : est)
            res["estimates"].push_back({{"alpha", e.alpha},
                                        {"mean", e.mean},
                                        {"stderr", e.std_error},
                                        {"expectation", e.expectation},
                                        {"prefactor", e.prefactor},
                                        {"W", e.W},
                                        {"det_prefactor", e.det_prefactor},
                                        {"samples", e.samples},
                                        {"batches", e.batches},
                                        {"grid", e.n},
                                        {"cutoff", e.cutoff},
                                        {"unstable", e.unstable}});
        if (want_csv) write_batch_trace_csv(csv_path("trace.csv"), est);
    } else if (ctx.sub == "selftest") {
        acceptance::Options o;
        o.threads = ctx.threads;
        for (int k : r.int_list("only")) o.only.insert(k);
        o.mc_samples = static_cast<long>(r.integer("mc_samples", o.mc_samples));
        if (ctx.seed) o.seed = *ctx.seed;
        r.put("seed", o.seed);
        r.raw("seed");
        bool ok = true;
        res["criteria"] = json::array();
        acceptance::run(o, [&](const acceptance::Outcome& x) {
            std::cerr << acceptance::format(x) << std::endl;
            ok = ok && x.pass;
            res["criteria"].push_back({{"id", x.id}, {"name", x.name}, {"pass", x.pass}, {"detail", x.detail}});
        });
        res["all_passed"] = ok;
    }
    cfg = r.finish();
    return res;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Liouville CFT bootstrap and Monte Carlo toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Context ctx;
    std::string config_path;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--threads", ctx.threads, "worker threads (default LCFT_THREADS, then all cores)");
    app.add_option("--out", ctx.out_dir, "directory for result.json and CSV curves");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed for Monte Carlo runs");
    const char* subs[][2] = {{"upsilon", "Upsilon function values"},
                             {"dozz", "DOZZ structure constant"},
                             {"shapovalov", "Gram matrix of a Verma module level"},
                             {"block", "conformal block coefficients"},
                             {"torus1pt", "torus one-point function by bootstrap"},
                             {"toruskpt", "torus k-point function by bootstrap"},
                             {"spherekpt", "sphere k-point function by bootstrap"},
                             {"graph", "correlator of an admissible graph"},
                             {"mc-torus1pt", "torus one-point function by Monte Carlo"},
                             {"selftest", "acceptance battery"}};
    for (auto& s : subs) app.add_subcommand(s[0], s[1]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    ctx.sub = app.get_subcommands().front()->get_name();
    if (*seed_opt) ctx.seed = seed;
    if (ctx.threads < 0) {
        std::cerr << "--threads must be non-negative\n";
        return 2;
    }

    try {
        json input = json::object();
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw ValidationError("cannot open config " + config_path);
            try {
                input = json::parse(f);
            } catch (const json::exception& e) {
                throw ValidationError(std::string("config is not valid JSON: ") + e.what());
            }
        }
        if (!ctx.out_dir.empty()) std::filesystem::create_directories(ctx.out_dir);
        json cfg;
        json result = dispatch(ctx, input, cfg);
        const json keyed{{"subcommand", ctx.sub}, {"config", cfg}};
        json record{{"subcommand", ctx.sub},
                    {"config", cfg},
                    {"config_hash", "fnv1a64:" + hex64(fnv1a(keyed.dump()))},
                    {"result", result}};
        const std::string text = record.dump(2);
        std::cout << text << std::endl;
        if (!ctx.out_dir.empty()) {
            std::ofstream out(std::filesystem::path(ctx.out_dir) / "result.json");
            out << text << "\n";
        }
        if (ctx.sub == "selftest" && !result["all_passed"].get<bool>()) return 1;
        return 0;
    } catch (const Error& e) {
        std::string msg = e.what();
        if (msg.rfind(e.kind() + ": ", 0) == 0) msg.erase(0, e.kind().size() + 2);
        std::cerr << json{{"error", e.kind()}, {"message", msg}}.dump() << std::endl;
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "InternalError"}, {"message", e.what()}}.dump() << std::endl;
        return 3;
    }
}
