#include "lcft/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <thread>

#include "json.hpp"
#include "lcft/dozz.hpp"
#include "lcft/errors.hpp"
#include "lcft/special_fn.hpp"

namespace lcft {

namespace {

constexpr double kPi = 3.14159265358979323846;

void parallel_for(size_t count, int threads, const std::function<void(size_t)>& f) {
    const size_t nt = std::max<size_t>(1, std::min<size_t>(threads, count));
    if (nt == 1) {
        for (size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> err(nt);
    for (size_t t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            try {
                for (size_t i = t * count / nt; i < (t + 1) * count / nt; ++i) f(i);
            } catch (...) {
                err[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : err)
        if (e) std::rethrow_exception(e);
}

double pairwise_sum(const std::vector<double>& v, size_t lo, size_t hi) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    const size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

double pairwise_sum(const std::vector<double>& v) { return v.empty() ? 0.0 : pairwise_sum(v, 0, v.size()); }

void throw_violations(const std::vector<Violation>& v) {
    if (v.empty()) return;
    std::string msg = "Seiberg/admissibility condition violated:";
    for (const auto& x : v) msg += " [" + x.what + ", margin " + std::to_string(x.margin) + "]";
    throw ValidationError(msg);
}

CorrelatorResult evaluate(const AdmissibleGraph& g, const std::vector<cplx>& q, const std::vector<double>& alphas_r,
                          const std::vector<std::optional<double>>& metric, double z_prefactor, const CftParams& prm,
                          const BootstrapOptions& opt) {
    prm.validate();
    g.check();
    const int L = static_cast<int>(g.edges.size());
    const int nv = static_cast<int>(g.vertices.size());
    if (static_cast<int>(q.size()) != L) throw DimensionMismatch("one modulus q per linking edge expected");
    if (alphas_r.size() != g.marked.size()) throw DimensionMismatch("one weight per marked point expected");
    if (!metric.empty() && static_cast<int>(metric.size()) != nv) throw DimensionMismatch("one metric constant per vertex expected");
    for (const auto& qq : q)
        if (!(std::abs(qq) > 0.0 && std::abs(qq) < 1.0)) throw ValidationError("moduli must satisfy 0 < |q| < 1");
    if (opt.N < 0) throw ValidationError("truncation level must be non-negative");
    throw_violations(validate_graph(g, alphas_r, prm));

    const auto& quad = opt.quad;
    const size_t n = quad.nodes.size();
    double grid_d = std::pow(double(n), L);
    if (grid_d > opt.node_budget)
        throw CostGuard("tensor grid of " + std::to_string(grid_d) + " nodes exceeds the budget " + std::to_string(opt.node_budget));
    const size_t grid = static_cast<size_t>(grid_d);
    const int threads = resolve_threads(opt.threads);
    std::vector<cplx> alphas(alphas_r.begin(), alphas_r.end());
    const double c = prm.c_L();

    CorrelatorResult r;
    r.edges = L;
    r.grid_points = grid;
    const int genus = g.genus(), m = g.marked_count();
    r.prefactor = gluing_prefactor(genus, m);
    for (int v = 0; v < nv; ++v) {
        double mc = default_metric_constant(g, v);
        if (g.vertices[v].metric) mc = *g.vertices[v].metric;
        if (!metric.empty() && metric[v]) mc = *metric[v];
        r.prefactor *= mc;
    }
    double sum_alpha = 0.0;
    for (double a : alphas_r) sum_alpha += a;
    r.mu_exponent = (2.0 * prm.Q() * (1 - genus) - sum_alpha) / prm.gamma;

    std::vector<GramInverseStack> finv(n);
    parallel_for(n, threads, [&](size_t i) {
        finv[i] = gram_inverse_stack(conformal_weight(cplx(prm.Q(), quad.nodes[i]), prm), c, opt.N, opt.cond_guard);
    });

    // per vertex: tensors and DOZZ factors over the node tuples of its own edges
    auto dz = std::make_shared<DozzEvaluator>(prm);
    std::vector<std::vector<int>> vedges(nv);
    std::vector<size_t> table_size(nv), table_offset(nv + 1, 0);
    for (int v = 0; v < nv; ++v) {
        std::set<int> es;
        for (int e = 0; e < L; ++e)
            if (g.edges[e].from.vertex == v || g.edges[e].to.vertex == v) es.insert(e);
        vedges[v].assign(es.begin(), es.end());
        table_size[v] = static_cast<size_t>(std::pow(double(n), vedges[v].size()));
        table_offset[v + 1] = table_offset[v] + table_size[v];
    }
    std::vector<VertexTensor> tensors(table_offset[nv]);
    std::vector<cplx> rho_table(table_offset[nv]);
    auto tuple_ps = [&](int v, size_t t) {
        std::vector<double> ps(L, 0.0);
        for (int e : vedges[v]) {
            ps[e] = quad.nodes[t % n];
            t /= n;
        }
        return ps;
    };
    parallel_for(table_offset[nv], threads, [&](size_t k) {
        int v = 0;
        while (table_offset[v + 1] <= k) ++v;
        const auto ps = tuple_ps(v, k - table_offset[v]);
        tensors[k] = vertex_tensor(g, v, ps, alphas, prm, opt.N);
        rho_table[k] = vertex_rho(g, v, alphas, ps, *dz);
    });

    std::vector<double> contrib(grid), contrib_im(grid), tail(grid), level(grid), rho_re(grid), rho_im(grid);
    if (opt.keep_density) r.density.assign(grid, {});
    parallel_for(grid, threads, [&](size_t k) {
        std::vector<size_t> idx(L);
        size_t t = k;
        std::vector<double> ps(L);
        double w = 1.0;
        bool last_panel = false;
        for (int e = 0; e < L; ++e) {
            idx[e] = t % n;
            t /= n;
            ps[e] = quad.nodes[idx[e]];
            w *= quad.weights[idx[e]];
            last_panel = last_panel || quad.in_last_panel(static_cast<int>(idx[e]));
        }
        std::vector<const VertexTensor*> vt(nv);
        cplx rho = 1.0;
        for (int v = 0; v < nv; ++v) {
            size_t local = 0, mult = 1;
            for (int e : vedges[v]) {
                local += idx[e] * mult;
                mult *= n;
            }
            vt[v] = &tensors[table_offset[v] + local];
            rho *= rho_table[table_offset[v] + local];
        }
        std::vector<const GramInverseStack*> fp(L);
        for (int e = 0; e < L; ++e) fp[e] = &finv[idx[e]];
        const BlockSeries s = contract_graph(g, vt, fp, ps, prm, opt.N);
        const cplx hol = s.holomorphic(q);
        const double F2 = std::pow(s.prefactor(q) * z_prefactor, 2) * std::norm(hol);
        const cplx integrand = rho * F2;
        contrib[k] = w * integrand.real();
        contrib_im[k] = w * integrand.imag();
        tail[k] = last_panel ? contrib[k] : 0.0;
        level[k] = std::abs(hol) > 0.0 ? std::abs(contrib[k]) * std::abs(s.level_contribution(q, opt.N)) / std::abs(hol) : 0.0;
        rho_re[k] = rho.real();
        rho_im[k] = std::abs(rho) > 0.0 ? std::abs(rho.imag()) / std::abs(rho) : 0.0;
        if (opt.keep_density) {
            auto& row = r.density[k];
            row = ps;
            row.push_back(rho.real());
            row.push_back(F2);
            row.push_back(integrand.real());
        }
    });

    const double integral = pairwise_sum(contrib);
    double abs_total = 0.0;
    for (double x : contrib) abs_total += std::abs(x);
    r.value = r.prefactor * integral;
    r.imag = r.prefactor * pairwise_sum(contrib_im);
    r.tail = integral != 0.0 ? std::abs(pairwise_sum(tail) / integral) : 0.0;
    r.last_level = abs_total > 0.0 ? pairwise_sum(level) / abs_total : 0.0;
    r.min_rho = grid ? *std::min_element(rho_re.begin(), rho_re.end()) : 0.0;
    r.max_rho_imag = grid ? *std::max_element(rho_im.begin(), rho_im.end()) : 0.0;
    return r;
}

}  // namespace

Quadrature Quadrature::composite(double p_max, double panel_width, int per_panel) {
    if (!(p_max > 0.0 && panel_width > 0.0 && per_panel > 0)) throw ValidationError("quadrature needs positive P_max, panel width and node count");
    Quadrature q;
    q.p_max = p_max;
    q.panel_width = panel_width;
    q.per_panel = per_panel;
    std::vector<double> x, w;
    gauss_legendre01(per_panel, x, w);
    const int panels = static_cast<int>(std::ceil(p_max / panel_width - 1e-12));
    for (int k = 0; k < panels; ++k) {
        const double a = k * panel_width, b = std::min(p_max, (k + 1) * panel_width);
        for (int i = 0; i < per_panel; ++i) {
            q.nodes.push_back(a + (b - a) * x[i]);
            q.weights.push_back((b - a) * w[i]);
        }
    }
    return q;
}

double gluing_prefactor(int genus, int marked) {
    return std::pow(2.0, (3.0 * genus - 3.0 + marked) / 2.0) / std::pow(2.0 * kPi, 6 * genus - 6 + 2 * marked - 1);
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LCFT_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Violation> validate_graph(const AdmissibleGraph& g, const std::vector<double>& alphas, const CftParams& prm) {
    std::vector<Violation> out;
    const double Q = prm.Q();
    double total = 0.0;
    for (size_t i = 0; i < alphas.size(); ++i) {
        total += alphas[i];
        if (!(alphas[i] < Q)) out.push_back({-1, Q - alphas[i], "weight " + std::to_string(i + 1) + " must be below Q"});
    }
    for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) {
        double s = 0.0;
        for (size_t i = 0; i < g.marked.size(); ++i)
            if (g.marked[i].at.vertex == v) s += alphas[i];
        const double margin = s - (2 - g.boundary_count(v)) * Q;
        if (!(margin > 0.0)) out.push_back({v, margin, "vertex " + std::to_string(g.vertices[v].id) + " needs sum alpha > (2-b)Q"});
    }
    const double global = total + 2.0 * Q * (g.genus() - 1);
    if (!(global > 0.0)) out.push_back({-1, global, "sum alpha + 2Q(g-1) must be positive"});
    return out;
}

CorrelatorResult torus_one_point(double alpha, cplx tau, const CftParams& prm, const BootstrapOptions& opt) {
    return torus_k_point({alpha}, {0.0}, tau, prm, opt);
}

CorrelatorResult torus_k_point(const std::vector<double>& alphas, const std::vector<cplx>& x, cplx tau,
                               const CftParams& prm, const BootstrapOptions& opt) {
    const size_t k = alphas.size();
    if (k == 0 || x.size() != k) throw DimensionMismatch("torus correlator needs one position per weight");
    if (!(tau.imag() > 0.0)) throw ValidationError("Im tau must be positive");
    if (x[0] != 0.0) throw ValidationError("x_1 must be 0");
    for (size_t j = 0; j + 1 < k; ++j)
        if (!(x[j].imag() < x[j + 1].imag())) throw ValidationError("positions need increasing imaginary parts");
    if (!(x[k - 1].imag() < 2.0 * kPi * tau.imag())) throw ValidationError("Im x_k must stay below 2 pi Im tau");
    for (double a : alphas)
        if (!(a > 0.0 && a < prm.Q())) throw ValidationError("torus weights must lie in (0, Q)");
    std::vector<cplx> ac(alphas.begin(), alphas.end());
    const auto q = torus_chain_q(x, tau);
    return evaluate(torus_chain_graph(ac, q), q, alphas, {}, 1.0, prm, opt);
}

CorrelatorResult sphere_k_point(const std::vector<double>& alphas, const std::vector<cplx>& z, const CftParams& prm,
                                const BootstrapOptions& opt) {
    const size_t k = alphas.size();
    if (k < 4 || z.size() != k) throw DimensionMismatch("sphere correlator needs k >= 4 weights and k positions");
    if (z[0] != 0.0) throw ValidationError("z_1 must be 0");
    for (size_t j = 0; j + 2 < k; ++j)
        if (!(std::abs(z[j]) < std::abs(z[j + 1]))) throw ValidationError("positions need increasing moduli");
    if (!(std::abs(z[1]) < 1.0 && std::abs(z[k - 2]) > 1.0)) throw ValidationError("need |z_2| < 1 < |z_{k-1}|");
    std::vector<cplx> ac(alphas.begin(), alphas.end());
    const auto q = sphere_chain_q(z);
    return evaluate(sphere_chain_graph(ac, q), q, alphas, {}, sphere_z_prefactor(ac, z, prm), prm, opt);
}

CorrelatorResult graph_correlator(const AdmissibleGraph& g, const std::vector<cplx>& q, const std::vector<double>& alphas,
                                  const std::vector<std::optional<double>>& metric, const CftParams& prm,
                                  const BootstrapOptions& opt) {
    std::vector<double> a = alphas;
    if (a.empty())
        for (const auto& m : g.marked) a.push_back(m.alpha.real());
    return evaluate(g, q.empty() ? g.q_vector() : q, a, metric, 1.0, prm, opt);
}

AdmissibleGraph graph_from_json(const std::string& text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw GraphInvalid(std::string("graph file is not valid JSON: ") + e.what());
    }
    AdmissibleGraph g;
    std::map<int, int> index;
    auto need = [](const json& o, const char* key, const std::string& path) -> const json& {
        if (!o.is_object() || !o.contains(key)) throw GraphInvalid(path + "." + key + " is missing");
        return o.at(key);
    };
    auto slot = [&](const json& s, const std::string& path) {
        if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() || !s[1].is_number_integer())
            throw GraphInvalid(path + " must be [vertex, slot]");
        const int id = s[0].get<int>();
        if (!index.count(id)) throw GraphInvalid(path + " refers to unknown vertex " + std::to_string(id));
        return SlotRef{index[id], s[1].get<int>() - 1};
    };
    try {
        const auto& vs = need(j, "vertices", "$");
        for (size_t i = 0; i < vs.size(); ++i) {
            const std::string p = "$.vertices[" + std::to_string(i) + "]";
            GraphVertex v;
            v.id = need(vs[i], "id", p).get<int>();
            if (vs[i].contains("slots") && vs[i]["slots"].get<int>() != 3) throw GraphInvalid(p + ".slots must be 3");
            if (vs[i].contains("frame")) {
                const auto f = vs[i]["frame"].get<std::string>();
                if (f == "pant") v.frame = VertexFrame::Pant;
                else if (f == "radial") v.frame = VertexFrame::Radial;
                else if (f != "auto") throw GraphInvalid(p + ".frame must be auto, pant or radial");
            }
            if (vs[i].contains("metric")) v.metric = vs[i]["metric"].get<double>();
            if (index.count(v.id)) throw GraphInvalid(p + ".id is duplicated");
            index[v.id] = static_cast<int>(g.vertices.size());
            g.vertices.push_back(v);
        }
        if (j.contains("edges"))
            for (size_t i = 0; i < j["edges"].size(); ++i) {
                const std::string p = "$.edges[" + std::to_string(i) + "]";
                const auto& e = j["edges"][i];
                GraphEdge ge;
                ge.from = slot(need(e, "from", p), p + ".from");
                ge.to = slot(need(e, "to", p), p + ".to");
                const auto& q = need(e, "q", p);
                if (q.is_array()) ge.q = cplx(q.at(0).get<double>(), q.at(1).get<double>());
                else if (q.is_object()) ge.q = cplx(need(q, "re", p + ".q").get<double>(), q.value("im", 0.0));
                else ge.q = q.get<double>();
                g.edges.push_back(ge);
            }
        if (j.contains("marked"))
            for (size_t i = 0; i < j["marked"].size(); ++i) {
                const std::string p = "$.marked[" + std::to_string(i) + "]";
                const auto& m = j["marked"][i];
                GraphMarked gm;
                gm.at = slot(json::array({need(m, "vertex", p), need(m, "slot", p)}), p);
                gm.alpha = need(m, "alpha", p).get<double>();
                g.marked.push_back(gm);
            }
    } catch (const json::exception& e) {
        throw GraphInvalid(std::string("graph file has a field of the wrong type: ") + e.what());
    }
    g.check();
    return g;
}

std::string graph_to_json(const AdmissibleGraph& g) {
    using nlohmann::json;
    json j;
    j["vertices"] = json::array();
    for (const auto& v : g.vertices) {
        json o{{"id", v.id}, {"slots", 3}};
        if (v.frame == VertexFrame::Pant) o["frame"] = "pant";
        if (v.frame == VertexFrame::Radial) o["frame"] = "radial";
        if (v.metric) o["metric"] = *v.metric;
        j["vertices"].push_back(o);
    }
    j["edges"] = json::array();
    for (const auto& e : g.edges)
        j["edges"].push_back({{"from", {g.vertices[e.from.vertex].id, e.from.slot + 1}},
                              {"to", {g.vertices[e.to.vertex].id, e.to.slot + 1}},
                              {"q", {e.q.real(), e.q.imag()}}});
    j["marked"] = json::array();
    for (const auto& m : g.marked)
        j["marked"].push_back({{"vertex", g.vertices[m.at.vertex].id}, {"slot", m.at.slot + 1}, {"alpha", m.alpha.real()}});
    return j.dump(2);
}

void write_density_csv(const std::string& path, const CorrelatorResult& r) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path);
    for (int e = 0; e < r.edges; ++e) out << "p" << e + 1 << ",";
    out << "rho,F2,integrand\n";
    out.precision(17);
    for (const auto& row : r.density) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

}  // namespace lcft
