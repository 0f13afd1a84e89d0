#include "lcft/graph.hpp"

#include <cmath>
#include <queue>

#include "lcft/dozz.hpp"
#include "lcft/errors.hpp"

namespace lcft {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string where(const SlotRef& s) {
    return "vertex " + std::to_string(s.vertex) + " slot " + std::to_string(s.slot + 1);
}
}  // namespace

void AdmissibleGraph::check() const {
    const int nv = static_cast<int>(vertices.size());
    if (nv == 0) throw GraphInvalid("graph has no vertices");
    for (int i = 0; i < nv; ++i)
        for (int j = i + 1; j < nv; ++j)
            if (vertices[i].id == vertices[j].id) throw GraphInvalid("duplicate vertex id " + std::to_string(vertices[i].id));
    std::vector<std::array<int, 3>> used(nv, {0, 0, 0});
    auto mark = [&](const SlotRef& s) {
        if (s.vertex < 0 || s.vertex >= nv || s.slot < 0 || s.slot > 2) throw GraphInvalid("slot out of range: " + where(s));
        if (++used[s.vertex][s.slot] > 1) throw GraphInvalid("slot used twice: " + where(s));
    };
    for (const auto& e : edges) {
        mark(e.from);
        mark(e.to);
    }
    for (const auto& m : marked) mark(m.at);
    for (int v = 0; v < nv; ++v)
        for (int s = 0; s < 3; ++s)
            if (used[v][s] == 0) throw GraphInvalid("slot unused: " + where({v, s}));
    std::vector<std::vector<int>> adj(nv);
    for (const auto& e : edges) {
        adj[e.from.vertex].push_back(e.to.vertex);
        adj[e.to.vertex].push_back(e.from.vertex);
    }
    std::vector<bool> seen(nv, false);
    std::queue<int> todo;
    todo.push(0);
    seen[0] = true;
    int count = 1;
    while (!todo.empty()) {
        int v = todo.front();
        todo.pop();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = true;
                ++count;
                todo.push(w);
            }
    }
    if (count != nv) throw GraphInvalid("graph is not connected");
    for (int v = 0; v < nv; ++v)
        if (vertices[v].frame == VertexFrame::Radial && boundary_count(v) == 3)
            throw GraphInvalid("radial frame needs a marked point at vertex " + std::to_string(vertices[v].id));
}

std::array<AdmissibleGraph::SlotUse, 3> AdmissibleGraph::slot_use(int v) const {
    std::array<SlotUse, 3> u{};
    for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
        if (edges[i].from.vertex == v) u[edges[i].from.slot] = {Use::From, i};
        if (edges[i].to.vertex == v) u[edges[i].to.slot] = {Use::To, i};
    }
    for (int i = 0; i < static_cast<int>(marked.size()); ++i)
        if (marked[i].at.vertex == v) u[marked[i].at.slot] = {Use::Marked, i};
    return u;
}

int AdmissibleGraph::boundary_count(int v) const {
    int b = 0;
    for (const auto& e : edges) b += (e.from.vertex == v) + (e.to.vertex == v);
    return b;
}

std::vector<cplx> AdmissibleGraph::q_vector() const {
    std::vector<cplx> q;
    for (const auto& e : edges) q.push_back(e.q);
    return q;
}

std::vector<cplx> AdmissibleGraph::alphas() const {
    std::vector<cplx> a;
    for (const auto& m : marked) a.push_back(m.alpha);
    return a;
}

AdmissibleGraph torus_chain_graph(const std::vector<cplx>& alphas, const std::vector<cplx>& q) {
    const int k = static_cast<int>(alphas.size());
    if (k < 1 || static_cast<int>(q.size()) != k) throw DimensionMismatch("torus chain needs k weights and k moduli");
    AdmissibleGraph g;
    for (int j = 0; j < k; ++j) {
        g.vertices.push_back({j + 1, VertexFrame::Auto, std::nullopt});
        g.edges.push_back({{(j + 1) % k, 1}, {j, 0}, q[j]});
        g.marked.push_back({{j, 2}, alphas[j]});
    }
    return g;
}

AdmissibleGraph sphere_chain_graph(const std::vector<cplx>& alphas, const std::vector<cplx>& q) {
    const int k = static_cast<int>(alphas.size());
    if (k < 4 || static_cast<int>(q.size()) != k - 3)
        throw DimensionMismatch("sphere chain needs k >= 4 weights and k-3 moduli");
    AdmissibleGraph g;
    const int nv = k - 2;
    for (int v = 0; v < nv; ++v) g.vertices.push_back({v + 1, VertexFrame::Auto, std::nullopt});
    g.marked.push_back({{0, 0}, alphas[0]});
    g.marked.push_back({{0, 1}, alphas[1]});
    for (int v = 1; v + 1 < nv; ++v) g.marked.push_back({{v, 2}, alphas[v + 1]});
    g.marked.push_back({{nv - 1, 0}, alphas[k - 1]});
    g.marked.push_back({{nv - 1, 1}, alphas[k - 2]});
    for (int e = 0; e < k - 3; ++e) {
        SlotRef from{e, e == 0 ? 2 : 1};
        SlotRef to{e + 1, e + 1 == nv - 1 ? 2 : 0};
        g.edges.push_back({from, to, q[e]});
    }
    return g;
}

AdmissibleGraph genus_two_graph(const std::array<cplx, 3>& q) {
    AdmissibleGraph g;
    g.vertices = {{1, VertexFrame::Auto, std::nullopt}, {2, VertexFrame::Auto, std::nullopt}};
    g.edges = {{{0, 0}, {1, 0}, q[0]}, {{1, 1}, {1, 2}, q[1]}, {{0, 1}, {0, 2}, q[2]}};
    return g;
}

double disk_partition_constant() {
    return std::exp(0.25) * std::pow(2.0, 1.0 / 12.0) * std::pow(kPi, 0.25) * std::exp(5.0 / 24.0 + kZetaPrimeMinusOne);
}

double default_metric_constant(const AdmissibleGraph& g, int v) {
    switch (g.boundary_count(v)) {
        case 1: return 0.5 * disk_partition_constant();
        case 2: return kPi / (std::sqrt(2.0) * std::exp(1.0));
        default: return 1.0;
    }
}

namespace {

BlockCoeffTensor drop_primary_axes(BlockCoeffTensor t, const std::array<AdmissibleGraph::SlotUse, 3>& use) {
    BlockCoeffTensor r;
    r.kind = t.kind;
    r.data = std::move(t.data);
    for (int s = 0; s < 3; ++s)
        if (use[s].kind != AdmissibleGraph::Use::Marked) {
            r.levels.push_back(t.levels[s]);
            r.bases.push_back(t.bases[s]);
        }
    return r;
}

}  // namespace

VertexTensor vertex_tensor(const AdmissibleGraph& g, int v, const std::vector<double>& ps,
                           const std::vector<cplx>& alphas, const CftParams& prm, int N) {
    using Use = AdmissibleGraph::Use;
    const auto use = g.slot_use(v);
    const double c = prm.c_L();
    std::array<cplx, 3> d{};
    std::vector<int> edge_slots, marked_slots;
    VertexTensor vt;
    for (int s = 0; s < 3; ++s) {
        if (use[s].kind == Use::Marked) {
            d[s] = conformal_weight(alphas[use[s].index], prm);
            marked_slots.push_back(s);
        } else {
            d[s] = conformal_weight(cplx(prm.Q(), ps[use[s].index]), prm);
            edge_slots.push_back(s);
            vt.axis_edge.push_back(use[s].index);
            vt.axis_to.push_back(use[s].kind == Use::To);
        }
    }
    const int b = static_cast<int>(edge_slots.size());
    const bool pant = b == 3 || g.vertices[v].frame == VertexFrame::Pant;
    if (b == 0) {
        vt.tensor.data = {1.0};
    } else if (pant) {
        std::array<int, 3> Ns{};
        for (int s : edge_slots) Ns[s] = N;
        vt.tensor = drop_primary_axes(pant_tensor(d, c, Ns), use);
    } else if (b == 2) {
        vt.tensor = annulus_tensor(d[edge_slots[0]], d[marked_slots[0]], d[edge_slots[1]], c, N);
    } else {
        // lower marked slot at the center, the other at 1
        vt.tensor = disk_tensor(d[edge_slots[0]], d[marked_slots[1]], d[marked_slots[0]], c, N);
    }
    return vt;
}

BlockSeries contract_graph(const AdmissibleGraph& g, const std::vector<const VertexTensor*>& vt,
                           const std::vector<const GramInverseStack*>& finv, const std::vector<double>& ps,
                           const CftParams& prm, int N) {
    const int L = static_cast<int>(g.edges.size());
    const int nv = static_cast<int>(g.vertices.size());
    const LevelBasis basis(N);
    const int D = basis.size();

    // fold F^{-1} into the `to` end of every edge
    std::vector<std::vector<cplx>> data(nv);
    std::vector<std::vector<size_t>> stride(nv);
    for (int v = 0; v < nv; ++v) {
        const auto& t = vt[v]->tensor;
        data[v] = t.data;
        const int r = t.rank();
        stride[v].assign(r, 1);
        for (int a = r - 2; a >= 0; --a) stride[v][a] = stride[v][a + 1] * D;
        for (int a = 0; a < r; ++a) {
            if (!vt[v]->axis_to[a]) continue;
            const auto& inv = finv[vt[v]->axis_edge[a]]->inv;
            const size_t st = stride[v][a];
            std::vector<cplx> out(data[v].size(), 0.0);
            for (size_t flat = 0; flat < data[v].size(); ++flat) {
                const int idx = static_cast<int>((flat / st) % D);
                int lvl = 0;
                while (basis.offset[lvl + 1] <= idx) ++lvl;
                const int i = idx - basis.offset[lvl];
                const size_t base = flat - size_t(idx) * st;
                for (int j = 0; j < basis.count(lvl); ++j)
                    out[base + size_t(basis.offset[lvl] + j) * st] += data[v][flat] * inv[lvl](i, j);
            }
            data[v] = std::move(out);
        }
    }

    BlockSeries s;
    s.N = N;
    for (int e = 0; e < L; ++e) s.abs_exponent.push_back(-prm.c_L() / 24.0 + conformal_weight(cplx(prm.Q(), ps[e]), prm).real());

    std::vector<int> n(L, 0), a(L, 0);
    while (true) {
        cplx sum = 0.0;
        for (int e = 0; e < L; ++e) a[e] = basis.offset[n[e]];
        while (true) {
            cplx prod = 1.0;
            for (int v = 0; v < nv && prod != 0.0; ++v) {
                size_t flat = 0;
                for (size_t ax = 0; ax < stride[v].size(); ++ax) flat += stride[v][ax] * a[vt[v]->axis_edge[ax]];
                prod *= data[v][flat];
            }
            sum += prod;
            int e = 0;
            while (e < L && a[e] + 1 == basis.offset[n[e] + 1]) {
                a[e] = basis.offset[n[e]];
                ++e;
            }
            if (e == L) break;
            ++a[e];
        }
        s.coeffs[n] = sum;
        int e = 0;
        while (e < L && n[e] == N) n[e++] = 0;
        if (e == L) break;
        ++n[e];
    }
    return s;
}

BlockSeries graph_block(const AdmissibleGraph& g, const std::vector<cplx>& alphas_in, const std::vector<double>& ps,
                        const CftParams& prm, const BlockOptions& opt) {
    g.check();
    const std::vector<cplx> alphas = alphas_in.empty() ? g.alphas() : alphas_in;
    if (alphas.size() != g.marked.size()) throw DimensionMismatch("one weight per marked point expected");
    if (ps.size() != g.edges.size()) throw DimensionMismatch("one momentum per linking edge expected");
    std::vector<GramInverseStack> finv;
    for (double p : ps) finv.push_back(gram_inverse_stack(conformal_weight(cplx(prm.Q(), p), prm), prm.c_L(), opt.N, opt.cond_guard));
    std::vector<VertexTensor> vt;
    for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) vt.push_back(vertex_tensor(g, v, ps, alphas, prm, opt.N));
    std::vector<const VertexTensor*> vp;
    for (const auto& t : vt) vp.push_back(&t);
    std::vector<const GramInverseStack*> fp;
    for (const auto& f : finv) fp.push_back(&f);
    return contract_graph(g, vp, fp, ps, prm, opt.N);
}

cplx vertex_rho(const AdmissibleGraph& g, int v, const std::vector<cplx>& alphas, const std::vector<double>& ps,
                const DozzEvaluator& dz) {
    using Use = AdmissibleGraph::Use;
    const double Q = dz.params().Q();
    const auto use = g.slot_use(v);
    std::array<cplx, 3> arg;
    for (int s = 0; s < 3; ++s) {
        switch (use[s].kind) {
            case Use::From: arg[s] = cplx(Q, -ps[use[s].index]); break;
            case Use::To: arg[s] = cplx(Q, ps[use[s].index]); break;
            default: arg[s] = alphas[use[s].index]; break;
        }
    }
    return dz(arg[0], arg[1], arg[2]);
}

cplx graph_rho(const AdmissibleGraph& g, const std::vector<cplx>& alphas_in, const std::vector<double>& ps,
               const DozzEvaluator& dz) {
    const std::vector<cplx> alphas = alphas_in.empty() ? g.alphas() : alphas_in;
    cplx rho = 1.0;
    for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) rho *= vertex_rho(g, v, alphas, ps, dz);
    return rho;
}

}  // namespace lcft
