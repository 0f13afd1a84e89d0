#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "lcft/blocks.hpp"

namespace lcft {

struct SlotRef {
    int vertex = 0;  // position in AdmissibleGraph::vertices
    int slot = 0;    // 0..2
};

// Linking edge; the `from` end carries Q - ip, the `to` end Q + ip.
struct GraphEdge {
    SlotRef from, to;
    cplx q{0.0, 0.0};
};

struct GraphMarked {
    SlotRef at;
    cplx alpha{0.0, 0.0};
};

enum class VertexFrame { Auto, Pant, Radial };

struct GraphVertex {
    int id = 0;
    VertexFrame frame = VertexFrame::Auto;
    std::optional<double> metric;  // overrides the default metric constant
};

struct AdmissibleGraph {
    std::vector<GraphVertex> vertices;
    std::vector<GraphEdge> edges;
    std::vector<GraphMarked> marked;

    enum class Use { None, From, To, Marked };
    struct SlotUse {
        Use kind = Use::None;
        int index = -1;  // edge or marked index
    };

    // throws GraphInvalid
    void check() const;
    std::array<SlotUse, 3> slot_use(int v) const;
    int boundary_count(int v) const;
    int genus() const { return static_cast<int>(edges.size()) - static_cast<int>(vertices.size()) + 1; }
    int marked_count() const { return static_cast<int>(marked.size()); }
    std::vector<cplx> q_vector() const;
    std::vector<cplx> alphas() const;
};

// Annulus torus with k marked points, vertex j = (p_j in, p_{j-1} out, alpha_j).
AdmissibleGraph torus_chain_graph(const std::vector<cplx>& alphas, const std::vector<cplx>& q);
// Sphere with k >= 4 marked points: disk, k-4 annuli, disk; q has k-3 entries.
AdmissibleGraph sphere_chain_graph(const std::vector<cplx>& alphas, const std::vector<cplx>& q);
// Two pants: e1 = (v11, v21), e2 = (v22, v23), e3 = (v12, v13).
AdmissibleGraph genus_two_graph(const std::array<cplx, 3>& q);

// Metric constant used at vertex v when no override is given:
// disk Z_D/2, annulus pi/(sqrt 2 e), pant 1.
double default_metric_constant(const AdmissibleGraph& g, int v);
double disk_partition_constant();  // Z_D

// Holomorphic tensor of vertex v: one axis per edge end, in slot order.
struct VertexTensor {
    BlockCoeffTensor tensor;
    std::vector<int> axis_edge;
    std::vector<bool> axis_to;
};
VertexTensor vertex_tensor(const AdmissibleGraph& g, int v, const std::vector<double>& ps,
                           const std::vector<cplx>& alphas, const CftParams& prm, int N);

// Contract vertex tensors over the edges with F^{-1} of each edge momentum.
BlockSeries contract_graph(const AdmissibleGraph& g, const std::vector<const VertexTensor*>& vt,
                           const std::vector<const GramInverseStack*>& finv, const std::vector<double>& ps,
                           const CftParams& prm, int N);

BlockSeries graph_block(const AdmissibleGraph& g, const std::vector<cplx>& alphas, const std::vector<double>& ps,
                        const CftParams& prm, const BlockOptions& opt = {});

// DOZZ product over vertices (metric constants not included).
class DozzEvaluator;
// DOZZ factor of a single vertex
cplx vertex_rho(const AdmissibleGraph& g, int v, const std::vector<cplx>& alphas, const std::vector<double>& ps,
                const DozzEvaluator& dz);
cplx graph_rho(const AdmissibleGraph& g, const std::vector<cplx>& alphas, const std::vector<double>& ps,
               const DozzEvaluator& dz);

}  // namespace lcft
