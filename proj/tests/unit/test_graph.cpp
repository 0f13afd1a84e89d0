#include <gtest/gtest.h>

#include "lcft/dozz.hpp"
#include "lcft/errors.hpp"
#include "lcft/graph.hpp"

using namespace lcft;

namespace {

void expect_same_series(const BlockSeries& a, const BlockSeries& b, double tol) {
    ASSERT_EQ(a.coeffs.size(), b.coeffs.size());
    for (const auto& [n, v] : a.coeffs) EXPECT_LT(std::abs(v - b.coeffs.at(n)), tol * (1.0 + std::abs(v)));
    ASSERT_EQ(a.abs_exponent.size(), b.abs_exponent.size());
    for (size_t i = 0; i < a.abs_exponent.size(); ++i) EXPECT_NEAR(a.abs_exponent[i], b.abs_exponent[i], 1e-14);
}

}  // namespace

TEST(Graph, SingleAnnulusIsTorusOnePoint) {
    CftParams prm{1.2, 1.0};
    auto g = torus_chain_graph({0.9}, {cplx(0.1, 0.0)});
    auto s = graph_block(g, {}, {0.6}, prm, {5, 1e10});
    expect_same_series(s, torus_one_point_block(0.9, 0.6, prm, {5, 1e10}), 1e-12);
}

TEST(Graph, TorusChainAgrees) {
    CftParams prm;
    const std::vector<cplx> a{0.7, cplx(1.1, 0.1), 0.5};
    const std::vector<double> p{0.4, 0.9, 1.3};
    auto g = torus_chain_graph(a, {0.1, 0.1, 0.1});
    expect_same_series(graph_block(g, {}, p, prm, {3, 1e10}), chain_block(ChainKind::Torus, a, p, prm, {3, 1e10}), 1e-12);
}

TEST(Graph, SphereChainAgrees) {
    CftParams prm{1.1, 1.0};
    const std::vector<cplx> a{0.8, 1.0, cplx(0.9, 0.2), 1.2, 0.7};
    const std::vector<double> p{0.5, 1.1};
    auto g = sphere_chain_graph(a, {0.2, 0.2});
    auto s = graph_block(g, {}, p, prm, {4, 1e10});
    auto c = chain_block(ChainKind::Sphere, a, p, prm, {4, 1e10});
    ASSERT_EQ(s.coeffs.size(), c.coeffs.size());
    for (const auto& [n, v] : c.coeffs) EXPECT_LT(std::abs(v - s.coeffs.at(n)), 1e-12 * (1.0 + std::abs(v)));
}

TEST(Graph, GenusTwoMatchesDirectFormula) {
    CftParams prm;
    const double c = prm.c_L();
    const std::vector<double> p{0.6, 0.9, 1.4};  // graph edges e1, e2 (loop at P2), e3 (loop at P1)
    const int N = 2;
    auto g = genus_two_graph({cplx(0.1), cplx(0.1), cplx(0.1)});
    auto s = graph_block(g, {}, p, prm, {N, 1e10});

    auto D = [&](double x) { return conformal_weight(cplx(prm.Q(), x), prm); };
    auto w1 = pant_tensor({D(p[0]), D(p[2]), D(p[2])}, c, {N, N, N});
    auto w2 = pant_tensor({D(p[0]), D(p[1]), D(p[1])}, c, {N, N, N});
    auto f1 = gram_inverse_stack(D(p[0]), c, N), f2 = gram_inverse_stack(D(p[1]), c, N), f3 = gram_inverse_stack(D(p[2]), c, N);
    const LevelBasis B(N);
    for (int n1 = 0; n1 <= N; ++n1)
        for (int n2 = 0; n2 <= N; ++n2)
            for (int n3 = 0; n3 <= N; ++n3) {
                // sum F1^{-1}(a,a') F2^{-1}(b,b') F3^{-1}(e,e') w2[a', b', b] w1[a, e', e]
                cplx want = 0.0;
                for (int a = 0; a < B.count(n1); ++a)
                    for (int ap = 0; ap < B.count(n1); ++ap)
                        for (int b = 0; b < B.count(n2); ++b)
                            for (int bp = 0; bp < B.count(n2); ++bp)
                                for (int e = 0; e < B.count(n3); ++e)
                                    for (int ep = 0; ep < B.count(n3); ++ep) {
                                        const int A = B.offset[n1] + a, Ap = B.offset[n1] + ap;
                                        const int Bb = B.offset[n2] + b, Bp = B.offset[n2] + bp;
                                        const int E = B.offset[n3] + e, Ep = B.offset[n3] + ep;
                                        want += f1.inv[n1](a, ap) * f2.inv[n2](b, bp) * f3.inv[n3](e, ep) *
                                                w2.at({Ap, Bp, Bb}) * w1.at({A, Ep, E});
                                    }
                EXPECT_LT(std::abs(s.coeffs.at({n1, n2, n3}) - want), 1e-10 * (1.0 + std::abs(want)));
            }
    EXPECT_EQ(s.coeffs.at({0, 0, 0}), cplx(1.0));
}

TEST(Graph, SeriesIsHolomorphicInQ1) {
    CftParams prm;
    auto g = genus_two_graph({cplx(0.1), cplx(0.1), cplx(0.1)});
    auto s = graph_block(g, {}, {0.6, 0.9, 1.4}, prm, {2, 1e10});
    std::vector<cplx> q{cplx(0.12, 0.05), cplx(0.2, -0.1), cplx(-0.1, 0.15)};
    const double h = 1e-5;
    auto at = [&](cplx dq) {
        auto qq = q;
        qq[0] += dq;
        return s.holomorphic(qq);
    };
    const cplx dx = (at(h) - at(-h)) / (2.0 * h), dy = (at(cplx(0, h)) - at(cplx(0, -h))) / (2.0 * h);
    EXPECT_LT(std::abs(dy - cplx(0.0, 1.0) * dx), 1e-6);
}

TEST(Graph, Rho) {
    CftParams prm;
    DozzEvaluator dz(prm);
    const double Q = prm.Q();
    auto t = torus_chain_graph({1.2}, {0.1});
    EXPECT_LT(std::abs(graph_rho(t, {}, {0.7}, dz) - rho_torus_one_point(dz, 1.2, 0.7)), 1e-12);
    const std::vector<cplx> a{1.1, 1.2, 0.9, 1.3, 1.0};
    auto sph = sphere_chain_graph(a, {0.1, 0.1});
    const cplx r = graph_rho(sph, {}, {0.5, 0.8}, dz), want = rho_sphere_k(dz, a, {0.5, 0.8});
    EXPECT_LT(std::abs(r - want), 1e-12 * std::abs(want));
    auto g2 = genus_two_graph({cplx(0.1), cplx(0.1), cplx(0.1)});
    // graph labels: e3 is the loop at the first pant
    const double p1 = 0.4, p2 = 0.9, p3 = 1.3;
    const cplx printed = dz(cplx(Q, -p1), cplx(Q, -p3), cplx(Q, p3)) * dz(cplx(Q, p1), cplx(Q, p2), cplx(Q, -p2));
    EXPECT_LT(std::abs(graph_rho(g2, {}, {p1, p2, p3}, dz) - printed), 1e-12 * std::abs(printed));
}

TEST(Graph, Validation) {
    auto g = genus_two_graph({cplx(0.1), cplx(0.1), cplx(0.1)});
    EXPECT_NO_THROW(g.check());
    EXPECT_EQ(g.genus(), 2);
    auto twice = g;
    twice.edges[1].to = {1, 1};
    EXPECT_THROW(twice.check(), GraphInvalid);
    auto unused = g;
    unused.edges.pop_back();
    EXPECT_THROW(unused.check(), GraphInvalid);
    AdmissibleGraph split;
    split.vertices = {{1, VertexFrame::Auto, {}}, {2, VertexFrame::Auto, {}}};
    split.edges = {{{0, 0}, {0, 1}, 0.1}, {{1, 0}, {1, 1}, 0.1}};
    split.marked = {{{0, 2}, 1.0}, {{1, 2}, 1.0}};
    EXPECT_THROW(split.check(), GraphInvalid);
    auto radial = g;
    radial.vertices[0].frame = VertexFrame::Radial;
    EXPECT_THROW(radial.check(), GraphInvalid);
    EXPECT_THROW(graph_block(g, {}, {0.5, 0.5}, CftParams{}), DimensionMismatch);
}

TEST(Graph, MetricConstantsReproduceChainPrefactors) {
    const double e = std::exp(1.0), pi = 3.14159265358979323846;
    auto pref = [&](const AdmissibleGraph& g) {
        const int gg = g.genus(), m = g.marked_count();
        double c = std::pow(2.0, (3.0 * gg - 3.0 + m) / 2.0) / std::pow(2.0 * pi, 6 * gg - 6 + 2 * m - 1);
        for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) c *= default_metric_constant(g, v);
        return c;
    };
    EXPECT_NEAR(pref(torus_chain_graph({1.0}, {0.1})) * 2.0 * e, 1.0, 1e-14);
    for (int k = 2; k <= 4; ++k) {
        auto g = torus_chain_graph(std::vector<cplx>(k, 1.0), std::vector<cplx>(k, 0.1));
        EXPECT_NEAR(pref(g) * std::pow(2.0, 2 * k - 1) * std::pow(pi, k - 1) * std::pow(e, k), 1.0, 1e-13);
    }
    const double zd = disk_partition_constant();
    for (int k = 4; k <= 6; ++k) {
        auto g = sphere_chain_graph(std::vector<cplx>(k, 1.0), std::vector<cplx>(k - 3, 0.1));
        const double want = std::pow(2.0, -1.5) * zd * zd / (std::pow(2.0 * pi, k - 3) * std::pow(2.0 * e, k - 4));
        EXPECT_NEAR(pref(g) / want, 1.0, 1e-13);
    }
}
