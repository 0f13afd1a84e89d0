#include <gtest/gtest.h>

#include "lcft/virasoro.hpp"
#include "oracles.hpp"

using namespace lcft;
using oracle::Rational;

TEST(Partitions, CountsAndOrder) {
    ASSERT_EQ(partitions(0).size(), 1u);
    EXPECT_TRUE(partitions(0)[0].empty());
    ASSERT_EQ(partitions(1).size(), 1u);
    EXPECT_EQ(partitions(1)[0], YoungDiagram({1}));
    EXPECT_EQ(partitions(4).size(), 5u);
    for (int n = 0; n <= 10; ++n) {
        auto prod = partitions(n);
        auto ref = oracle::partitions_bruteforce(n);
        ASSERT_EQ(prod.size(), ref.size());
        EXPECT_EQ(static_cast<int>(prod.size()), partition_count(n));
        for (size_t i = 0; i < ref.size(); ++i) {
            EXPECT_EQ(prod[i].parts, ref[i]);
            EXPECT_TRUE(prod[i].valid());
        }
    }
    auto p3 = partitions(3);
    EXPECT_EQ(p3[0], YoungDiagram({3}));
    EXPECT_EQ(p3[1], YoungDiagram({2, 1}));
    EXPECT_EQ(p3[2], YoungDiagram({1, 1, 1}));
}

TEST(Weights, ConformalAndKac) {
    CftParams p(std::sqrt(2.0), 1.0);
    EXPECT_EQ(conformal_weight(0.0, p), cplx(0.0));
    EXPECT_NEAR(std::abs(conformal_weight(p.gamma, p) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(conformal_weight(cplx(p.Q(), 1.0), p) - 1.375), 0.0, 1e-14);
    EXPECT_NEAR(p.c_L(), 28.0, 1e-13);
    EXPECT_NEAR(kac_weight(1, 1, p), 0.0, 1e-15);
    EXPECT_NEAR(kac_weight(2, 1, p), -p.gamma / 2.0, 1e-15);
    EXPECT_NEAR(kac_weight(1, 2, p), -2.0 / p.gamma, 1e-15);
}

TEST(ApplyVirasoro, Examples) {
    const cplx D(0.7, 0.2), c(28.0);
    auto v1 = VermaVector<cplx>::basis(YoungDiagram{1});
    auto r0 = apply_virasoro(0, v1, D, c);
    EXPECT_EQ(r0.coeffs.size(), 1u);
    EXPECT_EQ(r0.coeff(YoungDiagram{1}), D + 1.0);
    auto r1 = apply_virasoro(1, v1, D, c);
    EXPECT_EQ(r1.grade, 0);
    EXPECT_EQ(r1.coeff(YoungDiagram{}), 2.0 * D);
    auto r2 = apply_virasoro(2, VermaVector<cplx>::basis(YoungDiagram{2}), D, c);
    EXPECT_EQ(r2.coeff(YoungDiagram{}), 4.0 * D + c / 2.0);
}

TEST(ApplyVirasoro, Grading) {
    VermaModule<cplx> mod(cplx(0.31, -0.4), cplx(27.5));
    for (int lvl = 0; lvl <= 5; ++lvl)
        for (const auto& nu : partitions(lvl))
            for (int n = -3; n <= 4; ++n) {
                const auto& r = mod.apply_basis(n, nu);
                for (const auto& [mu, a] : r.coeffs) {
                    EXPECT_EQ(mu.level(), lvl - n);
                    EXPECT_TRUE(mu.valid());
                }
            }
}

TEST(ApplyVirasoro, CommutatorHolds) {
    // [L_n, L_m] v = (n-m) L_{n+m} v + c/12 (n^3-n) delta v on a random level-3 vector
    const cplx D(0.45, 0.1), c(26.5);
    VermaModule<cplx> mod(D, c);
    VermaVector<cplx> v;
    v.grade = 3;
    v.coeffs[YoungDiagram{3}] = cplx(0.3, 0.1);
    v.coeffs[YoungDiagram{2, 1}] = cplx(-1.2, 0.0);
    v.coeffs[YoungDiagram{1, 1, 1}] = cplx(0.5, 0.7);
    for (int n = -3; n <= 3; ++n)
        for (int m = -3; m <= 3; ++m) {
            auto lhs = mod.apply(n, mod.apply(m, v));
            lhs.axpy(-1.0, mod.apply(m, mod.apply(n, v)));
            auto rhs = mod.apply(n + m, v);
            VermaVector<cplx> diff;
            diff.axpy(cplx(n - m), rhs);
            if (n == -m) diff.axpy(c * double(n * n * n - n) / 12.0, v);
            diff.axpy(-1.0, lhs);
            for (const auto& [k, a] : diff.coeffs) EXPECT_LT(std::abs(a), 1e-12) << n << " " << m;
        }
}

TEST(Shapovalov, LowLevels) {
    const cplx D(0.8, 0.3);
    const double c = 28.0;
    auto g0 = shapovalov(D, c, 0);
    EXPECT_EQ(g0.F(0, 0), cplx(1.0));
    auto g1 = shapovalov(D, c, 1);
    EXPECT_EQ(g1.F(0, 0), 2.0 * D);
    auto g2 = shapovalov(D, c, 2);
    EXPECT_LT(std::abs(g2.F(0, 0) - (4.0 * D + c / 2.0)), 1e-14);
    EXPECT_LT(std::abs(g2.F(0, 1) - 6.0 * D), 1e-14);
    EXPECT_LT(std::abs(g2.F(1, 1) - (8.0 * D * D + 4.0 * D)), 1e-14);
    // Kac zero at level 1
    CftParams p(std::sqrt(2.0), 1.0);
    auto gk = shapovalov(conformal_weight(kac_weight(1, 1, p), p), p.c_L(), 1);
    EXPECT_EQ(gk.F.determinant(), cplx(0.0));
}

TEST(Shapovalov, ExactRationalOracle) {
    const std::pair<Rational, Rational> cases[] = {
        {Rational(3, 8), Rational(28)}, {Rational(5, 4), Rational(51, 2)}, {Rational(-7, 16), Rational(26)}};
    for (const auto& [D, c] : cases) {
        for (int n = 1; n <= 3; ++n) {
            auto basis = partitions(n);
            std::vector<std::vector<int>> raw;
            for (auto& b : basis) raw.push_back(b.parts);
            auto ref = oracle::gram_matrix(D, c, raw);
            double Dd = boost::rational_cast<double>(D), cd = boost::rational_cast<double>(c);
            auto g = shapovalov(cplx(Dd), cd, n);
            for (size_t i = 0; i < raw.size(); ++i)
                for (size_t j = 0; j < raw.size(); ++j) {
                    EXPECT_EQ(g.F(i, j).real(), boost::rational_cast<double>(ref[i][j]));
                    EXPECT_EQ(g.F(i, j).imag(), 0.0);
                }
            // the production template run on exact rationals agrees exactly too
            VermaModule<Rational> rm(D, c);
            auto exact = shapovalov_generic(rm, basis);
            EXPECT_EQ(exact, ref);
        }
    }
}

TEST(Shapovalov, BitwiseSymmetric) {
    auto g = shapovalov(cplx(0.37, 0.21), 27.3, 5);
    EXPECT_TRUE(g.F == g.F.transpose());
}

TEST(Shapovalov, KacVanishing) {
    CftParams p(std::sqrt(2.0), 1.0);
    for (int n = 1; n <= 4; ++n)
        for (int r = 1; r <= n; ++r)
            for (int s = 1; r * s <= n; ++s) {
                cplx D = conformal_weight(kac_weight(r, s, p), p);
                EXPECT_LE(normalized_determinant(shapovalov(D, p.c_L(), n)), 1e-8) << r << s << n;
                EXPECT_GT(normalized_determinant(shapovalov(D + 0.5, p.c_L(), n)), 1e-10) << r << s << n;
            }
}

TEST(Shapovalov, PositiveOnSpectrumLine) {
    CftParams p(std::sqrt(2.0), 1.0);
    for (double pp : {0.05, 0.3, 0.7, 1.5, 3.0})
        for (int n = 1; n <= 4; ++n) {
            auto g = shapovalov(conformal_weight(cplx(p.Q(), pp), p), p.c_L(), n);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.F.real());
            EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
            auto inv = shapovalov_inverse(g);
            EXPECT_TRUE(inv.used_cholesky);
            EXPECT_LT(inv.residual, 1e-12);
        }
}

TEST(Shapovalov, InverseAndGuard) {
    auto g1 = shapovalov(cplx(0.6), 28.0, 1);
    EXPECT_LT(std::abs(shapovalov_inverse(g1).inv(0, 0) - 1.0 / 1.2), 1e-15);
    CftParams p(std::sqrt(2.0), 1.0);
    auto g3 = shapovalov(conformal_weight(cplx(p.Q(), 0.7), p), p.c_L(), 3);
    auto inv = shapovalov_inverse(g3);
    EXPECT_LT(inv.residual, 1e-12);
    auto gk = shapovalov(conformal_weight(kac_weight(1, 2, p), p), p.c_L(), 2);
    EXPECT_THROW(shapovalov_inverse(gk), DegenerateWeight);
    auto gc = shapovalov(cplx(0.3, 0.9), 28.0, 3);
    auto ic = shapovalov_inverse(gc);
    EXPECT_FALSE(ic.used_cholesky);
    EXPECT_LT(ic.residual, 1e-12);
}
