#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "lcft/errors.hpp"
#include "lcft/gmc_oracle.hpp"

using namespace lcft;

namespace {
const double kPi = 3.14159265358979323846;
const cplx I(0.0, 1.0);

double log_abs_eta(cplx tau) { return std::log(std::abs(dedekind_eta(tau))); }
}  // namespace

TEST(TorusGreen, ZeroMeanOnAnIndependentGrid) {
    const TorusGreen G(I);
    // Offset midpoint grid avoids the singularity without special handling.
    const int n = 300;
    const TorusGeometry g(I, n);
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += G(g.point(i, j) + 0.5 * (g.point(1, 0) + g.point(0, 1)));
    EXPECT_NEAR(s * g.cell_area() / g.area(), 0.0, 2e-4);
}

TEST(TorusGreen, ConstantMatchesEta) {
    for (cplx tau : {I, cplx(0.3, 1.1), cplx(-0.4, 0.8)}) {
        const TorusGreen G(tau);
        EXPECT_NEAR(G.c0(), log_abs_eta(tau), 2e-5);
    }
}

TEST(TorusGreen, EvenAndPeriodic) {
    const TorusGreen G(I);
    const cplx z(1.0, 0.5);
    EXPECT_NEAR(G(z), G(-z), 1e-12);
    EXPECT_NEAR(G(z), G(z + 2.0 * kPi), 1e-11);
    EXPECT_NEAR(G(z), G(z + 2.0 * kPi * I), 1e-11);
    const TorusGreen G2(cplx(0.3, 1.1));
    EXPECT_NEAR(G2(z), G2(z + 2.0 * kPi * cplx(0.3, 1.1)), 1e-11);
}

TEST(TorusGreen, LaplacianIsMinusTwoPiOverArea) {
    const TorusGreen G(I);
    const TorusGeometry g(I, 8);
    const double h = 1e-3;
    for (cplx z : {cplx(2.0, 1.5), cplx(-1.0, 2.5), cplx(3.0, -0.7)}) {
        const double lap = -(G(z + h) + G(z - h) + G(z + h * I) + G(z - h * I) - 4.0 * G(z)) / (h * h);
        EXPECT_NEAR(lap, -2.0 * kPi / g.area(), 1e-5);
    }
}

TEST(TorusGreen, SingularOnLattice) {
    const TorusGeometry g(I, 8);
    EXPECT_THROW(torus_green(0.0, g), SingularPoint);
    EXPECT_THROW(torus_green(2.0 * kPi, g), SingularPoint);
    EXPECT_THROW(torus_green(2.0 * kPi * I - 2.0 * kPi, g), SingularPoint);
}

TEST(TorusGreen, WFitMatchesEta) {
    EXPECT_NEAR(torus_green_W_fit(TorusGeometry(I, 128)), -2.0 * log_abs_eta(I), 1e-5);
    const cplx tau(0.3, 1.1);
    EXPECT_NEAR(torus_green_W_fit(TorusGeometry(tau, 128)), -2.0 * log_abs_eta(tau), 1e-5);
}

TEST(CellIntegral, PowerProfile) {
    // s = 0 gives the cell area; disjoint cells tile the square exactly.
    const cplx h1(0.2, 0.0), h2(0.0, 0.2);
    EXPECT_NEAR(cell_power_integral(0.0, h1, h2, 0.0), 0.04, 1e-14);
    EXPECT_NEAR(cell_power_integral(cplx(0.4, 0.2), h1, h2, 0.0), 0.04, 1e-14);
    // Square of side a, s = 1: 4a log(1 + √2).
    EXPECT_NEAR(cell_power_integral(0.0, h1, h2, 1.0), 4 * 0.2 * std::log(1 + std::sqrt(2.0)), 1e-10);
    EXPECT_THROW(cell_power_integral(0.0, h1, h2, 2.0), DomainError);
}

TEST(Gff, SpatialMeanVanishes) {
    const TorusGeometry g(cplx(0.2, 1.3), 32);
    auto rng = batch_stream(7, 0);
    for (int t = 0; t < 5; ++t) {
        const auto s = sample_gff(g, rng);
        double m = 0.0, a = 0.0;
        for (double x : s.field) {
            m += x;
            a += std::abs(x);
        }
        EXPECT_LT(std::abs(m), 1e-12 * a);
    }
}

TEST(Gff, PointMeanAndCovariance) {
    const TorusGeometry g(I, 16);
    GffSampler sampler(g);
    auto rng = batch_stream(11, 0);
    const int n = 10000;
    const int k1 = 3 * 16 + 2;
    double m0 = 0, m00 = 0, c = 0, cc = 0;
    GffSample s;
    for (int t = 0; t < n; ++t) {
        sampler.sample(rng, s);
        m0 += s.field[0];
        m00 += s.field[0] * s.field[0];
        const double p = s.field[0] * s.field[k1];
        c += p;
        cc += p * p;
    }
    m0 /= n;
    m00 /= n;
    c /= n;
    cc /= n;
    EXPECT_LT(std::abs(m0), 3.0 * std::sqrt(m00 / n));
    EXPECT_LT(std::abs(c - sampler.covariance()[k1]), 3.0 * std::sqrt((cc - c * c) / n));
    EXPECT_NEAR(sampler.covariance()[0], sampler.variance(), 1e-12 * sampler.variance());
}

TEST(Gff, TruncatedCovarianceApproachesGreen) {
    const TorusGeometry g(I, 128);
    GffSampler sampler(g);
    const TorusGreen G(I);
    // Far from the origin the truncated covariance is close to the Green function.
    const int i = 40, j = 25;
    EXPECT_NEAR(sampler.covariance()[i * 128 + j], G(g.point(i, j)), 2e-3);
}

TEST(Gmc, MassPositiveWithMeanArea) {
    const TorusGeometry g(I, 32);
    const CftParams prm(std::sqrt(2.0), 1.0);
    GffSampler sampler(g);
    auto rng = batch_stream(3, 0);
    const int n = 10000;
    double s = 0, ss = 0;
    GffSample x;
    for (int t = 0; t < n; ++t) {
        sampler.sample(rng, x);
        const double M = gmc_mass(x, g, prm, sampler.variance());
        ASSERT_GT(M, 0.0);
        s += M;
        ss += M * M;
    }
    const double mean = s / n, err = std::sqrt((ss / n - mean * mean) / n);
    EXPECT_LT(std::abs(mean - g.area()), 3.0 * err);
}

TEST(Gmc, SmallGammaGivesArea) {
    const TorusGeometry g(I, 32);
    auto rng = batch_stream(5, 0);
    const auto x = sample_gff(g, rng);
    EXPECT_NEAR(gmc_mass(x, g, CftParams(1e-6, 1.0)) / g.area(), 1.0, 1e-5);
}

TEST(CIntegral, ClosedFormAndQuadrature) {
    EXPECT_NEAR(c_integral(std::sqrt(2.0), std::sqrt(2.0), 1.0, 1.0), 1.0 / std::sqrt(2.0), 1e-14);
    for (double s : {0.3, 0.8, 1.7})
        for (double M : {0.05, 1.0, 40.0}) {
            const double a = c_integral(s, std::sqrt(2.0), 1.3, M);
            EXPECT_NEAR(c_integral_numeric(s, std::sqrt(2.0), 1.3, M) / a, 1.0, 1e-9) << s << " " << M;
        }
}

TEST(DetPrefactor, ZetaContinuationMatchesClosedForm) {
    for (cplx tau : {I, cplx(0.3, 1.7), cplx(0.5, 0.9)})
        EXPECT_NEAR(zeta_log_det_laplacian(tau), closed_form_log_det_laplacian(tau), 1e-9);
    EXPECT_NEAR(torus_det_prefactor(I), 1.0 / std::norm(dedekind_eta(I)), 1e-14);
}

TEST(DetPrefactor, MetricScaling) {
    // det' of the metric λ²g is λ² det'_g since ζ(0) = −1.
    for (double lam : {0.5, 2.0, 3.0})
        EXPECT_NEAR(zeta_log_det_laplacian(I, lam) - zeta_log_det_laplacian(I), 2.0 * std::log(lam), 1e-9);
}

TEST(DetPrefactor, TranslationInvariant) {
    const cplx tau(0.2, 0.9);
    EXPECT_NEAR(torus_det_prefactor(tau), torus_det_prefactor(tau + 1.0), 1e-12);
}

TEST(McTorus, ReductionMatchesDirectEstimator) {
    const CftParams prm(std::sqrt(2.0), 1.0);
    McConfig cfg;
    cfg.samples = 20000;
    cfg.batches = 20;
    cfg.threads = 1;
    const auto r = mc_reduction_check(0.8, TorusGeometry(I, 16), prm, cfg);
    EXPECT_LT(std::abs(r.direct - r.shifted), 3.0 * std::hypot(r.direct_err, r.shifted_err));
}

TEST(McTorus, MuScalingIsExact) {
    McConfig cfg;
    cfg.samples = 200;
    cfg.batches = 20;
    const TorusGeometry g(I, 16);
    const auto a = mc_torus_one_point(0.8, g, CftParams(std::sqrt(2.0), 1.0), cfg);
    const auto b = mc_torus_one_point(0.8, g, CftParams(std::sqrt(2.0), 2.5), cfg);
    EXPECT_NEAR(b.mean / a.mean, std::pow(2.5, -0.8 / std::sqrt(2.0)), 1e-12);
}

TEST(McTorus, DeterministicAcrossThreadCounts) {
    const CftParams prm(std::sqrt(2.0), 1.0);
    const TorusGeometry g(I, 16);
    McConfig cfg;
    cfg.samples = 400;
    cfg.batches = 20;
    cfg.threads = 1;
    const auto a = mc_torus_one_point({0.8, 1.2}, g, prm, cfg);
    cfg.threads = 3;
    const auto b = mc_torus_one_point({0.8, 1.2}, g, prm, cfg);
    for (size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].mean, b[k].mean);
        EXPECT_EQ(a[k].std_error, b[k].std_error);
        EXPECT_FALSE(a[k].unstable);
    }
}

TEST(McTorus, SharedSamplesMatchSingleRuns) {
    const CftParams prm(std::sqrt(2.0), 1.0);
    const TorusGeometry g(I, 16);
    McConfig cfg;
    cfg.samples = 200;
    cfg.batches = 20;
    const auto both = mc_torus_one_point({0.8, 1.2}, g, prm, cfg);
    EXPECT_EQ(both[1].mean, mc_torus_one_point(1.2, g, prm, cfg).mean);
}

TEST(McTorus, Guards) {
    const CftParams prm(std::sqrt(2.0), 1.0);
    const TorusGeometry g(I, 16);
    McConfig cfg;
    cfg.samples = 200;
    cfg.batches = 10;
    EXPECT_THROW(mc_torus_one_point(0.8, g, prm, cfg), ValidationError);
    cfg.batches = 20;
    EXPECT_THROW(mc_torus_one_point(2.5, g, prm, cfg), ValidationError);
    EXPECT_THROW(mc_torus_one_point(1.45, g, prm, cfg), DomainError);
    EXPECT_THROW(TorusGeometry(I, 15), ValidationError);
    EXPECT_THROW(TorusGeometry(cplx(0.0, -1.0), 16), ValidationError);
}

TEST(McTorus, BatchTraceCsv) {
    McConfig cfg;
    cfg.samples = 100;
    cfg.batches = 20;
    const auto e = mc_torus_one_point({0.8, 1.2}, TorusGeometry(I, 8), CftParams(std::sqrt(2.0), 1.0), cfg);
    const std::string path = ::testing::TempDir() + "trace.csv";
    write_batch_trace_csv(path, e);
    std::ifstream f(path);
    std::string line;
    int lines = 0;
    while (std::getline(f, line)) ++lines;
    EXPECT_EQ(lines, 1 + 2 * 20);
    std::remove(path.c_str());
}
