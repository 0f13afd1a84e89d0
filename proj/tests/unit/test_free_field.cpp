#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lcft/errors.hpp"
#include "lcft/free_field.hpp"
#include "lcft/special_fn.hpp"
#include "oracles.hpp"

using namespace lcft;

namespace {

constexpr double kPi = 3.14159265358979323846;

BoundaryField random_field(std::mt19937_64& rng, int M) {
    std::normal_distribution<double> n(0.0, 1.0);
    BoundaryField f(M);
    f.c = n(rng);
    for (int i = 0; i < M; ++i) {
        f.x[i] = n(rng);
        f.y[i] = n(rng);
    }
    return f;
}

using oracle::gaussian_integral;

}  // namespace

TEST(Poisson, Constant) {
    BoundaryField f(3);
    f.c = 1.7;
    auto r = poisson_dn_disk(f);
    EXPECT_NEAR(std::abs(r.extension(cplx(0.3, -0.2)) - 1.7), 0.0, 1e-15);
    for (const auto& [n, a] : r.dn.coeff) EXPECT_EQ(a, cplx(0.0)) << n;
}

TEST(Poisson, SingleModes) {
    FourierSeries e1;
    e1.coeff[1] = 1.0;
    auto r = poisson_dn_disk(e1);
    const cplx z(0.4, 0.25);
    EXPECT_LT(std::abs(r.extension(z) - z), 1e-15);
    EXPECT_EQ(r.dn.coeff.at(1), cplx(1.0));

    FourierSeries e3;
    e3.coeff[3] = 1.0;
    EXPECT_EQ(poisson_dn_disk(e3).dn.coeff.at(3), cplx(3.0));
}

TEST(Poisson, RealFieldBoundaryValues) {
    std::mt19937_64 rng(3);
    auto f = random_field(rng, 5);
    auto r = poisson_dn_disk(f);
    for (double th : {0.0, 0.7, 2.9}) {
        EXPECT_NEAR(r.extension(std::polar(1.0, th)).real(), f(th), 1e-13);
        EXPECT_NEAR(r.extension(std::polar(1.0, th)).imag(), 0.0, 1e-13);
    }
}

TEST(FreeAnnulus, ZeroFieldsGiveOne) {
    BoundaryField z(6);
    EXPECT_DOUBLE_EQ(free_annulus_amplitude(cplx(0.2, 0.3), z, z), 1.0);
    EXPECT_THROW(free_annulus_amplitude(cplx(1.0, 0.0), z, z), DomainError);
    EXPECT_THROW(free_annulus_amplitude(0.0, z, z), DomainError);
}

TEST(FreeAnnulus, ZeroModeGaussian) {
    BoundaryField f(2), g(2);
    f.c = 0.4;
    g.c = -0.9;
    const double t = -std::log(0.35);
    EXPECT_NEAR(free_annulus_amplitude(0.35, f, g), std::exp(-1.69 / (2.0 * t)), 1e-15);
}

TEST(FreeAnnulus, RelationToHeatKernel) {
    std::mt19937_64 rng(11);
    CftParams prm{1.3, 1.0};
    const double Q = prm.Q();
    for (int s = 0; s < 20; ++s) {
        const int M = 8;
        auto f = random_field(rng, M), g = random_field(rng, M);
        const cplx q = std::polar(0.05 + 0.9 * (s + 0.5) / 20.0, 0.3 * s);
        const double r = std::abs(q), t = -std::log(r);
        double prod = 1.0;
        for (int n = 1; n <= M; ++n) prod *= 1.0 - std::pow(r, 2 * n);
        const double rhs = std::sqrt(2.0 * kPi * t) * std::pow(r, -6.0 * Q * Q / 12.0) * heat_kernel_K0(t, f, g, prm) * prod;
        const double lhs = free_annulus_amplitude(q, f, g);
        EXPECT_NEAR(lhs / rhs, 1.0, 1e-10);
    }
}

TEST(FreeAnnulus, PartitionConstantClosesTheIdentity) {
    // Z * sqrt(2 pi t) |q|^{-Q^2/2} prod(1-|q|^{2n}) = sqrt(2) pi |q|^{-c_L/12}
    CftParams prm{0.9, 1.0};
    const double Q = prm.Q();
    for (double r : {0.05, 0.3, 0.7, 0.95}) {
        const double t = -std::log(r);
        const double lhs = annulus_partition(r) * std::sqrt(2.0 * kPi * t) * std::pow(r, -Q * Q / 2.0) * euler_product(r * r);
        const double rhs = std::sqrt(2.0) * kPi * std::pow(r, -prm.c_L() / 12.0);
        EXPECT_NEAR(lhs / rhs, 1.0, 1e-12);
    }
}

TEST(HeatKernel, PrefactorAtZeroFields) {
    CftParams prm;
    const double Q = prm.Q();
    BoundaryField z(8);
    double prod = 1.0;
    for (int n = 1; n <= 8; ++n) prod *= 1.0 - std::exp(-2.0 * n);
    EXPECT_NEAR(heat_kernel_K0(1.0, z, z, prm) / (std::exp(-Q * Q / 2.0) / std::sqrt(2.0 * kPi) / prod), 1.0, 1e-15);
    const double full = std::exp(-Q * Q / 2.0) / std::sqrt(2.0 * kPi) / euler_product(std::exp(-2.0));
    EXPECT_NEAR(heat_kernel_K0(1.0, z, z, prm, ModeProduct::Full) / full, 1.0, 1e-15);
    EXPECT_THROW(heat_kernel_K0(0.0, z, z, prm), DomainError);
}

TEST(HeatKernel, Semigroup) {
    CftParams prm{1.1, 1.0};
    std::mt19937_64 rng(5);
    for (int M : {2, 8})
        for (double t : {0.3, 0.5, 1.0})
            for (double s : {0.3, 0.5, 1.0}) {
                auto f = random_field(rng, M), h = random_field(rng, M);
                const double got = gaussian_integral(M, [&](const BoundaryField& g) {
                    return std::log(heat_kernel_K0(t, f, g, prm)) + std::log(heat_kernel_K0(s, g, h, prm));
                });
                const double want = heat_kernel_K0(t + s, f, h, prm);
                EXPECT_NEAR(got / want, 1.0, 1e-8) << M << " " << t << " " << s;
            }
}

TEST(HeatKernel, EigenrelationAndModeTruncation) {
    CftParams prm;
    const double Q = prm.Q(), t = 0.5;
    std::mt19937_64 rng(9);
    for (double alpha : {0.4, 1.0}) {
        const double d2 = 2.0 * conformal_weight(alpha, prm).real();
        double prev = 1e300;
        for (int M : {2, 4, 8}) {
            auto f = random_field(rng, M);
            auto eig = [&](ModeProduct mp) {
                return gaussian_integral(M, [&](const BoundaryField& g) {
                    return std::log(heat_kernel_K0(t, f, g, prm, mp)) + (alpha - Q) * g.c;
                });
            };
            const double want = std::exp(-d2 * t + (alpha - Q) * f.c);
            EXPECT_NEAR(eig(ModeProduct::MatchModes) / want, 1.0, 1e-10);
            const double err = std::abs(eig(ModeProduct::Full) / want - 1.0);
            EXPECT_LT(err, prev);
            prev = err;
        }
    }
}

TEST(AnnulusPartition, Properties) {
    EXPECT_EQ(annulus_partition(cplx(0.3, 0.0)), annulus_partition(std::polar(0.3, 1.9)));
    const double r = 1e-4, t = -std::log(r);
    // the neglected product is 1 + |q|^2 + O(|q|^4)
    EXPECT_NEAR(annulus_partition(r) / (std::sqrt(0.5) * std::sqrt(2.0 * kPi / t) * std::exp(t / 12.0)) - 1.0, r * r, 1e-10);
    // |q|^{-1/12} prod(1-|q|^{2n})^{-1} = 1/eta(tau~), e^{2 pi i tau~} = |q|^2
    const double q = 0.3;
    const cplx tau(0.0, -std::log(q * q) / (2.0 * kPi));
    EXPECT_NEAR(std::pow(q, -1.0 / 12.0) / euler_product(q * q) * std::abs(dedekind_eta(tau)), 1.0, 1e-13);
    EXPECT_THROW(annulus_partition(1.2), DomainError);
}
