#pragma once

#include <functional>
#include <map>
#include <vector>

#include "lcft/params.hpp"

namespace lcft {

// Real boundary field c + sum_{n != 0} phi_n e^{in theta}, phi_n = (x_n + i y_n)/(2 sqrt n), n = 1..M.
struct BoundaryField {
    double c = 0.0;
    std::vector<double> x, y;  // index n-1

    explicit BoundaryField(int M = 0) : x(M, 0.0), y(M, 0.0) {}
    int modes() const { return static_cast<int>(x.size()); }
    cplx phi(int n) const;  // n >= 1
    double operator()(double theta) const;
};

// General (possibly complex) Fourier series on the circle, keyed by frequency.
struct FourierSeries {
    std::map<int, cplx> coeff;

    static FourierSeries from(const BoundaryField& f);
    cplx operator()(double theta) const;
};

struct PoissonDN {
    std::function<cplx(cplx)> extension;  // harmonic extension into the unit disk
    FourierSeries dn;                      // Dirichlet-to-Neumann image
};

PoissonDN poisson_dn_disk(const FourierSeries& f);
PoissonDN poisson_dn_disk(const BoundaryField& f);

double free_annulus_amplitude(cplx q, const BoundaryField& f, const BoundaryField& fp);

enum class ModeProduct { MatchModes, Full };

// Free heat kernel K_0(t, f, f'); the prod (1-e^{-2tn})^{-1} runs over n <= M (MatchModes) or to 1e-16.
double heat_kernel_K0(double t, const BoundaryField& f, const BoundaryField& fp, const CftParams& prm,
                      ModeProduct product = ModeProduct::MatchModes);

double annulus_partition(cplx q);

// prod_{n>=1, x^n > 1e-16} (1 - x^n)
double euler_product(double x);

}  // namespace lcft
