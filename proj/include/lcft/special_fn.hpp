#pragma once

#include <vector>

#include "lcft/params.hpp"

namespace lcft {

// Gamma(z)/Gamma(1-z). Throws PoleError for z in -N_0.
cplx l_ratio(cplx z);

// log(Gamma(z)/Gamma(1-z)); +inf at poles of the numerator, -inf at zeros.
cplx log_l_ratio(cplx z);

struct UpsilonConfig {
    double tail_tol = 1e-15;      // target size of the neglected tail, relative
    double min_T = 40.0;          // lower bound on the integration cutoff
    double direct_margin = 0.1;   // integrate directly when margin <= Re z <= Q - margin
    double window_margin = 0.5;   // shifted arguments land in [m, Q - m]
    int gl_points = 16;           // Gauss-Legendre nodes per panel
    double panel_width = 0.5;
    int shift_budget = 4096;
};

// Zamolodchikov's Upsilon_{gamma/2}. Holds the quadrature table; evaluations are
// const and thread-safe.
class UpsilonEvaluator {
public:
    explicit UpsilonEvaluator(double gamma, UpsilonConfig cfg = {});

    double gamma() const { return gamma_; }
    double Q() const { return Q_; }
    const UpsilonConfig& config() const { return cfg_; }

    // log Upsilon(z); real part -inf on the zero lattice.
    cplx log_upsilon(cplx z) const;
    cplx operator()(cplx z) const;

    // The strip integral itself, valid for 0 < Re z < Q. No shifts.
    cplx log_upsilon_strip(cplx z) const;

    // Number of shift steps that evaluating at z would take.
    int shift_count(cplx z) const;

    // Upsilon'(0) via Upsilon(gamma/2), cross-checked by a central difference.
    cplx prime_zero() const;

private:
    double gamma_, Q_;
    UpsilonConfig cfg_;
    std::vector<double> gl_x_, gl_w_;  // nodes/weights on [0,1]
    cplx prime_zero_;
};

cplx upsilon(cplx z, const UpsilonEvaluator& ev);
cplx upsilon_prime_zero(const UpsilonEvaluator& ev);

// q^{1/24} prod (1 - q^n), q = exp(2 pi i tau).
// zeta_R'(-1)
inline constexpr double kZetaPrimeMinusOne = -0.165421143700450929;

cplx dedekind_eta(cplx tau);

// Jacobi theta_1 with nome exp(i pi tau) (series form).
cplx theta1(cplx z, cplx tau);

// The product form of theta_1 (used as a cross-check).
cplx theta1_product(cplx z, cplx tau);

// Gauss-Legendre nodes/weights on [0,1].
void gauss_legendre01(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace lcft
