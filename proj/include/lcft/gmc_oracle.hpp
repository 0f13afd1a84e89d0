#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lcft/params.hpp"
#include "lcft/special_fn.hpp"

namespace lcft {

// Flat torus C/(2πZ + 2πτZ) sampled on an n x n grid x_ij = 2π(i + jτ)/n.
// Fourier modes (m1, m2) carry eigenvalue |m2 − m1 τ|² / (Im τ)²; those with
// |k| < K (and |m_i| < n/2) are kept. K = 0 means n/2.
struct TorusGeometry {
    cplx tau{0.0, 1.0};
    int n = 128;
    double K = 0.0;

    TorusGeometry() = default;
    TorusGeometry(cplx t, int grid, double cutoff = 0.0);

    void validate() const;
    double area() const;
    double cell_area() const { return area() / (double(n) * n); }
    double cutoff() const { return K > 0.0 ? K : n / 2.0; }
    cplx point(int i, int j) const;
    double eigenvalue(int m1, int m2) const;
    bool keeps(int m1, int m2) const;
};

// Zero-mean Green function G(z, 0) with Δ G = 2π(δ − 1/v). The constant c0 is
// fixed by a grid quadrature of ∫ G dv = 0 (singular cell integrated exactly).
class TorusGreen {
public:
    explicit TorusGreen(cplx tau, int quad_n = 256);
    double operator()(cplx z) const;  // SingularPoint on the lattice
    double c0() const { return c0_; }
    cplx tau() const { return tau_; }
    double raw(cplx z) const;  // G without c0

private:
    cplx tau_;
    double c0_ = 0.0;
};

double torus_green(cplx z, const TorusGeometry& geom);

// lim_{x→0} (G(x,0) + ln|x|) by a least-squares fit a + b r² on r ∈ [4h, 16h].
double torus_green_W_fit(const TorusGreen& G, double h);
double torus_green_W_fit(const TorusGeometry& geom);

// ∫ over the polygon of f(|x|) with F(ρ) = ∫_0^ρ f(r) r dr, by cone decomposition from 0.
template <class F>
double polygon_radial_integral(const std::vector<cplx>& poly, F radial_antiderivative);

// ∫_{cell} |x|^{-s} dx for the grid cell centred at c (s < 2).
double cell_power_integral(cplx c, cplx h1, cplx h2, double s);

struct GffSample {
    int n = 0;
    std::vector<double> field;  // row-major, index i * n + j
    std::vector<cplx> coeff;    // half spectrum n x (n/2 + 1), index i * (n/2+1) + j
};

class GffSampler {
public:
    explicit GffSampler(const TorusGeometry& geom);
    ~GffSampler();
    GffSampler(const GffSampler&) = delete;
    GffSampler& operator=(const GffSampler&) = delete;

    void sample(std::mt19937_64& rng, GffSample& out);
    GffSample sample(std::mt19937_64& rng);
    double variance() const { return var_; }  // E[X(x)²] on the grid
    // E[X(x_ij) X(0)] for the truncated field.
    const std::vector<double>& covariance() const { return cov_; }
    const TorusGeometry& geometry() const { return geom_; }

private:
    TorusGeometry geom_;
    int half_;
    std::vector<double> sd_;  // per half-spectrum entry, 0 when dropped
    double var_ = 0.0;
    std::vector<double> cov_;
    void* plan_ = nullptr;
    double* in_ = nullptr;  // fftw_complex storage
    double* out_ = nullptr;
};

GffSample sample_gff(const TorusGeometry& geom, std::mt19937_64& rng);

// Wick-ordered Riemann sum Σ e^{γX − γ²σ²/2} · cell area.
double gmc_mass(const GffSample& s, const TorusGeometry& geom, const CftParams& prm, double variance);
double gmc_mass(const GffSample& s, const TorusGeometry& geom, const CftParams& prm);

// ∫_R e^{sc − μ e^{γc} M} dc in closed form.
double c_integral(double s, double gamma, double mu, double M);
// Same integral by trapezoid in c, used to check the closed form.
double c_integral_numeric(double s, double gamma, double mu, double M);

// Closed form (Im τ)^{-1/2} |η|^{-2}; throws ConsistencyError when the zeta check misses by > 1%.
double torus_det_prefactor(const TorusGeometry& geom);
double torus_det_prefactor(cplx tau);
// log det'Δ on C/(2πs(Z + τZ)) from the heat trace split at t = 1.
double zeta_log_det_laplacian(cplx tau, double scale = 1.0);
double closed_form_log_det_laplacian(cplx tau);

struct McConfig {
    std::uint64_t seed = 12345;
    long samples = 200000;
    int batches = 40;
    int threads = 0;  // 0: LCFT_THREADS, then hardware concurrency
};

struct McEstimate {
    double alpha = 0.0;
    double mean = 0.0;        // estimate of <V_alpha(0)>
    double std_error = 0.0;
    double expectation = 0.0; // E[Z^{-alpha/gamma}]
    double prefactor = 0.0;   // mean / expectation
    long samples = 0;
    int batches = 0;
    int n = 0;
    double cutoff = 0.0;
    double W = 0.0;
    double det_prefactor = 0.0;
    bool unstable = false;    // relative stderr above 50%
    std::vector<double> batch_means;  // per-batch estimates of <V_alpha(0)>
};

// One-point function of V_alpha at 0; alphas share the same GFF samples.
std::vector<McEstimate> mc_torus_one_point(const std::vector<double>& alphas, const TorusGeometry& geom,
                                           const CftParams& prm, const McConfig& cfg);
McEstimate mc_torus_one_point(double alpha, const TorusGeometry& geom, const CftParams& prm,
                              const McConfig& cfg);

// Unreduced estimator E[e^{αX(0) − α²σ²/2} ∫ e^{αc − μe^{γc}M} dc] (c integrated numerically)
// against the shifted one E[γ^{-1}Γ(α/γ)(μ Z_K)^{-α/γ}] with the truncated covariance.
// The two agree exactly in expectation.
struct ReductionCheck {
    double direct = 0.0, direct_err = 0.0;
    double shifted = 0.0, shifted_err = 0.0;
};
ReductionCheck mc_reduction_check(double alpha, const TorusGeometry& geom, const CftParams& prm,
                                  const McConfig& cfg);

void write_batch_trace_csv(const std::string& path, const std::vector<McEstimate>& est);

// Deterministic stream for (seed, batch).
std::mt19937_64 batch_stream(std::uint64_t seed, int batch);

// ---------------------------------------------------------------------------

template <class F>
double polygon_radial_integral(const std::vector<cplx>& poly, F antider) {
    static const std::vector<double> xs = [] {
        std::vector<double> x, w;
        gauss_legendre01(16, x, w);
        return x;
    }();
    static const std::vector<double> ws = [] {
        std::vector<double> x, w;
        gauss_legendre01(16, x, w);
        return w;
    }();
    const int pieces = 4;
    double total = 0.0;
    for (size_t k = 0; k < poly.size(); ++k) {
        const cplx P = poly[k], R = poly[(k + 1) % poly.size()];
        const double cross = P.real() * R.imag() - P.imag() * R.real();
        if (cross == 0.0) continue;
        double s = 0.0;
        for (int p = 0; p < pieces; ++p)
            for (size_t i = 0; i < xs.size(); ++i) {
                const double t = (p + xs[i]) / pieces;
                const double r = std::abs(P + t * (R - P));
                s += ws[i] / pieces * antider(r) / (r * r);
            }
        total += cross * s;
    }
    return total;
}

}  // namespace lcft
