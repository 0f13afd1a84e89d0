#include "lcft/gmc_oracle.hpp"

#include <fftw3.h>
#include <gsl/gsl_sf_expint.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include "lcft/bootstrap.hpp"
#include "lcft/errors.hpp"

namespace lcft {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286061;

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Parallelogram cell centred at c with edge vectors h1, h2, counter-clockwise.
std::vector<cplx> cell_polygon(cplx c, cplx h1, cplx h2) {
    if (h1.real() * h2.imag() - h1.imag() * h2.real() < 0.0) std::swap(h1, h2);
    return {c - 0.5 * h1 - 0.5 * h2, c + 0.5 * h1 - 0.5 * h2, c + 0.5 * h1 + 0.5 * h2, c - 0.5 * h1 + 0.5 * h2};
}

int fft_mode(int i, int n) { return i < n / 2 ? i : i - n; }

}  // namespace

// ---------------------------------------------------------------- geometry

TorusGeometry::TorusGeometry(cplx t, int grid, double cutoff) : tau(t), n(grid), K(cutoff) { validate(); }

void TorusGeometry::validate() const {
    if (!(tau.imag() > 0.0)) throw ValidationError("Im tau must be positive");
    if (n < 4 || n % 2 != 0) throw ValidationError("grid size must be even and at least 4");
    if (K != 0.0 && !(K >= 1.0)) throw ValidationError("frequency cutoff K must be at least 1");
}

double TorusGeometry::area() const { return 4.0 * kPi * kPi * tau.imag(); }

cplx TorusGeometry::point(int i, int j) const { return 2.0 * kPi * (double(i) + double(j) * tau) / double(n); }

double TorusGeometry::eigenvalue(int m1, int m2) const {
    return std::norm(double(m2) - double(m1) * tau) / (tau.imag() * tau.imag());
}

bool TorusGeometry::keeps(int m1, int m2) const {
    if (m1 == 0 && m2 == 0) return false;
    if (std::abs(m1) >= n / 2 || std::abs(m2) >= n / 2) return false;
    const double k = cutoff();
    return eigenvalue(m1, m2) < k * k;
}

// ---------------------------------------------------------------- Green function

double TorusGreen::raw(cplx z) const {
    const cplx w = z / (2.0 * kPi);
    double b = w.imag() / tau_.imag();
    double a = w.real() - b * tau_.real();
    b -= std::round(b);
    a -= std::round(a);
    const cplx wr = a + b * tau_;
    if (std::abs(wr) < 1e-13) throw SingularPoint("Green function evaluated on a lattice point");
    return -std::log(std::abs(theta1(wr, tau_))) + kPi * wr.imag() * wr.imag() / tau_.imag();
}

TorusGreen::TorusGreen(cplx tau, int quad_n) : tau_(tau) {
    if (!(tau.imag() > 0.0)) throw ValidationError("Im tau must be positive");
    const TorusGeometry g(tau, quad_n);
    const double dA = g.cell_area();
    std::vector<double> rows(quad_n, 0.0);
    for (int i = 0; i < quad_n; ++i) {
        double s = 0.0;
        for (int j = 0; j < quad_n; ++j)
            if (i != 0 || j != 0) s += raw(g.point(i, j));
        rows[i] = s * dA;
    }
    double total = 0.0;
    for (double r : rows) total += r;
    // Origin cell: −ln|x| exactly, plus the regular part at 0.
    const cplx h1 = g.point(1, 0), h2 = g.point(0, 1);
    const double eps = 1e-7 * std::abs(h1);
    const double regular = raw(eps) + std::log(eps);
    const double log_part = polygon_radial_integral(cell_polygon(0.0, h1, h2), [](double r) {
        return r > 0.0 ? -(0.5 * r * r * std::log(r) - 0.25 * r * r) : 0.0;
    });
    total += log_part + regular * dA;
    c0_ = -total / g.area();
}

double TorusGreen::operator()(cplx z) const { return raw(z) + c0_; }

double torus_green(cplx z, const TorusGeometry& geom) {
    geom.validate();
    return TorusGreen(geom.tau)(z);
}

double torus_green_W_fit(const TorusGreen& G, double h) {
    // Least squares y = a + b r² over 8 radii x 16 angles.
    double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
    for (int k = 0; k < 8; ++k) {
        const double r = h * (4.0 + 12.0 * k / 7.0);
        for (int l = 0; l < 16; ++l) {
            const double th = 2.0 * kPi * (l + 0.25) / 16.0;
            const double y = G(std::polar(r, th)) + std::log(r);
            const double x = r * r;
            s0 += 1;
            s1 += x;
            s2 += x * x;
            t0 += y;
            t1 += x * y;
        }
    }
    const double det = s0 * s2 - s1 * s1;
    return (t0 * s2 - t1 * s1) / det;
}

double torus_green_W_fit(const TorusGeometry& geom) {
    geom.validate();
    return torus_green_W_fit(TorusGreen(geom.tau), 2.0 * kPi / geom.n);
}

double cell_power_integral(cplx c, cplx h1, cplx h2, double s) {
    if (!(s < 2.0)) throw DomainError("|x|^{-s} is not integrable for s >= 2");
    return polygon_radial_integral(cell_polygon(c, h1, h2),
                                   [s](double r) { return r > 0.0 ? std::pow(r, 2.0 - s) / (2.0 - s) : 0.0; });
}

// ---------------------------------------------------------------- GFF

GffSampler::GffSampler(const TorusGeometry& geom) : geom_(geom), half_(geom.n / 2 + 1) {
    geom_.validate();
    const int n = geom_.n;
    const double v = geom_.area();
    sd_.assign(size_t(n) * half_, 0.0);
    std::vector<double> cov_coeff(size_t(n) * half_, 0.0);
    var_ = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < half_; ++j) {
            const int m1 = fft_mode(i, n), m2 = j;
            if (!geom_.keeps(m1, m2)) continue;
            const double s2 = 2.0 * kPi / (v * geom_.eigenvalue(m1, m2));
            sd_[size_t(i) * half_ + j] = std::sqrt(s2);
            cov_coeff[size_t(i) * half_ + j] = s2;
            var_ += (j == 0) ? s2 : 2.0 * s2;
        }

    in_ = reinterpret_cast<double*>(fftw_malloc(sizeof(fftw_complex) * size_t(n) * half_));
    out_ = static_cast<double*>(fftw_malloc(sizeof(double) * size_t(n) * n));
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_c2r_2d(n, n, reinterpret_cast<fftw_complex*>(in_), out_, FFTW_ESTIMATE);
    }
    for (size_t k = 0; k < cov_coeff.size(); ++k) {
        in_[2 * k] = cov_coeff[k];
        in_[2 * k + 1] = 0.0;
    }
    fftw_execute(static_cast<fftw_plan>(plan_));
    cov_.assign(out_, out_ + size_t(n) * n);
}

GffSampler::~GffSampler() {
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        if (plan_) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    }
    fftw_free(in_);
    fftw_free(out_);
}

void GffSampler::sample(std::mt19937_64& rng, GffSample& out) {
    const int n = geom_.n;
    std::normal_distribution<double> normal(0.0, 1.0);
    out.n = n;
    out.coeff.assign(size_t(n) * half_, cplx(0.0));
    const double r2 = std::sqrt(0.5);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < half_; ++j) {
            const size_t k = size_t(i) * half_ + j;
            if (sd_[k] == 0.0) continue;
            if (j == 0 && fft_mode(i, n) < 0) continue;  // set by its conjugate partner
            const double g1 = normal(rng), g2 = normal(rng);
            const cplx c = sd_[k] * r2 * cplx(g1, g2);
            out.coeff[k] = c;
            if (j == 0) out.coeff[size_t(n - i) * half_] = std::conj(c);
        }
    std::copy(out.coeff.begin(), out.coeff.end(), reinterpret_cast<cplx*>(in_));
    fftw_execute(static_cast<fftw_plan>(plan_));
    out.field.assign(out_, out_ + size_t(n) * n);
}

GffSample GffSampler::sample(std::mt19937_64& rng) {
    GffSample s;
    sample(rng, s);
    return s;
}

GffSample sample_gff(const TorusGeometry& geom, std::mt19937_64& rng) {
    GffSampler s(geom);
    return s.sample(rng);
}

double gmc_mass(const GffSample& s, const TorusGeometry& geom, const CftParams& prm, double variance) {
    prm.validate();
    if (s.n != geom.n || s.field.size() != size_t(geom.n) * geom.n)
        throw DimensionMismatch("sample grid does not match the geometry");
    const double g = prm.gamma, shift = 0.5 * g * g * variance;
    double total = 0.0;
    for (double x : s.field) total += std::exp(g * x - shift);
    return total * geom.cell_area();
}

double gmc_mass(const GffSample& s, const TorusGeometry& geom, const CftParams& prm) {
    return gmc_mass(s, geom, prm, GffSampler(geom).variance());
}

// ---------------------------------------------------------------- c integral

double c_integral(double s, double gamma, double mu, double M) {
    if (!(s > 0.0 && gamma > 0.0 && mu > 0.0 && M > 0.0)) throw DomainError("c integral needs positive s, gamma, mu, M");
    return std::tgamma(s / gamma) / gamma * std::pow(mu * M, -s / gamma);
}

double c_integral_numeric(double s, double gamma, double mu, double M) {
    if (!(s > 0.0 && gamma > 0.0 && mu > 0.0 && M > 0.0)) throw DomainError("c integral needs positive s, gamma, mu, M");
    // Centre on c* with μ M e^{γc*} = 1, then integrate y = c − c*.
    const double cs = -std::log(mu * M) / gamma;
    const double lo = -45.0 / s, hi = std::log(60.0) / gamma;
    const double step = 0.02 / std::max(s, gamma);
    const int m = static_cast<int>(std::ceil((hi - lo) / step));
    const double dy = (hi - lo) / m;
    double sum = 0.0;
    for (int k = 0; k <= m; ++k) {
        const double y = lo + k * dy;
        const double f = std::exp(s * y - std::exp(gamma * y));
        sum += (k == 0 || k == m) ? 0.5 * f : f;
    }
    return std::exp(s * cs) * sum * dy;
}

// ---------------------------------------------------------------- determinant

double zeta_log_det_laplacian(cplx tau, double scale) {
    if (!(tau.imag() > 0.0)) throw ValidationError("Im tau must be positive");
    if (!(scale > 0.0)) throw ValidationError("scale must be positive");
    const double t2 = tau.imag();
    const double v = 4.0 * kPi * kPi * scale * scale * t2;
    // ζ'(0) = −v/4π − γ_E + Σ'_λ E1(λ) + (v/π) Σ'_ω e^{−|ω|²/4}/|ω|².
    double eig_sum = 0.0, lat_sum = 0.0;
    const int M = 200;
    for (int m1 = -M; m1 <= M; ++m1)
        for (int m2 = -M; m2 <= M; ++m2) {
            if (m1 == 0 && m2 == 0) continue;
            const double lam = std::norm(double(m2) - double(m1) * tau) / (scale * scale * t2 * t2);
            if (lam < 700.0) eig_sum += gsl_sf_expint_E1(lam);
            const double w2 = std::norm(2.0 * kPi * scale * (double(m1) + double(m2) * tau));
            if (w2 < 2800.0) lat_sum += std::exp(-w2 / 4.0) / w2;
        }
    const double zp = -v / (4.0 * kPi) - kEulerGamma + eig_sum + v / kPi * lat_sum;
    return -zp;
}

double closed_form_log_det_laplacian(cplx tau) {
    if (!(tau.imag() > 0.0)) throw ValidationError("Im tau must be positive");
    return std::log(4.0 * kPi * kPi * tau.imag() * tau.imag()) + 4.0 * std::log(std::abs(dedekind_eta(tau)));
}

double torus_det_prefactor(cplx tau) {
    const double closed = closed_form_log_det_laplacian(tau);
    const double zeta = zeta_log_det_laplacian(tau);
    if (std::abs(std::exp(closed - zeta) - 1.0) > 0.01)
        throw ConsistencyError("closed-form det' disagrees with the zeta continuation");
    return std::pow(tau.imag(), -0.5) / std::norm(dedekind_eta(tau));
}

double torus_det_prefactor(const TorusGeometry& geom) {
    geom.validate();
    return torus_det_prefactor(geom.tau);
}

// ---------------------------------------------------------------- Monte Carlo

std::mt19937_64 batch_stream(std::uint64_t seed, int batch) {
    std::seed_seq seq{std::uint32_t(seed & 0xffffffffu), std::uint32_t(seed >> 32), std::uint32_t(batch)};
    return std::mt19937_64(seq);
}

namespace {

void check_mc_config(const McConfig& cfg) {
    if (cfg.batches < 20) throw ValidationError("at least 20 batches are needed for the error estimate");
    if (cfg.samples < cfg.batches) throw ValidationError("fewer samples than batches");
}

long batch_size(const McConfig& cfg, int b) {
    return cfg.samples / cfg.batches + (b < cfg.samples % cfg.batches ? 1 : 0);
}

// Runs body(batch, sampler) over all batches; one sampler per worker.
template <class Body>
void run_batches(const TorusGeometry& geom, const McConfig& cfg, Body body) {
    const int threads = std::max(1, std::min(resolve_threads(cfg.threads), cfg.batches));
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    auto worker = [&] {
        try {
            GffSampler sampler(geom);
            for (int b = next++; b < cfg.batches; b = next++) body(b, sampler);
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!err) err = std::current_exception();
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (err) std::rethrow_exception(err);
}

void batch_stats(const std::vector<double>& means, double& mean, double& err) {
    const double B = means.size();
    mean = 0.0;
    for (double m : means) mean += m;
    mean /= B;
    double ss = 0.0;
    for (double m : means) ss += (m - mean) * (m - mean);
    err = std::sqrt(ss / (B - 1.0) / B);
}

}  // namespace

std::vector<McEstimate> mc_torus_one_point(const std::vector<double>& alphas, const TorusGeometry& geom,
                                           const CftParams& prm, const McConfig& cfg) {
    prm.validate();
    geom.validate();
    check_mc_config(cfg);
    const double g = prm.gamma, Q = prm.Q();
    for (double a : alphas) {
        if (!(a > 0.0 && a < Q)) throw ValidationError("alpha must lie in (0, Q)");
        if (!(a * g < 2.0)) throw DomainError("alpha * gamma must be below 2 for the vertex cell integral");
    }
    const int n = geom.n;
    const size_t cells = size_t(n) * n;
    const TorusGreen G(geom.tau);
    const double h = 2.0 * kPi / n;
    const double W = torus_green_W_fit(G, h);
    const double det = torus_det_prefactor(geom);
    const double dA = geom.cell_area();
    const cplx h1 = geom.point(1, 0), h2 = geom.point(0, 1);

    // Vertex weights per cell: e^{αγG} dA, with the |x|^{-αγ} profile integrated exactly near 0.
    const int near = 4;
    std::vector<std::vector<double>> weight(alphas.size(), std::vector<double>(cells));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int di = fft_mode(i, n), dj = fft_mode(j, n);
            const cplx c = geom.point(di, dj);
            const size_t k = size_t(i) * n + j;
            const bool close = std::abs(di) <= near && std::abs(dj) <= near;
            const double reg = (di == 0 && dj == 0) ? W : G(c) + std::log(std::abs(c));
            for (size_t a = 0; a < alphas.size(); ++a) {
                const double s = alphas[a] * g;
                weight[a][k] = close ? std::exp(s * reg) * cell_power_integral(c, h1, h2, s)
                                     : dA * std::exp(s * (reg - std::log(std::abs(c))));
            }
        }

    std::vector<std::vector<double>> sums(alphas.size(), std::vector<double>(cfg.batches, 0.0));
    run_batches(geom, cfg, [&](int b, GffSampler& sampler) {
        auto rng = batch_stream(cfg.seed, b);
        GffSample s;
        std::vector<double> wick(cells);
        const double shift = 0.5 * g * g * sampler.variance();
        const long count = batch_size(cfg, b);
        std::vector<double> acc(alphas.size(), 0.0);
        for (long t = 0; t < count; ++t) {
            sampler.sample(rng, s);
            for (size_t k = 0; k < cells; ++k) wick[k] = std::exp(g * s.field[k] - shift);
            for (size_t a = 0; a < alphas.size(); ++a) {
                double Z = 0.0;
                const double* w = weight[a].data();
                for (size_t k = 0; k < cells; ++k) Z += w[k] * wick[k];
                acc[a] += std::pow(Z, -alphas[a] / g);
            }
        }
        for (size_t a = 0; a < alphas.size(); ++a) sums[a][b] = acc[a] / double(count);
    });

    std::vector<McEstimate> out;
    for (size_t a = 0; a < alphas.size(); ++a) {
        const double al = alphas[a];
        McEstimate e;
        e.alpha = al;
        e.samples = cfg.samples;
        e.batches = cfg.batches;
        e.n = n;
        e.cutoff = geom.cutoff();
        e.W = W;
        e.det_prefactor = det;
        e.prefactor = det * std::tgamma(al / g) / g * std::pow(prm.mu, -al / g) * std::exp(-0.5 * al * g * W) *
                      std::exp(0.5 * al * al * W);
        double m, err;
        batch_stats(sums[a], m, err);
        e.expectation = m;
        e.mean = e.prefactor * m;
        e.std_error = e.prefactor * err;
        e.unstable = !(e.std_error <= 0.5 * std::abs(e.mean));
        for (double bm : sums[a]) e.batch_means.push_back(e.prefactor * bm);
        out.push_back(std::move(e));
    }
    return out;
}

McEstimate mc_torus_one_point(double alpha, const TorusGeometry& geom, const CftParams& prm, const McConfig& cfg) {
    return mc_torus_one_point(std::vector<double>{alpha}, geom, prm, cfg).front();
}

ReductionCheck mc_reduction_check(double alpha, const TorusGeometry& geom, const CftParams& prm, const McConfig& cfg) {
    prm.validate();
    geom.validate();
    check_mc_config(cfg);
    if (!(alpha > 0.0 && alpha < prm.Q())) throw ValidationError("alpha must lie in (0, Q)");
    const double g = prm.gamma, mu = prm.mu, dA = geom.cell_area();
    const size_t cells = size_t(geom.n) * geom.n;
    std::vector<double> direct(cfg.batches), shifted(cfg.batches);
    run_batches(geom, cfg, [&](int b, GffSampler& sampler) {
        auto rng = batch_stream(cfg.seed, b);
        GffSample s;
        const double var = sampler.variance();
        const auto& cov = sampler.covariance();
        const long count = batch_size(cfg, b);
        double d = 0.0, sh = 0.0;
        for (long t = 0; t < count; ++t) {
            sampler.sample(rng, s);
            double M = 0.0, Z = 0.0;
            for (size_t k = 0; k < cells; ++k) {
                const double wk = std::exp(g * s.field[k] - 0.5 * g * g * var);
                M += wk;
                Z += std::exp(alpha * g * cov[k]) * wk;
            }
            M *= dA;
            Z *= dA;
            d += std::exp(alpha * s.field[0] - 0.5 * alpha * alpha * var) * c_integral_numeric(alpha, g, mu, M);
            sh += c_integral(alpha, g, mu, Z);
        }
        direct[b] = d / double(count);
        shifted[b] = sh / double(count);
    });
    ReductionCheck r;
    batch_stats(direct, r.direct, r.direct_err);
    batch_stats(shifted, r.shifted, r.shifted_err);
    return r;
}

void write_batch_trace_csv(const std::string& path, const std::vector<McEstimate>& est) {
    std::ofstream f(path);
    if (!f) throw InputError("IoError", "cannot open " + path);
    f << "alpha,batch,batch_mean,running_mean\n";
    f.precision(17);
    for (const auto& e : est) {
        double run = 0.0;
        for (size_t b = 0; b < e.batch_means.size(); ++b) {
            run += e.batch_means[b];
            f << e.alpha << ',' << b << ',' << e.batch_means[b] << ',' << run / double(b + 1) << '\n';
        }
    }
}

}  // namespace lcft
