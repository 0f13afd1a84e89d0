#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lcft/graph.hpp"

namespace lcft {

// Composite Gauss-Legendre rule on (0, p_max].
struct Quadrature {
    std::vector<double> nodes, weights;
    double p_max = 12.0;
    double panel_width = 0.5;
    int per_panel = 8;

    static Quadrature composite(double p_max = 12.0, double panel_width = 0.5, int per_panel = 8);
    int panels() const { return static_cast<int>(nodes.size()) / per_panel; }
    bool in_last_panel(int i) const { return i >= static_cast<int>(nodes.size()) - per_panel; }
};

struct BootstrapOptions {
    Quadrature quad = Quadrature::composite();
    int N = 6;
    double cond_guard = 1e10;
    double node_budget = 1e6;
    int threads = 0;            // 0: LCFT_THREADS, then hardware concurrency
    bool keep_density = false;  // fill CorrelatorResult::density
};

struct CorrelatorResult {
    double value = 0.0;
    double imag = 0.0;           // accumulated imaginary part of rho |F|^2
    double prefactor = 0.0;      // constant in front of the p-integral, metric constants included
    double tail = 0.0;           // share of the integral coming from the last panel
    double last_level = 0.0;     // integrand-weighted |level-N shell| / |block|
    double mu_exponent = 0.0;    // value(mu) = mu^{mu_exponent} value(1)
    double min_rho = 0.0;        // smallest real part of rho over the grid
    double max_rho_imag = 0.0;   // largest |Im rho| / |rho|
    size_t grid_points = 0;
    int edges = 0;
    // rows (p_1..p_L, rho, |F|^2, integrand)
    std::vector<std::vector<double>> density;
};

struct Violation {
    int vertex = -1;   // -1: global or per-weight condition
    double margin = 0.0;
    std::string what;
};

std::vector<Violation> validate_graph(const AdmissibleGraph& g, const std::vector<double>& alphas, const CftParams& prm);

CorrelatorResult torus_one_point(double alpha, cplx tau, const CftParams& prm, const BootstrapOptions& opt = {});
CorrelatorResult torus_k_point(const std::vector<double>& alphas, const std::vector<cplx>& x, cplx tau,
                               const CftParams& prm, const BootstrapOptions& opt = {});
CorrelatorResult sphere_k_point(const std::vector<double>& alphas, const std::vector<cplx>& z, const CftParams& prm,
                                const BootstrapOptions& opt = {});
// q and alphas default to the graph's own values when empty; metric overrides per vertex.
CorrelatorResult graph_correlator(const AdmissibleGraph& g, const std::vector<cplx>& q, const std::vector<double>& alphas,
                                  const std::vector<std::optional<double>>& metric, const CftParams& prm,
                                  const BootstrapOptions& opt = {});

// 2^{(3g-3+m)/2} / (2 pi)^{6g-6+2m-1}
double gluing_prefactor(int genus, int marked);

AdmissibleGraph graph_from_json(const std::string& text);
std::string graph_to_json(const AdmissibleGraph& g);

void write_density_csv(const std::string& path, const CorrelatorResult& r);

int resolve_threads(int requested);

}  // namespace lcft
