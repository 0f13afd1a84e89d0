#include "acceptance.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "lcft/bootstrap.hpp"
#include "lcft/dozz.hpp"
#include "lcft/free_field.hpp"
#include "lcft/gmc_oracle.hpp"
#include "lcft/virasoro.hpp"
#include "oracles.hpp"

namespace lcft::acceptance {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string sci(double x) { return fmt("%.2e", x); }

double rel(cplx a, cplx b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// 1. Upsilon shift relations on the z x gamma grid.
Verdict upsilon_shift() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    int points = 0;
    for (double g : {0.8, 1.0, std::sqrt(2.0), 1.8}) {
        UpsilonEvaluator ev(g);
        for (int k = 1; 0.1 * k <= ev.Q() - 0.6 + 1e-12; ++k) {
            const double z = 0.1 * k;
            const cplx u = ev(z);
            const cplx a = ev(z + g / 2.0), b = l_ratio(g * z / 2.0) * std::pow(g / 2.0, 1.0 - g * z) * u;
            const cplx c = ev(z + 2.0 / g), d = l_ratio(2.0 * z / g) * std::pow(g / 2.0, 4.0 * z / g - 1.0) * u;
            worst = std::max({worst, rel(a, b), rel(c, d)});
            points += 2;
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {worst < 1e-8 && secs < 10.0,
            "max relative residual " + sci(worst) + " over " + std::to_string(points) + " relations in " +
                fmt("%.2f", secs) + " s (limits 1e-8, 10 s)"};
}

// 2. Zeros and Upsilon'(0).
Verdict upsilon_zeros() {
    const double g = 1.3;
    UpsilonEvaluator ev(g);
    double worst = 0.0;
    for (double z0 : {-g / 2.0, -2.0 / g, ev.Q() + g / 2.0}) {
        double around = 0.0;
        for (int k = 0; k < 16; ++k) around = std::max(around, std::abs(ev(z0 + std::polar(0.1, 2.0 * kPi * k / 16.0))));
        worst = std::max(worst, std::abs(ev(z0)) / around);
    }
    // Richardson-extrapolated central difference, independent of the evaluator's own derivative.
    const double h = 1e-3;
    auto cd = [&](double s) { return (ev(cplx(s)) - ev(cplx(-s))) / (2.0 * s); };
    const cplx d1 = cd(h), d2 = cd(h / 2.0), d3 = cd(h / 4.0);
    const cplx r1 = (4.0 * d2 - d1) / 3.0, r2 = (4.0 * d3 - d2) / 3.0;
    const cplx deriv = (16.0 * r2 - r1) / 15.0;
    const double dres = rel(deriv, ev(g / 2.0));
    return {worst < 1e-6 && dres < 1e-8,
            "max |Y(zero)|/neighbourhood max " + sci(worst) + " (limit 1e-6); Y'(0) vs Y(gamma/2) " + sci(dres) +
                " (limit 1e-8)"};
}

// 3. DOZZ permutation symmetry and mu scaling.
Verdict dozz_symmetry() {
    const CftParams p1(1.2, 1.0), p2(1.2, 3.7);
    DozzEvaluator d1(p1), d2(p2);
    const double Q = p1.Q();
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.05, Q - 0.05), v(-0.5, 0.5);
    double sym = 0.0, scale = 0.0;
    int done = 0;
    while (done < 20) {
        const cplx a(u(rng), 0.0), b(u(rng), v(rng)), c(u(rng), v(rng));
        if (!((a + b + c).real() > 2.0 * Q)) continue;  // Seiberg bound
        cplx base;
        try {
            base = d1(a, b, c);
        } catch (const Error&) {
            continue;  // near a pole; draw again
        }
        for (auto t : {std::array<cplx, 3>{a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}})
            sym = std::max(sym, rel(d1(t[0], t[1], t[2]), base));
        scale = std::max(scale, rel(d2(a, b, c), std::pow(3.7, d1.mu_exponent(a, b, c)) * base));
        ++done;
    }
    return {sym < 1e-12 && scale < 1e-12,
            "20 triples: permutation residual " + sci(sym) + ", mu-scaling residual " + sci(scale) + " (limit 1e-12)"};
}

// 4. Kac determinant vanishing.
Verdict kac() {
    const CftParams p(std::sqrt(2.0), 1.0);
    double worst = 0.0;
    int cases = 0;
    for (int n = 1; n <= 4; ++n)
        for (int r = 1; r <= n; ++r)
            for (int s = 1; r * s <= n; ++s) {
                const cplx D = conformal_weight(kac_weight(r, s, p), p);
                worst = std::max(worst, normalized_determinant(shapovalov(D, p.c_L(), n)));
                ++cases;
            }
    return {worst <= 1e-8, std::to_string(cases) + " (r,s,n) cases, max |det F|/||F|| " + sci(worst) + " (limit 1e-8)"};
}

// 5. Gram matrices against the exact rational oracle.
Verdict gram_exact() {
    using oracle::Rational;
    const std::pair<Rational, Rational> cases[] = {
        {Rational(3, 8), Rational(28)}, {Rational(5, 4), Rational(51, 2)}, {Rational(-7, 16), Rational(26)}};
    int entries = 0, bad = 0;
    for (const auto& [D, c] : cases)
        for (int n = 1; n <= 3; ++n) {
            const auto basis = partitions(n);
            std::vector<std::vector<int>> raw;
            for (const auto& b : basis) raw.push_back(b.parts);
            const auto ref = oracle::gram_matrix(D, c, raw);
            const auto g = shapovalov(cplx(boost::rational_cast<double>(D)), boost::rational_cast<double>(c), n);
            for (size_t i = 0; i < raw.size(); ++i)
                for (size_t j = 0; j < raw.size(); ++j) {
                    ++entries;
                    if (g.F(i, j) != cplx(boost::rational_cast<double>(ref[i][j]), 0.0)) ++bad;
                }
        }
    return {bad == 0, std::to_string(entries) + " entries at levels 1-3, " + std::to_string(bad) + " differ"};
}

// 6. Torus block level-1 coefficient.
Verdict torus_level_one() {
    const CftParams prm(std::sqrt(2.0), 1.0);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ua(0.05, prm.Q() - 0.05), up(0.05, 3.0);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double a = ua(rng), p = up(rng);
        const auto s = torus_one_point_block(a, p, prm, {1, 1e10});
        const cplx D = conformal_weight(cplx(prm.Q(), p), prm), Da = conformal_weight(a, prm);
        worst = std::max(worst, rel(s.coeffs.at({1}), Da * (Da - 1.0) / (2.0 * D) + 1.0));
    }
    return {worst < 1e-10, "10 random (alpha, p): max relative error " + sci(worst) + " (limit 1e-10)"};
}

// 7. Genus-2 graph against a direct transcription; single annulus against torus_one_point.
Verdict genus_two(int threads) {
    const CftParams prm;
    const double Q = prm.Q(), c = prm.c_L();
    const int N = 3;
    BootstrapOptions opt;
    opt.quad = Quadrature::composite(6.0, 1.5, 4);
    opt.N = N;
    opt.threads = threads;
    // Graph edge order: e1 shared, e2 loop at P2, e3 loop at P1.
    const std::array<cplx, 3> qg{cplx(0.1, 0.02), cplx(0.0, 0.15), cplx(0.12, -0.05)};
    const auto graph = graph_correlator(genus_two_graph(qg), {}, {}, {}, prm, opt);

    // Transcription with the printed labels: p1 shared, p2 loop at P1, p3 loop at P2.
    const auto& x = opt.quad.nodes;
    const auto& w = opt.quad.weights;
    const size_t m = x.size();
    const cplx qs = qg[0], q1loop = qg[2], q2loop = qg[1];
    DozzEvaluator dz(prm);
    const LevelBasis B(N);
    auto D = [&](double p) { return conformal_weight(cplx(Q, p), prm); };
    std::vector<GramInverseStack> finv;
    for (double p : x) finv.push_back(gram_inverse_stack(D(p), c, N));
    std::map<std::pair<size_t, size_t>, BlockCoeffTensor> pant;
    auto tensor = [&](size_t i, size_t j) -> const BlockCoeffTensor& {
        auto it = pant.find({i, j});
        if (it == pant.end()) it = pant.emplace(std::make_pair(i, j), pant_tensor({D(x[i]), D(x[j]), D(x[j])}, c, {N, N, N})).first;
        return it->second;
    };
    double total = 0.0;
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j)
            for (size_t k = 0; k < m; ++k) {
                const auto& P1 = tensor(i, j);
                const auto& P2 = tensor(i, k);
                cplx hol = 0.0;
                for (int n1 = 0; n1 <= N; ++n1)
                    for (int n2 = 0; n2 <= N; ++n2)
                        for (int n3 = 0; n3 <= N; ++n3) {
                            cplx coeff = 0.0;
                            for (int a = 0; a < B.count(n1); ++a)
                                for (int ap = 0; ap < B.count(n1); ++ap)
                                    for (int b = 0; b < B.count(n2); ++b)
                                        for (int bp = 0; bp < B.count(n2); ++bp)
                                            for (int e = 0; e < B.count(n3); ++e)
                                                for (int ep = 0; ep < B.count(n3); ++ep)
                                                    coeff += finv[i].inv[n1](a, ap) * finv[j].inv[n2](b, bp) *
                                                             finv[k].inv[n3](e, ep) *
                                                             P1.at({B.offset[n1] + a, B.offset[n2] + bp, B.offset[n2] + b}) *
                                                             P2.at({B.offset[n1] + ap, B.offset[n3] + ep, B.offset[n3] + e});
                            hol += coeff * std::pow(qs, n1) * std::pow(q1loop, n2) * std::pow(q2loop, n3);
                        }
                const double pre = std::pow(std::abs(qs), -c / 24.0 + D(x[i]).real()) *
                                   std::pow(std::abs(q1loop), -c / 24.0 + D(x[j]).real()) *
                                   std::pow(std::abs(q2loop), -c / 24.0 + D(x[k]).real());
                const cplx rho = dz(cplx(Q, -x[i]), cplx(Q, -x[j]), cplx(Q, x[j])) * dz(cplx(Q, x[i]), cplx(Q, x[k]), cplx(Q, -x[k]));
                total += w[i] * w[j] * w[k] * rho.real() * std::norm(pre * hol);
            }
    total *= std::pow(2.0, 1.5) / std::pow(2.0 * kPi, 5);
    const double g2 = std::abs(graph.value - total) / std::abs(total);

    BootstrapOptions o1;
    o1.N = 4;
    o1.threads = threads;
    const cplx tau(0.2, 0.8);
    const double alpha = 0.9;
    const auto loop = graph_correlator(torus_chain_graph({alpha}, {std::exp(2.0 * kPi * cplx(0.0, 1.0) * tau)}), {}, {}, {},
                                       prm, o1);
    const auto direct = torus_one_point(alpha, tau, prm, o1);
    const double a1 = std::abs(loop.value - direct.value) / std::abs(direct.value);
    return {g2 < 1e-10 && a1 < 1e-10, "genus 2 (N=3, " + std::to_string(m) + "^3 nodes) value " + sci(total) + ", relative difference " + sci(g2) +
                                          "; self-loop annulus vs torus one-point " + sci(a1) + " (limit 1e-10)"};
}

// 8. Free-field identities at M = 8 modes.
Verdict free_field() {
    const CftParams prm(1.1, 1.0);
    const double Q = prm.Q();
    const int M = 8;
    std::mt19937_64 rng(23);
    std::normal_distribution<double> nd(0.0, 1.0);
    auto field = [&](int modes) {
        BoundaryField f(modes);
        f.c = nd(rng);
        for (int i = 0; i < modes; ++i) {
            f.x[i] = nd(rng);
            f.y[i] = nd(rng);
        }
        return f;
    };
    double semi = 0.0;
    for (double t : {0.3, 0.7})
        for (double s : {0.4, 1.0}) {
            const auto f = field(M), h = field(M);
            const double got = oracle::gaussian_integral(M, [&](const BoundaryField& g) {
                return std::log(heat_kernel_K0(t, f, g, prm)) + std::log(heat_kernel_K0(s, g, h, prm));
            });
            semi = std::max(semi, std::abs(got / heat_kernel_K0(t + s, f, h, prm) - 1.0));
        }
    double rel_a = 0.0;
    for (double r : {0.1, 0.4, 0.8}) {
        const auto f = field(M), g = field(M);
        const cplx q = std::polar(r, 0.7);
        const double t = -std::log(r);
        const double A = free_annulus_amplitude(q, f, g);
        double prod = 1.0;
        for (int n = 1; n <= M; ++n) prod *= 1.0 - std::pow(r, 2 * n);
        const double viaK = std::sqrt(2.0 * kPi * t) * std::pow(r, -Q * Q / 2.0) * heat_kernel_K0(t, f, g, prm) * prod;
        // Z_{A_q} times the zero-field normalisation of A0 gives sqrt(2) pi |q|^{-c/12}.
        const double Zc = annulus_partition(q) * std::sqrt(2.0 * kPi * t) * std::pow(r, -Q * Q / 2.0) * euler_product(r * r);
        const double Zw = std::sqrt(2.0) * kPi * std::pow(r, -prm.c_L() / 12.0);
        rel_a = std::max({rel_a, std::abs(A / viaK - 1.0), std::abs(Zc / Zw - 1.0)});
    }
    // Eigenrelation with the full Euler product: error must fall as M grows.
    std::vector<double> errs;
    const double alpha = 0.7, t = 0.5;
    for (int m : {2, 4, 8}) {
        const auto f = field(m);
        const double got = oracle::gaussian_integral(m, [&](const BoundaryField& g) {
            return std::log(heat_kernel_K0(t, f, g, prm, ModeProduct::Full)) + (alpha - Q) * g.c;
        });
        const double want = std::exp(-2.0 * conformal_weight(alpha, prm).real() * t + (alpha - Q) * f.c);
        errs.push_back(std::abs(got / want - 1.0));
    }
    const bool mono = errs[0] > errs[1] && errs[1] > errs[2];
    return {semi < 1e-8 && rel_a < 1e-8 && mono,
            "semigroup " + sci(semi) + ", A0/K0/Z relation " + sci(rel_a) + " (limit 1e-8); eigenrelation errors M=2,4,8: " +
                sci(errs[0]) + ", " + sci(errs[1]) + ", " + sci(errs[2])};
}

// 9. Monte Carlo against the bootstrap.
Verdict mc_vs_bootstrap(const Options& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const CftParams prm(std::sqrt(2.0), 1.0);
    const cplx tau(0.0, 1.0);
    const std::vector<double> alphas{0.8, 1.2};
    McConfig cfg;
    cfg.seed = o.seed;
    cfg.samples = o.mc_samples;
    cfg.batches = 40;
    cfg.threads = o.threads;
    const auto fine = mc_torus_one_point(alphas, TorusGeometry(tau, 128), prm, cfg);
    const auto coarse = mc_torus_one_point(alphas, TorusGeometry(tau, 64), prm, cfg);
    BootstrapOptions bo;
    bo.N = 5;
    bo.threads = o.threads;
    bool ok = o.mc_samples >= 200000;
    std::string detail;
    for (size_t k = 0; k < alphas.size(); ++k) {
        const double b = torus_one_point(alphas[k], tau, prm, bo).value;
        const auto& f = fine[k];
        const auto& c = coarse[k];
        const bool agree = std::abs(f.mean - b) <= std::max(3.0 * f.std_error, 0.1 * b);
        const bool cutoff = std::abs(f.mean - c.mean) <= 3.0 * std::hypot(f.std_error, c.std_error);
        ok = ok && agree && cutoff && !f.unstable;
        detail += fmt("alpha=%.1f: ", alphas[k]) + "MC128 " + fmt("%.5f", f.mean) + "+-" + fmt("%.5f", f.std_error) +
                  ", MC64 " + fmt("%.5f", c.mean) + "+-" + fmt("%.5f", c.std_error) + ", bootstrap " + fmt("%.5f", b) +
                  ", MC/bootstrap " + fmt("%.3f", f.mean / b) + (agree ? "" : " [outside tolerance]") +
                  (cutoff ? "" : " [64/128 drift]") + "; ";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = ok && secs <= 600.0;
    detail += std::to_string(o.mc_samples) + " samples per grid, " + fmt("%.0f", secs) + " s";
    return {ok, detail};
}

// 10. Quadrature/truncation doubling and Cauchy-decreasing partial sums.
Verdict robustness(int threads) {
    const CftParams prm(std::sqrt(2.0), 1.0);
    const cplx tau(0.0, 1.0);
    BootstrapOptions base, dbl;
    base.N = 5;
    base.threads = threads;
    dbl.quad = Quadrature::composite(2.0 * base.quad.p_max, base.quad.panel_width, 2 * base.quad.per_panel);
    dbl.N = 10;
    dbl.threads = threads;
    double worst = 0.0;
    for (double a : {0.8, 1.2}) {
        const double v0 = torus_one_point(a, tau, prm, base).value, v1 = torus_one_point(a, tau, prm, dbl).value;
        worst = std::max(worst, std::abs(v1 / v0 - 1.0));
    }
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> up(0.05, 3.0);
    bool cauchy = true;
    for (int k = 0; k < 5; ++k) {
        const auto s = torus_one_point_block(1.2, up(rng), prm, {8, 1e10});
        for (double r : {0.5, 0.25}) {
            const std::vector<cplx> q{std::polar(r, 0.9 * k)};
            double prev = 1e300;
            for (int n = 0; n <= 8; ++n) {
                const double t = std::abs(s.level_contribution(q, n));
                cauchy = cauchy && t < prev;
                prev = t;
            }
        }
    }
    return {worst < 0.01 && cauchy, "doubling P_max, nodes and N (5 -> 10) changes the value by " + sci(worst) +
                                         " (limit 1e-2); partial-sum increments " +
                                         (cauchy ? "decrease" : "do not decrease") + " for N <= 8, |q| in {0.25, 0.5}, 5 p"};
}

}  // namespace

std::string format(const Outcome& o) {
    return std::string(o.pass ? "PASS" : "FAIL") + " [" + std::to_string(o.id) + "] " + o.name + ": " + o.detail + " (" +
           fmt("%.1f", o.seconds) + " s)";
}

std::vector<Outcome> run(const Options& opt, const std::function<void(const Outcome&)>& report) {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"upsilon shift relations", upsilon_shift},
        {"upsilon zero lattice", upsilon_zeros},
        {"dozz symmetry and mu scaling", dozz_symmetry},
        {"kac vanishing", kac},
        {"gram matrices vs exact rational oracle", gram_exact},
        {"torus block level one", torus_level_one},
        {"genus-2 graph vs direct transcription", [&] { return genus_two(opt.threads); }},
        {"free-field identities", free_field},
        {"monte carlo vs bootstrap", [&] { return mc_vs_bootstrap(opt); }},
        {"quadrature and truncation robustness", [&] { return robustness(opt.threads); }},
    };
    std::vector<Outcome> out;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!opt.only.empty() && !opt.only.count(id)) continue;
        Outcome o;
        o.id = id;
        o.name = criteria[i].first;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const auto v = criteria[i].second();
            o.pass = v.pass;
            o.detail = v.detail;
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("threw ") + e.what();
        }
        o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (report) report(o);
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace lcft::acceptance
