#include "lcft/blocks.hpp"

#include <cmath>
#include <functional>

#include "lcft/errors.hpp"
#include "lcft/params.hpp"

namespace lcft {

namespace {

constexpr double kPi = 3.14159265358979323846;

void add_scaled(Form& dst, const Form& src, cplx a) {
    if (a == 0.0) return;
    for (const auto& [m, v] : src) {
        auto [it, inserted] = dst.emplace(m, a * v);
        if (!inserted) {
            it->second += a * v;
            if (it->second == 0.0) dst.erase(it);
        }
    }
}

int pair_index(int i, int j) {
    int a = std::min(i, j), b = std::max(i, j);
    if (a == 0 && b == 1) return 0;
    if (a == 0 && b == 2) return 1;
    return 2;
}

// f * (z_i - z_j)^k
Form times_power(const Form& f, int i, int j, int k) {
    Form out;
    const int idx = pair_index(i, j);
    const double sign = (i < j || k % 2 == 0) ? 1.0 : -1.0;
    for (const auto& [m, v] : f) {
        Monomial mm = m;
        mm[idx] += k;
        out[mm] += sign * v;
    }
    return out;
}

// generalized binomial coefficient binom(x, j)
double gbinom(int x, int j) {
    double r = 1.0;
    for (int t = 0; t < j; ++t) r = r * double(x - t) / double(t + 1);
    return r;
}

YoungDiagram drop_last(const YoungDiagram& nu) {
    return YoungDiagram(std::vector<int>(nu.parts.begin(), nu.parts.end() - 1));
}

}  // namespace

std::array<cplx, 3> pant_points() { return {cplx(-0.5, 0.0), cplx(0.5, 0.0), cplx(0.0, std::sqrt(3.0) / 2.0)}; }

ThreePointEngine::ThreePointEngine(cplx d1, cplx d2, cplx d3, cplx c)
    : d_{d1, d2, d3},
      e_{d3 - d1 - d2, d2 - d1 - d3, d1 - d2 - d3},
      mod_{VermaModule<cplx>(d1, c), VermaModule<cplx>(d2, c), VermaModule<cplx>(d3, c)} {}

cplx ThreePointEngine::evaluate(const Form& f, const std::array<cplx, 3>& z) {
    const cplx z12 = z[0] - z[1], z13 = z[0] - z[2], z23 = z[1] - z[2];
    cplx s = 0.0;
    for (const auto& [m, v] : f) s += v * std::pow(z12, m[0]) * std::pow(z13, m[1]) * std::pow(z23, m[2]);
    return s;
}

Form ThreePointEngine::derivative(const Form& f, int slot) const {
    // d/dz_slot of H * z12^a z13^b z23^c, divided by H
    Form out;
    auto push = [&](Monomial m, int idx, cplx coef) {
        if (coef == 0.0) return;
        m[idx] -= 1;
        auto [it, inserted] = out.emplace(m, coef);
        if (!inserted) it->second += coef;
    };
    for (const auto& [m, v] : f) {
        const cplx f12 = e_[0] + double(m[0]), f13 = e_[1] + double(m[1]), f23 = e_[2] + double(m[2]);
        if (slot == 0) {
            push(m, 0, v * f12);
            push(m, 1, v * f13);
        } else if (slot == 1) {
            push(m, 0, -v * f12);
            push(m, 2, v * f23);
        } else {
            push(m, 1, -v * f13);
            push(m, 2, -v * f23);
        }
    }
    for (auto it = out.begin(); it != out.end();) it = (it->second == 0.0) ? out.erase(it) : std::next(it);
    return out;
}

const Form& ThreePointEngine::bracket(const YoungDiagram& n1, const YoungDiagram& n2, const YoungDiagram& n3) {
    Key k{n1, n2, n3};
    auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
    Form f = compute(k);
    return memo_.emplace(std::move(k), std::move(f)).first->second;
}

Form ThreePointEngine::compute(const Key& k) {
    Form out;
    if (!k[2].empty()) {
        // move L_{-m} off slot 3 onto the modes of slots 1 and 2
        const int m = k[2].parts.back();
        const YoungDiagram rest = drop_last(k[2]);
        for (int i = 0; i < 2; ++i) {
            const int lvl = k[i].level();
            for (int j = 0; j <= lvl + 1; ++j) {
                const double b = gbinom(1 - m, j);
                if (b == 0.0) continue;
                VermaVector<cplx> lv = mod_[i].apply_basis(j - 1, k[i]);
                for (const auto& [mu, a] : lv.coeffs) {
                    Key sub = k;
                    sub[i] = mu;
                    sub[2] = rest;
                    Form f = times_power(bracket(sub[0], sub[1], sub[2]), i, 2, 1 - m - j);
                    add_scaled(out, f, -b * a);
                }
            }
        }
        return out;
    }
    if (!k[1].empty()) {
        const int m = k[1].parts.back();
        const YoungDiagram rest = drop_last(k[1]);
        const Form base = bracket(k[0], rest, YoungDiagram{});
        // primary at z3
        add_scaled(out, times_power(derivative(base, 2), 2, 1, 1 - m), -1.0);
        add_scaled(out, times_power(base, 2, 1, -m), double(m - 1) * d_[2]);
        // descendant at z1 via its modes
        const int lvl = k[0].level();
        for (int j = 0; j <= lvl + 1; ++j) {
            const double b = gbinom(1 - m, j);
            if (b == 0.0) continue;
            VermaVector<cplx> lv = mod_[0].apply_basis(j - 1, k[0]);
            for (const auto& [mu, a] : lv.coeffs)
                add_scaled(out, times_power(bracket(mu, rest, YoungDiagram{}), 0, 1, 1 - m - j), -b * a);
        }
        return out;
    }
    if (!k[0].empty()) {
        const int m = k[0].parts.back();
        const Form base = bracket(drop_last(k[0]), YoungDiagram{}, YoungDiagram{});
        for (int i = 1; i < 3; ++i) {
            add_scaled(out, times_power(derivative(base, i), i, 0, 1 - m), -1.0);
            add_scaled(out, times_power(base, i, 0, -m), double(m - 1) * d_[i]);
        }
        return out;
    }
    out[{0, 0, 0}] = 1.0;
    return out;
}

cplx ThreePointEngine::ratio(const YoungDiagram& n1, const YoungDiagram& n2, const YoungDiagram& n3,
                             const std::array<cplx, 3>& z) {
    return evaluate(bracket(n1, n2, n3), z);
}

RadialEngine::RadialEngine(cplx d_in, cplx d_mid, cplx d_out, cplx c)
    : din_(d_in), dmid_(d_mid), dout_(d_out), in_mod_(d_in, c) {}

cplx RadialEngine::element(const YoungDiagram& nu_in, const YoungDiagram& nu_out) {
    return bra_basis(nu_out, nu_in);
}

cplx RadialEngine::bra(const YoungDiagram& nu_out, const VermaVector<cplx>& ket) {
    cplx s = 0.0;
    for (const auto& [mu, a] : ket.coeffs) s += a * bra_basis(nu_out, mu);
    return s;
}

cplx RadialEngine::bra_basis(const YoungDiagram& nu_out, const YoungDiagram& nu_in) {
    if (nu_out.empty() && nu_in.empty()) return 1.0;
    auto key = std::make_pair(nu_out, nu_in);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    cplx r;
    if (nu_out.empty()) {
        // <D_out| V L_{-m} |rest> = (h_rest + m D_mid - D_out) <D_out| V |rest>
        const int m = nu_in.parts.back();
        const YoungDiagram rest = drop_last(nu_in);
        r = (din_ + double(rest.level()) + double(m) * dmid_ - dout_) * bra_basis(nu_out, rest);
    } else {
        // <xi| L_n V |eta> = <xi| V L_n |eta> + (h_xi + n D_mid - h_eta) <xi| V |eta>
        const int n = nu_out.parts.back();
        const YoungDiagram xi = drop_last(nu_out);
        VermaVector<cplx> lk = in_mod_.apply_basis(n, nu_in);
        const cplx h_xi = dout_ + double(xi.level()), h_eta = din_ + double(nu_in.level());
        r = bra(xi, lk) + (h_xi + double(n) * dmid_ - h_eta) * bra_basis(xi, nu_in);
    }
    memo_.emplace(std::move(key), r);
    return r;
}

cplx three_point_descendant(cplx d1, cplx d2, cplx d3, const YoungDiagram& n1, const YoungDiagram& n2,
                            const YoungDiagram& n3, double c, Frame frame) {
    if (frame == Frame::Radial) {
        if (!n2.empty()) throw ValidationError("radial frame carries no descendant on the middle slot");
        RadialEngine eng(d3, d2, d1, c);
        return eng.element(n3, n1);
    }
    ThreePointEngine eng(d1, d2, d3, c);
    return eng.ratio(n1, n2, n3);
}

LevelBasis::LevelBasis(int n) : N(n) {
    offset.push_back(0);
    for (int l = 0; l <= N; ++l) {
        for (auto& p : partitions(l)) diagrams.push_back(std::move(p));
        offset.push_back(static_cast<int>(diagrams.size()));
    }
}

cplx BlockCoeffTensor::at(const int* idx) const {
    size_t flat = 0;
    for (int s = 0; s < rank(); ++s) flat = flat * bases[s].size() + idx[s];
    return data[flat];
}

cplx BlockCoeffTensor::at(std::initializer_list<int> idx) const { return at(idx.begin()); }

BlockCoeffTensor annulus_tensor(cplx d_in, cplx d_mid, cplx d_out, double c, int N) {
    BlockCoeffTensor t;
    t.kind = TensorKind::Annulus;
    t.levels = {N, N};
    t.bases = {LevelBasis(N), LevelBasis(N)};
    RadialEngine eng(d_in, d_mid, d_out, c);
    const int d = t.bases[0].size();
    t.data.resize(size_t(d) * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) t.data[size_t(i) * d + j] = eng.element(t.bases[0].diagrams[i], t.bases[1].diagrams[j]);
    return t;
}

BlockCoeffTensor disk_tensor(cplx d_out, cplx d_mid, cplx d_in, double c, int N) {
    BlockCoeffTensor t;
    t.kind = TensorKind::Disk;
    t.levels = {N};
    t.bases = {LevelBasis(N)};
    RadialEngine eng(d_in, d_mid, d_out, c);
    for (const auto& nu : t.bases[0].diagrams) t.data.push_back(eng.element(YoungDiagram{}, nu));
    return t;
}

BlockCoeffTensor pant_tensor(const std::array<cplx, 3>& d, double c, const std::array<int, 3>& Ns) {
    BlockCoeffTensor t;
    t.kind = TensorKind::Pant;
    t.levels = {Ns[0], Ns[1], Ns[2]};
    t.bases = {LevelBasis(Ns[0]), LevelBasis(Ns[1]), LevelBasis(Ns[2])};
    ThreePointEngine eng(d[0], d[1], d[2], c);
    const auto z = pant_points();
    for (const auto& a : t.bases[0].diagrams)
        for (const auto& b : t.bases[1].diagrams)
            for (const auto& e : t.bases[2].diagrams) t.data.push_back(eng.ratio(a, b, e, z));
    return t;
}

GramInverseStack gram_inverse_stack(cplx delta, double c, int N, double cond_guard) {
    GramInverseStack s;
    VermaModule<cplx> mod(delta, cplx(c));
    for (int n = 0; n <= N; ++n) {
        GramMatrix g = shapovalov(mod, n);
        GramInverse gi = shapovalov_inverse(g, cond_guard);
        s.worst_residual = std::max(s.worst_residual, gi.residual);
        s.worst_condition = std::max(s.worst_condition, gi.condition);
        s.inv.push_back(std::move(gi.inv));
    }
    return s;
}

cplx BlockSeries::holomorphic(const std::vector<cplx>& q) const {
    cplx s = 0.0;
    for (const auto& [n, a] : coeffs) {
        cplx t = a;
        for (size_t i = 0; i < n.size(); ++i) t *= std::pow(q[i], n[i]);
        s += t;
    }
    return s;
}

double BlockSeries::prefactor(const std::vector<cplx>& q) const {
    double f = extra_prefactor;
    for (size_t i = 0; i < abs_exponent.size(); ++i) f *= std::pow(std::abs(q[i]), abs_exponent[i]);
    return f;
}

cplx BlockSeries::level_contribution(const std::vector<cplx>& q, int lvl) const {
    cplx s = 0.0;
    for (const auto& [n, a] : coeffs) {
        int mx = 0;
        for (int v : n) mx = std::max(mx, v);
        if (mx != lvl) continue;
        cplx t = a;
        for (size_t i = 0; i < n.size(); ++i) t *= std::pow(q[i], n[i]);
        s += t;
    }
    return s;
}

namespace {

// sub-block of a packed tensor matrix: rows at level a, columns at level b
Eigen::MatrixXcd level_block(const BlockCoeffTensor& t, int a, int b) {
    const auto& r = t.bases[0];
    const auto& c = t.bases[1];
    Eigen::MatrixXcd m(r.count(a), c.count(b));
    const int cols = c.size();
    for (int i = 0; i < r.count(a); ++i)
        for (int j = 0; j < c.count(b); ++j) m(i, j) = t.data[size_t(r.offset[a] + i) * cols + c.offset[b] + j];
    return m;
}

Eigen::VectorXcd level_vector(const BlockCoeffTensor& t, int a) {
    const auto& r = t.bases[0];
    Eigen::VectorXcd v(r.count(a));
    for (int i = 0; i < r.count(a); ++i) v(i) = t.data[r.offset[a] + i];
    return v;
}

void for_each_multi(int k, int N, const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> n(k, 0);
    while (true) {
        f(n);
        int i = 0;
        while (i < k && n[i] == N) n[i++] = 0;
        if (i == k) return;
        ++n[i];
    }
}

}  // namespace

BlockSeries torus_one_point_block(cplx alpha, double p, const CftParams& prm, const BlockOptions& opt) {
    return chain_block(ChainKind::Torus, {alpha}, {p}, prm, opt);
}

BlockSeries chain_block(ChainKind kind, const std::vector<cplx>& alphas, const std::vector<double>& ps,
                        const CftParams& prm, const BlockOptions& opt, const std::vector<cplx>& z) {
    const double c = prm.c_L();
    const int N = opt.N;
    BlockSeries s;
    s.N = N;
    auto dp = [&](double p) { return conformal_weight(cplx(prm.Q(), p), prm); };
    auto da = [&](cplx a) { return conformal_weight(a, prm); };

    if (kind == ChainKind::Torus) {
        const int k = static_cast<int>(alphas.size());
        if (k < 1 || static_cast<int>(ps.size()) != k)
            throw DimensionMismatch("torus chain needs k weights and k momenta");
        std::vector<GramInverseStack> finv;
        std::vector<BlockCoeffTensor> w;  // w[j] = w^A(p_j, alpha_j, p_{j-1}), 0-based
        for (int j = 0; j < k; ++j) {
            finv.push_back(gram_inverse_stack(dp(ps[j]), c, N, opt.cond_guard));
            w.push_back(annulus_tensor(dp(ps[j]), da(alphas[j]), dp(ps[(j + k - 1) % k]), c, N));
            s.abs_exponent.push_back(-c / 24.0 + dp(ps[j]).real());
        }
        for_each_multi(k, N, [&](const std::vector<int>& n) {
            // Tr(F^{-1}_{k} W_k F^{-1}_{k-1} W_{k-1} ... F^{-1}_1 W_1)
            Eigen::MatrixXcd acc = finv[k - 1].inv[n[k - 1]];
            for (int j = k - 1; j >= 0; --j) {
                int prev = (j + k - 1) % k;
                acc = (acc * level_block(w[j], n[j], n[prev])).eval();
                if (j > 0) acc = (acc * finv[prev].inv[n[prev]]).eval();
            }
            s.coeffs[n] = acc.trace();
        });
        return s;
    }

    const int k = static_cast<int>(alphas.size());
    if (k < 4 || static_cast<int>(ps.size()) != k - 3)
        throw DimensionMismatch("sphere chain needs k >= 4 weights and k-3 momenta");
    const int m = k - 3;
    std::vector<GramInverseStack> finv;
    for (int j = 0; j < m; ++j) {
        finv.push_back(gram_inverse_stack(dp(ps[j]), c, N, opt.cond_guard));
        s.abs_exponent.push_back(dp(ps[j]).real());
    }
    // ps[j] is p_{j+2}; alphas[i] is alpha_{i+1}
    BlockCoeffTensor u = disk_tensor(dp(ps.front()), da(alphas[1]), da(alphas[0]), c, N);
    BlockCoeffTensor v = disk_tensor(dp(ps.back()), da(alphas[k - 2]), da(alphas[k - 1]), c, N);
    std::vector<BlockCoeffTensor> w;
    for (int j = 0; j + 1 < m; ++j) w.push_back(annulus_tensor(dp(ps[j]), da(alphas[j + 2]), dp(ps[j + 1]), c, N));
    for_each_multi(m, N, [&](const std::vector<int>& n) {
        Eigen::VectorXcd x = finv[m - 1].inv[n[m - 1]] * level_vector(v, n[m - 1]);
        for (int j = m - 2; j >= 0; --j) x = finv[j].inv[n[j]] * (level_block(w[j], n[j], n[j + 1]) * x);
        s.coeffs[n] = (level_vector(u, n[0]).transpose() * x)(0);
    });
    if (!z.empty()) s.extra_prefactor = sphere_z_prefactor(alphas, z, prm);
    return s;
}

double sphere_z_prefactor(const std::vector<cplx>& alphas, const std::vector<cplx>& z, const CftParams& prm) {
    const int k = static_cast<int>(alphas.size());
    if (static_cast<int>(z.size()) != k) throw DimensionMismatch("sphere chain needs k positions");
    auto da = [&](cplx a) { return conformal_weight(a, prm).real(); };
    double f = 1.0;
    for (int j = 1; j + 1 < k; ++j) {
        const double r = std::abs(z[j]);
        f *= (r < 1.0) ? std::pow(r, -da(alphas[j])) : std::pow(r, da(alphas[j]));
    }
    f *= std::pow(std::abs(z[1]), -da(alphas[0]));
    f *= std::pow(std::abs(z[k - 2]), da(alphas[k - 1]));
    return f;
}

std::vector<cplx> torus_chain_q(const std::vector<cplx>& x, cplx tau) {
    const cplx iu(0.0, 1.0);
    const size_t k = x.size();
    std::vector<cplx> q(k);
    for (size_t j = 0; j + 1 < k; ++j) q[j] = std::exp(iu * (x[j + 1] - x[j]));
    q[k - 1] = std::exp(2.0 * kPi * iu * tau) * std::exp(-iu * x[k - 1]);
    return q;
}

std::vector<cplx> sphere_chain_q(const std::vector<cplx>& z) {
    std::vector<cplx> q;
    for (size_t j = 1; j + 2 < z.size(); ++j) q.push_back(z[j] / z[j + 1]);
    return q;
}

}  // namespace lcft
