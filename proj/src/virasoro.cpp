#include "lcft/virasoro.hpp"

#include <functional>

namespace lcft {

bool YoungDiagram::valid() const {
    for (size_t i = 0; i < parts.size(); ++i) {
        if (parts[i] <= 0) return false;
        if (i > 0 && parts[i] > parts[i - 1]) return false;
    }
    return true;
}

std::vector<YoungDiagram> partitions(int n) {
    std::vector<YoungDiagram> out;
    if (n < 0) return out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int left, int maxpart) {
        if (left == 0) {
            out.emplace_back(cur);
            return;
        }
        for (int p = std::min(left, maxpart); p >= 1; --p) {
            cur.push_back(p);
            rec(left - p, p);
            cur.pop_back();
        }
    };
    rec(n, n);
    return out;
}

int partition_count(int n) {
    if (n < 0) return 0;
    std::vector<long long> p(n + 1, 0);
    p[0] = 1;
    for (int k = 1; k <= n; ++k)
        for (int m = k; m <= n; ++m) p[m] += p[m - k];
    return static_cast<int>(p[n]);
}

double kac_weight(int r, int s, const CftParams& p) {
    return p.Q() - r * p.gamma / 2.0 - s * 2.0 / p.gamma;
}

GramMatrix shapovalov(VermaModule<cplx>& mod, int n) {
    GramMatrix g;
    g.level = n;
    g.delta = mod.delta();
    g.c = mod.central_charge().real();
    g.basis = partitions(n);
    auto F = shapovalov_generic(mod, g.basis);
    const int d = static_cast<int>(g.basis.size());
    g.F.resize(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g.F(i, j) = F[i][j];
    return g;
}

GramMatrix shapovalov(cplx delta, double c, int n) {
    VermaModule<cplx> mod(delta, cplx(c));
    return shapovalov(mod, n);
}

GramInverse shapovalov_inverse(const GramMatrix& g, double cond_guard) {
    GramInverse r;
    const Eigen::Index d = g.F.rows();
    if (d == 0) return r;
    // Jacobi-equilibrated condition number; raw basis vectors differ in norm by many orders
    Eigen::VectorXd scale(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        double a = std::abs(g.F(i, i));
        scale(i) = a > 0.0 ? 1.0 / std::sqrt(a) : 1.0;
    }
    Eigen::MatrixXcd eq = scale.asDiagonal() * g.F * scale.asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(eq);
    const auto& sv = svd.singularValues();
    double smax = sv(0), smin = sv(d - 1);
    r.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(r.condition <= cond_guard))
        throw DegenerateWeight("Shapovalov matrix at level " + std::to_string(g.level) +
                               " has condition estimate " + std::to_string(r.condition));

    // invert the equilibrated matrix, then undo the scaling
    bool real = eq.imag().cwiseAbs().maxCoeff() == 0.0;
    Eigen::MatrixXcd einv;
    if (real) {
        Eigen::LLT<Eigen::MatrixXd> llt(eq.real());
        if (llt.info() == Eigen::Success) {
            einv = llt.solve(Eigen::MatrixXd::Identity(d, d)).cast<cplx>();
            r.used_cholesky = true;
        }
    }
    if (!r.used_cholesky) einv = eq.fullPivLu().inverse();
    r.inv = scale.asDiagonal() * einv * scale.asDiagonal();
    // symmetrize: the exact inverse of a symmetric matrix is symmetric
    r.inv = (0.5 * (r.inv + r.inv.transpose())).eval();
    r.residual = (g.F * r.inv - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
    return r;
}

double normalized_determinant(const GramMatrix& g) {
    double h = 1.0;
    for (Eigen::Index i = 0; i < g.F.rows(); ++i) {
        double r = g.F.row(i).norm();
        if (r == 0.0) return 0.0;
        h *= r;
    }
    return std::abs(g.F.determinant()) / h;
}

}  // namespace lcft
