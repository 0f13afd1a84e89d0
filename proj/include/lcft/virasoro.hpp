#pragma once

#include <Eigen/Dense>

#include <map>
#include <utility>
#include <vector>

#include "lcft/params.hpp"

namespace lcft {

// Partition with parts in non-increasing order. The descendant it labels is
// L_{-nu(k)} ... L_{-nu(1)} |Delta>, i.e. the smallest mode acts last.
struct YoungDiagram {
    std::vector<int> parts;

    YoungDiagram() = default;
    YoungDiagram(std::initializer_list<int> p) : parts(p) {}
    explicit YoungDiagram(std::vector<int> p) : parts(std::move(p)) {}

    int level() const {
        int s = 0;
        for (int p : parts) s += p;
        return s;
    }
    int size() const { return static_cast<int>(parts.size()); }
    bool empty() const { return parts.empty(); }
    bool valid() const;

    friend bool operator<(const YoungDiagram& a, const YoungDiagram& b) { return a.parts < b.parts; }
    friend bool operator==(const YoungDiagram& a, const YoungDiagram& b) { return a.parts == b.parts; }
};

// Partitions of n in reverse-lexicographic order: (n), (n-1,1), ..., (1,...,1).
std::vector<YoungDiagram> partitions(int n);

// Number of partitions of n.
int partition_count(int n);

// alpha_{r,s} = Q - r gamma/2 - 2 s/gamma
double kac_weight(int r, int s, const CftParams& p);

template <class T>
struct VermaVector {
    int grade = 0;
    std::map<YoungDiagram, T> coeffs;

    static VermaVector basis(const YoungDiagram& nu) {
        VermaVector v;
        v.grade = nu.level();
        v.coeffs.emplace(nu, T(1));
        return v;
    }
    bool is_zero() const { return coeffs.empty(); }

    void axpy(const T& a, const VermaVector& x) {
        if (x.coeffs.empty()) return;
        if (coeffs.empty()) grade = x.grade;
        for (const auto& [k, v] : x.coeffs) {
            auto [it, inserted] = coeffs.emplace(k, a * v);
            if (!inserted) {
                it->second += a * v;
                if (it->second == T(0)) coeffs.erase(it);
            }
        }
    }
    T coeff(const YoungDiagram& nu) const {
        auto it = coeffs.find(nu);
        return it == coeffs.end() ? T(0) : it->second;
    }
};

// Action of the Virasoro modes on the Verma module of weight Delta, central
// charge c. Results of single-mode actions on basis vectors are memoized.
template <class T>
class VermaModule {
public:
    using Vec = VermaVector<T>;

    VermaModule(T delta, T c) : delta_(delta), c_(c) {}

    const T& delta() const { return delta_; }
    const T& central_charge() const { return c_; }

    Vec apply(int n, const Vec& v) {
        Vec out;
        out.grade = v.grade - n;
        for (const auto& [nu, a] : v.coeffs) out.axpy(a, apply_basis(n, nu));
        out.grade = v.grade - n;
        return out;
    }

    // L_n on L_{-nu}|Delta>
    const Vec& apply_basis(int n, const YoungDiagram& nu) {
        auto key = std::make_pair(n, nu);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        Vec r = compute(n, nu);
        return memo_.emplace(std::move(key), std::move(r)).first->second;
    }

    // <L_{-nu} Delta, v> for v at the level of nu.
    T pair(const YoungDiagram& nu, const Vec& v) {
        Vec w = v;
        for (auto it = nu.parts.rbegin(); it != nu.parts.rend(); ++it) {
            w = apply(*it, w);
            if (w.is_zero()) return T(0);
        }
        return w.coeff(YoungDiagram{});
    }

private:
    Vec compute(int n, const YoungDiagram& nu) {
        Vec out;
        out.grade = nu.level() - n;
        if (n == 0) {
            out.coeffs.emplace(nu, delta_ + T(nu.level()));
            return out;
        }
        if (nu.empty()) {
            if (n < 0) out.coeffs.emplace(YoungDiagram{-n}, T(1));
            return out;
        }
        const int m = nu.parts.back();  // leftmost operator L_{-m}
        YoungDiagram rest(std::vector<int>(nu.parts.begin(), nu.parts.end() - 1));
        if (n < 0 && -n <= m) {
            YoungDiagram grown = nu;
            grown.parts.push_back(-n);
            out.coeffs.emplace(std::move(grown), T(1));
            return out;
        }
        // L_n L_{-m} rest = L_{-m} L_n rest + (n+m) L_{n-m} rest + (c/12)(n^3-n) delta_{n,m} rest
        Vec inner = apply(n, basis_of(rest));
        if (!inner.is_zero()) out.axpy(T(1), apply(-m, inner));
        if (n + m != 0) out.axpy(T(n + m), apply(n - m, basis_of(rest)));
        if (n == m) out.axpy(c_ * (T(n * n * n - n) / T(12)), basis_of(rest));
        out.grade = nu.level() - n;
        return out;
    }

    static Vec basis_of(const YoungDiagram& nu) { return Vec::basis(nu); }

    T delta_, c_;
    std::map<std::pair<int, YoungDiagram>, Vec> memo_;
};

template <class T>
VermaVector<T> apply_virasoro(int n, const VermaVector<T>& v, T delta, T c) {
    VermaModule<T> mod(delta, c);
    return mod.apply(n, v);
}

struct GramMatrix {
    int level = 0;
    cplx delta;
    double c = 0.0;
    std::vector<YoungDiagram> basis;
    Eigen::MatrixXcd F;
};

struct GramInverse {
    Eigen::MatrixXcd inv;
    double residual = 0.0;   // max |F F^{-1} - I|
    double condition = 1.0;  // ratio of extreme singular values
    bool used_cholesky = false;
};

template <class T>
std::vector<std::vector<T>> shapovalov_generic(VermaModule<T>& mod, const std::vector<YoungDiagram>& basis) {
    const size_t d = basis.size();
    std::vector<std::vector<T>> F(d, std::vector<T>(d, T(0)));
    for (size_t j = 0; j < d; ++j) {
        auto v = VermaVector<T>::basis(basis[j]);
        for (size_t i = 0; i <= j; ++i) {
            F[i][j] = mod.pair(basis[i], v);
            F[j][i] = F[i][j];
        }
    }
    return F;
}

GramMatrix shapovalov(cplx delta, double c, int n);
GramMatrix shapovalov(VermaModule<cplx>& mod, int n);

GramInverse shapovalov_inverse(const GramMatrix& F, double cond_guard = 1e10);

// |det F| / prod_i |row_i|_2, a scale-free measure in [0,1] (Hadamard).
double normalized_determinant(const GramMatrix& F);

}  // namespace lcft
