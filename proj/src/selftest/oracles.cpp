#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace lcft::oracle {

Rational VacuumExpectation::operator()(const std::vector<int>& w) {
    if (w.empty()) return 1;
    if (w.back() > 0 || w.front() < 0) return 0;
    if (w.back() == 0) return delta_ * (*this)(std::vector<int>(w.begin(), w.end() - 1));
    if (w.front() == 0) return delta_ * (*this)(std::vector<int>(w.begin() + 1, w.end()));
    auto it = memo_.find(w);
    if (it != memo_.end()) return it->second;

    // rightmost positive mode; something non-positive sits to its right
    int i = static_cast<int>(w.size()) - 1;
    while (w[i] <= 0) --i;
    const int a = w[i], b = w[i + 1];
    std::vector<int> swapped = w;
    std::swap(swapped[i], swapped[i + 1]);
    Rational r = (*this)(swapped);

    std::vector<int> merged(w.begin(), w.begin() + i);
    merged.push_back(a + b);
    merged.insert(merged.end(), w.begin() + i + 2, w.end());
    if (a - b != 0) r += Rational(a - b) * (*this)(merged);
    if (a == -b) {
        std::vector<int> dropped(w.begin(), w.begin() + i);
        dropped.insert(dropped.end(), w.begin() + i + 2, w.end());
        r += c_ * Rational(static_cast<long long>(a) * a * a - a, 12) * (*this)(dropped);
    }
    memo_.emplace(w, r);
    return r;
}

std::vector<std::vector<Rational>> gram_matrix(Rational delta, Rational c,
                                               const std::vector<std::vector<int>>& basis) {
    VacuumExpectation ev(delta, c);
    const size_t d = basis.size();
    std::vector<std::vector<Rational>> F(d, std::vector<Rational>(d));
    for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < d; ++j) {
            // bra: <Delta| L_{nu(1)} ... L_{nu(k)}; ket: L_{-nu'(k')} ... L_{-nu'(1)} |Delta>
            std::vector<int> word(basis[i].begin(), basis[i].end());
            for (auto it = basis[j].rbegin(); it != basis[j].rend(); ++it) word.push_back(-*it);
            F[i][j] = ev(word);
        }
    return F;
}

std::vector<std::vector<int>> partitions_bruteforce(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int left, int maxpart) {
        if (left == 0) {
            out.push_back(cur);
            return;
        }
        for (int p = 1; p <= std::min(left, maxpart); ++p) {
            cur.push_back(p);
            rec(left - p, p);
            cur.pop_back();
        }
    };
    rec(n, n);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

double gaussian_integral(int M, const std::function<double(const BoundaryField&)>& L) {
    constexpr double kPi = 3.14159265358979323846;
    BoundaryField g(M);
    const double l0 = L(g);
    double log_total = l0;
    auto axis = [&](double* v, bool gauss) {
        *v = 1.0;
        double lp = L(g) - (gauss ? 0.5 : 0.0);
        *v = -1.0;
        double lm = L(g) - (gauss ? 0.5 : 0.0);
        *v = 0.0;
        const double a2 = 0.5 * (lp + lm - 2.0 * l0), a1 = 0.5 * (lp - lm);
        log_total += 0.5 * std::log(kPi / -a2) + a1 * a1 / (-4.0 * a2);
        if (gauss) log_total -= 0.5 * std::log(2.0 * kPi);
    };
    axis(&g.c, false);
    for (int i = 0; i < M; ++i) {
        axis(&g.x[i], true);
        axis(&g.y[i], true);
    }
    return std::exp(log_total);
}

}  // namespace lcft::oracle
