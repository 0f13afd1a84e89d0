#include "lcft/dozz.hpp"

#include <cmath>
#include <limits>

namespace lcft {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string fmt(cplx z) { return "(" + std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")"; }
}  // namespace

DozzEvaluator::DozzEvaluator(const CftParams& p, double zero_threshold, UpsilonConfig ucfg)
    : DozzEvaluator(p, std::make_shared<UpsilonEvaluator>(p.gamma, ucfg), zero_threshold) {}

DozzEvaluator::DozzEvaluator(const CftParams& p, std::shared_ptr<const UpsilonEvaluator> ups, double zero_threshold)
    : params_(p), ups_(std::move(ups)), threshold_(zero_threshold) {
    p.validate();
    const double g = p.gamma;
    log_base_no_mu_ = std::log(kPi) + log_l_ratio(g * g / 4.0).real() + (2.0 - g * g / 2.0) * std::log(g / 2.0);
    log_prime_zero_ = std::log(ups_->prime_zero());
}

cplx DozzEvaluator::mu_exponent(cplx a1, cplx a2, cplx a3) const {
    return (2.0 * params_.Q() - (a1 + a2 + a3)) / params_.gamma;
}

double DozzEvaluator::zero_distance(cplx z) const {
    const double g = params_.gamma, small = g / 2.0, big = 2.0 / g, Q = params_.Q();
    auto lower = [&](cplx w) {
        // distance to {-n g/2 - m 2/g : n, m >= 0}
        double best = std::numeric_limits<double>::infinity();
        for (int m = 0; -m * big >= w.real() - small - big; ++m) {
            double base = -m * big;
            double n0 = std::round((base - w.real()) / small);
            for (double n = std::max(0.0, n0 - 1); n <= std::max(0.0, n0 + 1); n += 1.0)
                best = std::min(best, std::abs(w - cplx(base - n * small, 0.0)));
            if (m > 100000) break;
        }
        return best;
    };
    return std::min(lower(z), lower(Q - z));
}

cplx DozzEvaluator::log_constant(cplx a1, cplx a2, cplx a3) const {
    const double Q = params_.Q();
    const cplx half = (a1 + a2 + a3) / 2.0;
    const cplx den[4] = {half - Q, half - a1, half - a2, half - a3};
    for (const cplx& d : den)
        if (zero_distance(d) < threshold_)
            throw NearPole("DOZZ denominator argument " + fmt(d) + " is within " + std::to_string(threshold_) +
                           " of an Upsilon zero");
    const UpsilonEvaluator& U = *ups_;
    cplx num = log_prime_zero_ + U.log_upsilon(a1) + U.log_upsilon(a2) + U.log_upsilon(a3);
    if (std::isinf(num.real())) return {-std::numeric_limits<double>::infinity(), 0.0};
    cplx dsum = 0.0;
    for (const cplx& d : den) dsum += U.log_upsilon(d);
    const double log_base = std::log(params_.mu) + log_base_no_mu_;
    return mu_exponent(a1, a2, a3) * log_base + num - dsum;
}

cplx DozzEvaluator::operator()(cplx a1, cplx a2, cplx a3) const {
    cplx lc = log_constant(a1, a2, a3);
    if (std::isinf(lc.real())) return 0.0;
    return std::exp(lc);
}

cplx dozz_constant(const DozzArgs& args, const CftParams& p) {
    DozzEvaluator dz(p);
    return dz(args);
}

cplx rho_torus_one_point(const DozzEvaluator& dz, cplx alpha, double p) {
    const double Q = dz.params().Q();
    return dz(cplx(Q, p), alpha, cplx(Q, -p));
}

cplx rho_torus_k(const DozzEvaluator& dz, const std::vector<cplx>& alphas, const std::vector<double>& ps) {
    if (alphas.size() != ps.size() || alphas.empty())
        throw DimensionMismatch("torus k-point needs as many momenta as insertions");
    const double Q = dz.params().Q();
    const size_t k = alphas.size();
    cplx log_rho = 0.0;
    for (size_t j = 0; j < k; ++j) {
        double prev = ps[(j + k - 1) % k];
        log_rho += dz.log_constant(cplx(Q, ps[j]), alphas[j], cplx(Q, -prev));
    }
    return std::exp(log_rho);
}

cplx rho_sphere_k(const DozzEvaluator& dz, const std::vector<cplx>& a, const std::vector<double>& ps) {
    const size_t k = a.size();
    if (k < 4 || ps.size() != k - 3) throw DimensionMismatch("sphere k-point needs k >= 4 and k-3 momenta");
    const double Q = dz.params().Q();
    // ps[i] is p_{i+2}
    cplx log_rho = dz.log_constant(a[0], a[1], cplx(Q, -ps.front()));
    log_rho += dz.log_constant(a[k - 1], a[k - 2], cplx(Q, ps.back()));
    for (size_t j = 0; j + 1 < ps.size(); ++j)
        log_rho += dz.log_constant(cplx(Q, ps[j]), a[j + 2], cplx(Q, -ps[j + 1]));
    return std::exp(log_rho);
}

}  // namespace lcft
