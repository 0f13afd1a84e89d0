#pragma once

#include <memory>
#include <vector>

#include "lcft/special_fn.hpp"

namespace lcft {

struct DozzArgs {
    cplx alpha1, alpha2, alpha3;
};

// DOZZ structure constants sharing one Upsilon evaluator per gamma.
class DozzEvaluator {
public:
    explicit DozzEvaluator(const CftParams& p, double zero_threshold = 1e-6, UpsilonConfig ucfg = {});
    DozzEvaluator(const CftParams& p, std::shared_ptr<const UpsilonEvaluator> ups, double zero_threshold = 1e-6);

    const CftParams& params() const { return params_; }
    const UpsilonEvaluator& upsilon() const { return *ups_; }
    double zero_threshold() const { return threshold_; }

    // log C; real part -inf when a numerator Upsilon vanishes.
    cplx log_constant(cplx a1, cplx a2, cplx a3) const;
    cplx operator()(cplx a1, cplx a2, cplx a3) const;
    cplx operator()(const DozzArgs& a) const { return (*this)(a.alpha1, a.alpha2, a.alpha3); }

    // exponent of mu: (2Q - sum alpha)/gamma
    cplx mu_exponent(cplx a1, cplx a2, cplx a3) const;

    // distance from z to the zero set of Upsilon
    double zero_distance(cplx z) const;

private:
    CftParams params_;
    std::shared_ptr<const UpsilonEvaluator> ups_;
    double threshold_;
    double log_base_no_mu_;
    cplx log_prime_zero_;
};

cplx dozz_constant(const DozzArgs& args, const CftParams& p);

// rho for the torus one-point function: C(Q+ip, alpha, Q-ip)
cplx rho_torus_one_point(const DozzEvaluator& dz, cplx alpha, double p);

// prod_j C(Q+ip_j, alpha_j, Q-ip_{j-1}) with p_0 = p_k
cplx rho_torus_k(const DozzEvaluator& dz, const std::vector<cplx>& alphas, const std::vector<double>& ps);

// C(a1,a2,Q-ip_2) C(a_k,a_{k-1},Q+ip_{k-2}) prod_{j=2}^{k-3} C(Q+ip_j, a_{j+1}, Q-ip_{j+1});
// ps holds p_2..p_{k-2}.
cplx rho_sphere_k(const DozzEvaluator& dz, const std::vector<cplx>& alphas, const std::vector<double>& ps);

}  // namespace lcft
