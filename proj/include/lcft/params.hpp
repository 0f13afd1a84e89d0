#pragma once

#include <cmath>
#include <complex>

#include "lcft/errors.hpp"

namespace lcft {

using cplx = std::complex<double>;

struct CftParams {
    double gamma = std::sqrt(2.0);
    double mu = 1.0;

    CftParams() = default;
    CftParams(double g, double m) : gamma(g), mu(m) { validate(); }

    double Q() const { return gamma / 2.0 + 2.0 / gamma; }
    double c_L() const { return 1.0 + 6.0 * Q() * Q(); }

    void validate() const {
        if (!(gamma > 0.0 && gamma < 2.0))
            throw ValidationError("gamma must lie in (0,2)");
        if (!(mu > 0.0)) throw ValidationError("mu must be positive");
    }
};

// Delta_alpha = (alpha/2)(Q - alpha/2)
inline cplx conformal_weight(cplx alpha, const CftParams& p) {
    return 0.5 * alpha * (p.Q() - 0.5 * alpha);
}

// Spectrum-line weight alpha = Q + i p.
inline cplx spectral_alpha(double p, const CftParams& prm) { return cplx(prm.Q(), p); }

}  // namespace lcft
