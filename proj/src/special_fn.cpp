#include "lcft/special_fn.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_gamma.h>

#include <cmath>
#include <limits>
#include <mutex>

namespace lcft {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kInf = std::numeric_limits<double>::infinity();

void gsl_quiet() {
    static std::once_flag once;
    std::call_once(once, [] { gsl_set_error_handler_off(); });
}

bool is_nonpositive_integer(cplx z) {
    if (std::abs(z.imag()) > 1e-14) return false;
    double r = std::round(z.real());
    return r <= 0.0 && std::abs(z.real() - r) <= 1e-14 * std::max(1.0, std::abs(r));
}

cplx lngamma(cplx z) {
    gsl_sf_result lnr, arg;
    int status = gsl_sf_lngamma_complex_e(z.real(), z.imag(), &lnr, &arg);
    if (status != GSL_SUCCESS)
        throw DomainError("complex log-Gamma failed at z = (" + std::to_string(z.real()) + ", " +
                          std::to_string(z.imag()) + ")");
    return {lnr.val, arg.val};
}

}  // namespace

void gauss_legendre01(int n, std::vector<double>& x, std::vector<double>& w) {
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double xi, wi;
        gsl_integration_glfixed_point(0.0, 1.0, static_cast<size_t>(i), &xi, &wi, t);
        x[i] = xi;
        w[i] = wi;
    }
    gsl_integration_glfixed_table_free(t);
}

cplx log_l_ratio(cplx z) {
    gsl_quiet();
    if (is_nonpositive_integer(z)) return {kInf, 0.0};
    if (is_nonpositive_integer(1.0 - z)) return {-kInf, 0.0};
    return lngamma(z) - lngamma(1.0 - z);
}

cplx l_ratio(cplx z) {
    if (is_nonpositive_integer(z))
        throw PoleError("Gamma(z) has a pole at z = " + std::to_string(z.real()));
    cplx lg = log_l_ratio(z);
    if (std::isinf(lg.real())) return 0.0;
    return std::exp(lg);
}

UpsilonEvaluator::UpsilonEvaluator(double gamma, UpsilonConfig cfg)
    : gamma_(gamma), Q_(gamma / 2.0 + 2.0 / gamma), cfg_(cfg) {
    if (!(gamma > 0.0 && gamma < 2.0)) throw ValidationError("gamma must lie in (0,2)");
    if (cfg_.window_margin * 2.0 + gamma / 2.0 > Q_)
        throw ValidationError("Upsilon shift window narrower than one gamma/2 step");
    gsl_quiet();
    gauss_legendre01(cfg_.gl_points, gl_x_, gl_w_);

    cplx direct = std::exp(log_upsilon(gamma / 2.0));
    double h = 1e-4;
    cplx fd = (std::exp(log_upsilon(h)) - std::exp(log_upsilon(-h))) / (2.0 * h);
    if (std::abs(fd - direct) > 1e-6 * std::abs(direct))
        throw ConsistencyError("Upsilon'(0) finite difference disagrees with Upsilon(gamma/2)");
    prime_zero_ = direct;
}

cplx UpsilonEvaluator::log_upsilon_strip(cplx z) const {
    const double Q = Q_, g = gamma_;
    const cplx a = Q / 2.0 - z;
    const double decay = std::min(z.real(), Q - z.real());
    if (!(decay > 0.0)) throw DomainError("strip integral needs 0 < Re z < Q");

    const double T = std::max(cfg_.min_T, -std::log(cfg_.tail_tol) / decay + 5.0);
    double width = cfg_.panel_width;
    if (std::abs(z.imag()) > 1e-12) width = std::min(width, 8.0 / std::abs(z.imag()));
    const int panels = static_cast<int>(std::ceil(T / width));
    width = T / panels;

    const cplx a2 = a * a;
    const cplx A = a2 / 12.0, B = a2 * a2 / 360.0;
    const double b = g / 4.0, c = 1.0 / g;
    const double C = (b * b + c * c) / 6.0;
    const double D = (b * b * b * b + c * c * c * c) / 120.0 + b * b * c * c / 36.0;
    const cplx s1 = A - C, s3 = B - D - C * (A - C);
    const double t_series = std::min(1e-3, 0.1 / std::max(std::abs(a), 1e-300));

    auto integrand = [&](double t) -> cplx {
        if (t < t_series) {
            double em1 = std::expm1(-t) / t;
            return a2 * (em1 - s1 * t - s3 * t * t * t);
        }
        double den = std::expm1(-g * t / 2.0) * std::expm1(-2.0 * t / g);
        if (std::abs(a.real()) * t > 600.0) {
            cplx num = std::exp(-z * t) + std::exp((z - Q) * t) - 2.0 * std::exp(-Q * t / 2.0);
            return (a2 * std::exp(-t) - num / den) / t;
        }
        cplx sh = std::sinh(a * t / 2.0);
        return (a2 * std::exp(-t) - 4.0 * sh * sh * std::exp(-Q * t / 2.0) / den) / t;
    };

    cplx sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        double t0 = p * width;
        cplx ps = 0.0;
        for (size_t i = 0; i < gl_x_.size(); ++i) ps += gl_w_[i] * integrand(t0 + width * gl_x_[i]);
        sum += ps * width;
    }
    return sum;
}

namespace {

// log of the multiplier in Upsilon(z + step) = mult(z) Upsilon(z)
cplx log_shift_small(cplx z, double g) {
    return log_l_ratio(g * z / 2.0) + (1.0 - g * z) * std::log(g / 2.0);
}
cplx log_shift_big(cplx z, double g) {
    return log_l_ratio(2.0 * z / g) + (4.0 * z / g - 1.0) * std::log(g / 2.0);
}

}  // namespace

int UpsilonEvaluator::shift_count(cplx z) const {
    const double lo = cfg_.direct_margin, hi = Q_ - cfg_.direct_margin;
    double x = z.real();
    if (x >= lo && x <= hi) return 0;
    const double big = 2.0 / gamma_, small = gamma_ / 2.0;
    const double wlo = cfg_.window_margin, whi = Q_ - cfg_.window_margin;
    double count = 0.0;
    if (x < lo) {
        double k = std::floor((whi - x) / big);
        if (k < 0) k = 0;
        x += k * big;
        count += k;
        if (x < wlo) {
            double m = std::ceil((wlo - x) / small);
            count += m;
        }
    } else {
        double k = std::floor((x - wlo) / big);
        if (k < 0) k = 0;
        x -= k * big;
        count += k;
        if (x > whi) count += std::ceil((x - whi) / small);
    }
    return count > 1e9 ? 1000000000 : static_cast<int>(count);
}

cplx UpsilonEvaluator::log_upsilon(cplx z) const {
    const double lo = cfg_.direct_margin, hi = Q_ - cfg_.direct_margin;
    if (z.real() >= lo && z.real() <= hi) return log_upsilon_strip(z);

    if (shift_count(z) > cfg_.shift_budget)
        throw BudgetExceeded("Upsilon argument needs more shifts than the budget allows");

    const double g = gamma_, big = 2.0 / g, small = g / 2.0;
    const double wlo = cfg_.window_margin, whi = Q_ - cfg_.window_margin;
    cplx acc = 0.0;
    cplx w = z;
    if (w.real() < lo) {
        // Upsilon(w) = Upsilon(w + step) / mult(w)
        while (w.real() + big <= whi) {
            acc -= log_shift_big(w, g);
            w += big;
        }
        while (w.real() < wlo) {
            acc -= log_shift_small(w, g);
            w += small;
        }
    } else {
        // Upsilon(w) = mult(w - step) Upsilon(w - step)
        while (w.real() - big >= wlo) {
            w -= big;
            acc += log_shift_big(w, g);
        }
        while (w.real() > whi) {
            w -= small;
            acc += log_shift_small(w, g);
        }
    }
    if (std::isinf(acc.real()) && acc.real() < 0) return {-kInf, 0.0};
    if (std::isnan(acc.real()) || std::isinf(acc.real()))
        throw PoleError("Upsilon shift chain hit an indeterminate Gamma ratio");
    return acc + log_upsilon_strip(w);
}

cplx UpsilonEvaluator::operator()(cplx z) const {
    cplx lu = log_upsilon(z);
    if (std::isinf(lu.real()) && lu.real() < 0) return 0.0;
    return std::exp(lu);
}

cplx UpsilonEvaluator::prime_zero() const { return prime_zero_; }

cplx upsilon(cplx z, const UpsilonEvaluator& ev) { return ev(z); }
cplx upsilon_prime_zero(const UpsilonEvaluator& ev) { return ev.prime_zero(); }

cplx dedekind_eta(cplx tau) {
    if (!(tau.imag() > 0.0)) throw DomainError("dedekind_eta needs Im tau > 0");
    const cplx iu(0.0, 1.0);
    const cplx q = std::exp(2.0 * kPi * iu * tau);
    const double aq = std::abs(q);
    cplx prod = 1.0, qn = q;
    double mag = aq;
    while (mag >= 1e-16) {
        prod *= 1.0 - qn;
        qn *= q;
        mag *= aq;
    }
    return std::exp(2.0 * kPi * iu * tau / 24.0) * prod;
}

cplx theta1(cplx z, cplx tau) {
    if (!(tau.imag() > 0.0)) throw DomainError("theta1 needs Im tau > 0");
    const cplx iu(0.0, 1.0);
    const double lq = -kPi * tau.imag();  // log|q|
    const double iz = std::abs(z.imag());
    cplx sum = 0.0;
    for (int n = 0;; ++n) {
        double h = n + 0.5;
        double logmag = lq * h * h + (2 * n + 1) * kPi * iz;
        if (n > 0 && logmag < std::log(1e-16) && lq * h < -kPi * iz) break;
        if (n > 100000) break;
        cplx qpow = std::exp(iu * kPi * tau * (h * h));
        double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        sum += sgn * qpow * std::sin(double(2 * n + 1) * kPi * z);
    }
    return 2.0 * sum;
}

cplx theta1_product(cplx z, cplx tau) {
    if (!(tau.imag() > 0.0)) throw DomainError("theta1 needs Im tau > 0");
    const cplx iu(0.0, 1.0);
    const cplx q = std::exp(iu * kPi * tau);
    const cplx q2 = q * q;
    const cplx e = std::exp(2.0 * kPi * iu * z);
    const double spread = std::max(std::abs(e), 1.0 / std::abs(e));
    cplx prod = 1.0, qa = q2, qb = 1.0;
    for (int m = 1; m < 100000; ++m) {
        prod *= (1.0 - qa * e) * (1.0 - qb / e);
        if (m > 1 && std::abs(qb) * spread < 1e-17) break;
        qb = qa;
        qa *= q2;
    }
    return -iu * std::exp(iu * kPi * tau / 6.0) * std::exp(iu * kPi * z) * dedekind_eta(tau) * prod;
}

}  // namespace lcft
