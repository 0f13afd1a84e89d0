#include "lcft/free_field.hpp"

#include <cmath>

#include "lcft/errors.hpp"

namespace lcft {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_modes(const BoundaryField& f, const BoundaryField& g) {
    if (f.x.size() != f.y.size() || g.x.size() != g.y.size() || f.x.size() != g.x.size())
        throw DimensionMismatch("boundary fields carry different mode counts");
}

// sum_n [(x'_n - a^n x_n)^2 / (2(1 - a^{2n})) - x'_n^2/2] + same for y
double mode_exponent(double a, const BoundaryField& f, const BoundaryField& fp) {
    double s = 0.0;
    double an = 1.0;
    for (int n = 1; n <= f.modes(); ++n) {
        an *= a;
        const double v = -std::expm1(2.0 * n * std::log(a));
        const double dx = fp.x[n - 1] - an * f.x[n - 1], dy = fp.y[n - 1] - an * f.y[n - 1];
        s += (dx * dx + dy * dy) / (2.0 * v) - 0.5 * (fp.x[n - 1] * fp.x[n - 1] + fp.y[n - 1] * fp.y[n - 1]);
    }
    return s;
}
}  // namespace

cplx BoundaryField::phi(int n) const { return cplx(x[n - 1], y[n - 1]) / (2.0 * std::sqrt(double(n))); }

double BoundaryField::operator()(double theta) const {
    double s = c;
    for (int n = 1; n <= modes(); ++n) s += 2.0 * (phi(n) * std::polar(1.0, n * theta)).real();
    return s;
}

FourierSeries FourierSeries::from(const BoundaryField& f) {
    FourierSeries s;
    s.coeff[0] = f.c;
    for (int n = 1; n <= f.modes(); ++n) {
        s.coeff[n] = f.phi(n);
        s.coeff[-n] = std::conj(f.phi(n));
    }
    return s;
}

cplx FourierSeries::operator()(double theta) const {
    cplx s = 0.0;
    for (const auto& [n, a] : coeff) s += a * std::polar(1.0, n * theta);
    return s;
}

PoissonDN poisson_dn_disk(const FourierSeries& f) {
    PoissonDN r;
    r.extension = [coeff = f.coeff](cplx z) {
        cplx s = 0.0;
        for (const auto& [n, a] : coeff) s += a * (n >= 0 ? std::pow(z, n) : std::pow(std::conj(z), -n));
        return s;
    };
    for (const auto& [n, a] : f.coeff)
        if (n != 0) r.dn.coeff[n] = double(std::abs(n)) * a;
    return r;
}

PoissonDN poisson_dn_disk(const BoundaryField& f) { return poisson_dn_disk(FourierSeries::from(f)); }

double free_annulus_amplitude(cplx q, const BoundaryField& f, const BoundaryField& fp) {
    const double r = std::abs(q);
    if (!(r > 0.0 && r < 1.0)) throw DomainError("annulus modulus must satisfy 0 < |q| < 1");
    check_modes(f, fp);
    const double t = -std::log(r);
    const double dc = f.c - fp.c;
    return std::exp(-dc * dc / (2.0 * t) - mode_exponent(r, f, fp));
}

double euler_product(double x) {
    double p = 1.0, xn = x;
    while (xn > 1e-16) {
        p *= 1.0 - xn;
        xn *= x;
    }
    return p;
}

double heat_kernel_K0(double t, const BoundaryField& f, const BoundaryField& fp, const CftParams& prm,
                      ModeProduct product) {
    if (!(t > 0.0)) throw DomainError("heat kernel time must be positive");
    check_modes(f, fp);
    const double Q = prm.Q();
    const double a = std::exp(-t);
    double prod = 1.0;
    if (product == ModeProduct::Full) {
        prod = euler_product(a * a);
    } else {
        for (int n = 1; n <= f.modes(); ++n) prod *= -std::expm1(-2.0 * t * n);
    }
    const double dc = f.c - fp.c;
    return std::exp(-0.5 * Q * Q * t) / std::sqrt(2.0 * kPi * t) / prod *
           std::exp(-dc * dc / (2.0 * t) - mode_exponent(a, f, fp));
}

double annulus_partition(cplx q) {
    const double r = std::abs(q);
    if (!(r > 0.0 && r < 1.0)) throw DomainError("annulus modulus must satisfy 0 < |q| < 1");
    return std::sqrt(0.5) * std::sqrt(-2.0 * kPi / std::log(r)) * std::pow(r, -1.0 / 12.0) / euler_product(r * r);
}

}  // namespace lcft
