#pragma once

#include <array>
#include <map>
#include <memory>
#include <vector>

#include "lcft/virasoro.hpp"

namespace lcft {

// Rational function  sum_k c_k z12^a z13^b z23^c  multiplying the holomorphic
// three-point factor H(z) = z12^{e12} z13^{e13} z23^{e23}.
using Monomial = std::array<int, 3>;
using Form = std::map<Monomial, cplx>;

// Pant-frame insertion points (-1/2, 1/2, i sqrt(3)/2), all mutual distances 1.
std::array<cplx, 3> pant_points();

// Descendant three-point brackets (L_{-nu1}V1 | L_{-nu2}V2 | L_{-nu3}V3) divided
// by H, built by contour deformation on slot 3, then slot 2, then the
// differential operators of slot 1. Memoized; not thread-safe.
class ThreePointEngine {
public:
    ThreePointEngine(cplx d1, cplx d2, cplx d3, cplx c);

    const Form& bracket(const YoungDiagram& n1, const YoungDiagram& n2, const YoungDiagram& n3);
    cplx ratio(const YoungDiagram& n1, const YoungDiagram& n2, const YoungDiagram& n3,
               const std::array<cplx, 3>& z = pant_points());

    // exponents of H
    const std::array<cplx, 3>& h_exponents() const { return e_; }
    static cplx evaluate(const Form& f, const std::array<cplx, 3>& z);

private:
    using Key = std::array<YoungDiagram, 3>;
    Form compute(const Key& k);
    Form derivative(const Form& f, int slot) const;

    std::array<cplx, 3> d_;
    std::array<cplx, 3> e_;  // e12, e13, e23
    std::array<VermaModule<cplx>, 3> mod_;
    std::map<Key, Form> memo_;
};

// Radial-frame matrix elements
//   <L_{-nu_out} D_out| V_mid(1) |L_{-nu_in} D_in> / <D_out| V_mid(1) |D_in>.
class RadialEngine {
public:
    RadialEngine(cplx d_in, cplx d_mid, cplx d_out, cplx c);
    cplx element(const YoungDiagram& nu_in, const YoungDiagram& nu_out);

private:
    cplx bra(const YoungDiagram& nu_out, const VermaVector<cplx>& ket);
    cplx bra_basis(const YoungDiagram& nu_out, const YoungDiagram& nu_in);

    cplx din_, dmid_, dout_;
    VermaModule<cplx> in_mod_;
    std::map<std::pair<YoungDiagram, YoungDiagram>, cplx> memo_;
};

enum class Frame { Pant, Radial };

// Normalized three-point descendant coefficient. Pant: points pant_points().
// Radial: slot 1 at infinity (out), slot 2 at 1, slot 3 at 0 (in); nu2 must be empty.
cplx three_point_descendant(cplx d1, cplx d2, cplx d3, const YoungDiagram& n1, const YoungDiagram& n2,
                            const YoungDiagram& n3, double c, Frame frame = Frame::Pant);

// Basis of all diagrams with level <= N, grouped by level.
struct LevelBasis {
    int N = 0;
    std::vector<YoungDiagram> diagrams;
    std::vector<int> offset;  // offset[n] = first index of level n; offset[N+1] = size

    explicit LevelBasis(int N = 0);
    int size() const { return static_cast<int>(diagrams.size()); }
    int count(int n) const { return offset[n + 1] - offset[n]; }
};

enum class TensorKind { Disk, Annulus, Pant };

struct BlockCoeffTensor {
    TensorKind kind = TensorKind::Pant;
    std::vector<int> levels;  // max level per descendant slot
    std::vector<LevelBasis> bases;
    std::vector<cplx> data;   // row-major over slots

    int rank() const { return static_cast<int>(levels.size()); }
    cplx at(std::initializer_list<int> idx) const;
    cplx at(const int* idx) const;
};

// w^A(p_in, alpha, p_out)[nu_in, nu_out] for all levels <= N (radial frame).
BlockCoeffTensor annulus_tensor(cplx d_in, cplx d_mid, cplx d_out, double c, int N);
// w^D[nu] = <L_{-nu} D_out| V_mid(1) |D_in> for levels <= N.
BlockCoeffTensor disk_tensor(cplx d_out, cplx d_mid, cplx d_in, double c, int N);
// w_P[nu1,nu2,nu3] at the pant points; Ns[i] = 0 makes slot i a primary.
BlockCoeffTensor pant_tensor(const std::array<cplx, 3>& d, double c, const std::array<int, 3>& Ns);

// Gram inverses for all levels <= N of one weight, packed per level.
struct GramInverseStack {
    std::vector<Eigen::MatrixXcd> inv;  // inv[n] is d_n x d_n
    double worst_residual = 0.0;
    double worst_condition = 1.0;
};
GramInverseStack gram_inverse_stack(cplx delta, double c, int N, double cond_guard = 1e10);

// Truncated block series: prod |q_i|^{abs_exponent_i} * extra * sum_n coeff_n prod q_i^{n_i}.
struct BlockSeries {
    std::vector<double> abs_exponent;
    double extra_prefactor = 1.0;
    std::map<std::vector<int>, cplx> coeffs;
    int N = 0;

    cplx holomorphic(const std::vector<cplx>& q) const;
    double prefactor(const std::vector<cplx>& q) const;
    cplx value(const std::vector<cplx>& q) const { return prefactor(q) * holomorphic(q); }
    // holomorphic part restricted to total degree == n (or max degree == n for box truncation)
    cplx level_contribution(const std::vector<cplx>& q, int n) const;
};

struct BlockOptions {
    int N = 6;
    double cond_guard = 1e10;
};

// |q|^{-c/24 + Delta_{Q+ip}} sum_n q^n Tr(F^{-1}_n w^A_n(alpha, p, p))
BlockSeries torus_one_point_block(cplx alpha, double p, const CftParams& prm, const BlockOptions& opt = {});

enum class ChainKind { Torus, Sphere };

// Torus: alphas/ps of length k, q_j as printed. Sphere: alphas of length k, ps of
// length k-3 (p_2..p_{k-2}), z_positions of length k (z_1 = 0, z_k ignored).
BlockSeries chain_block(ChainKind kind, const std::vector<cplx>& alphas, const std::vector<double>& ps,
                        const CftParams& prm, const BlockOptions& opt = {},
                        const std::vector<cplx>& z_positions = {});

// |z_j|^{-+Delta_j} factors of the sphere chain block (z_k ignored)
double sphere_z_prefactor(const std::vector<cplx>& alphas, const std::vector<cplx>& z, const CftParams& prm);

// q-vectors of the torus and sphere chains
std::vector<cplx> torus_chain_q(const std::vector<cplx>& x_positions, cplx tau);
std::vector<cplx> sphere_chain_q(const std::vector<cplx>& z_positions);

}  // namespace lcft
