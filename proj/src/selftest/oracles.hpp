#pragma once

// Independent reference computations used by the acceptance battery and the
// unit tests. Nothing here calls into the production Verma/Form machinery.

#include <boost/rational.hpp>

#include <functional>
#include <map>
#include <vector>

#include "lcft/free_field.hpp"

namespace lcft::oracle {

using Rational = boost::rational<long long>;

// <Delta| L_{w[0]} L_{w[1]} ... L_{w[k-1]} |Delta> by raw commutator rewriting.
class VacuumExpectation {
public:
    VacuumExpectation(Rational delta, Rational c) : delta_(delta), c_(c) {}
    Rational operator()(const std::vector<int>& word);

private:
    Rational delta_, c_;
    std::map<std::vector<int>, Rational> memo_;
};

// Gram matrix on the level-n basis `basis` (parts non-increasing), with
// L_{-nu} = L_{-nu(k)} ... L_{-nu(1)}.
std::vector<std::vector<Rational>> gram_matrix(Rational delta, Rational c,
                                               const std::vector<std::vector<int>>& basis);

// All partitions of n, largest first part first (same order as production).
std::vector<std::vector<int>> partitions_bruteforce(int n);

// Integral over (c, x_n, y_n) against dc x prod N(0,1) of exp(L), for L separable and
// quadratic in each variable. Coefficients are read off from L at 0 and +-1, so
// nothing of the kernel's algebra is reused.
double gaussian_integral(int M, const std::function<double(const BoundaryField&)>& L);

}  // namespace lcft::oracle
