#pragma once

#include <vector>

#include "dtcm/diffop.hpp"
#include "dtcm/elliptic.hpp"

namespace dtcm {

// Kernel of e^{tau L_0} for L_0 = sum a_ij d_i d_j:
//   (4 pi tau)^{-N/2} (det A)^{-1/2} exp(-u^T A^{-1} u / (4 tau)).
double gaussian_eval(const EllipticFreeze& frz, double tau, const std::vector<double>& u);

// (d^gamma G_tau)(u), derivatives in u, via the Hermite prefactor recursion.
double gaussian_deriv_eval(const EllipticFreeze& frz, double tau,
                           const std::vector<double>& u, const DerivIndex& gamma);

// Prefactor h_gamma with (d^gamma G)(u) = h_gamma(u) G(u) at tau = 1,
// generated by h_0 = 1, h_{gamma+e_i} = d_{u_i} h - ((A^{-1} u)_i / 2) h.
MultiPoly hermite_prefactor(const AlphabetPtr& alpha, const EllipticFreeze& frz,
                            const DerivIndex& gamma);

// One summand p(xi, u) * G_A(u) of an operator applied to the base Gaussian.
struct GaussianDerivTerm {
    MultiPoly prefactor;
    FreezePtr base;

    double eval(double tau, const std::vector<double>& xi,
                const std::vector<double>& u) const;
};

// Realize P e^{L_0} as a list of prefactor * Gaussian terms. P must have all
// scalar time variables (t, th, s_j) already integrated out or substituted.
std::vector<GaussianDerivTerm> apply_diffop_to_gaussian(const DiffOp& p,
                                                        const FreezePtr& frz);

}  // namespace dtcm
