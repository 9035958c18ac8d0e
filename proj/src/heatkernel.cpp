#include "dtcm/heatkernel.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "dtcm/errors.hpp"

namespace dtcm {

double gaussian_eval(const EllipticFreeze& frz, double tau, const std::vector<double>& u) {
    if (!(tau > 0.0)) throw DomainError("gaussian_eval: tau must be positive");
    const int n = frz.dim();
    if (u.size() != static_cast<std::size_t>(n))
        throw StructuralError("gaussian_eval: point dimension mismatch");
    double quad = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            quad += u[static_cast<std::size_t>(i)] * frz.inv_a()[static_cast<std::size_t>(i * n + j)] *
                    u[static_cast<std::size_t>(j)];
    double norm = std::pow(4.0 * M_PI * tau, -0.5 * n) / std::sqrt(frz.det_a());
    return norm * std::exp(-quad / (4.0 * tau));
}

MultiPoly hermite_prefactor(const AlphabetPtr& alpha, const EllipticFreeze& frz,
                            const DerivIndex& gamma) {
    const int n = frz.dim();
    if (alpha->dim() != n) throw StructuralError("hermite_prefactor: dimension mismatch");
    MultiPoly h = MultiPoly::constant(alpha, Rational(1));
    for (int i = 0; i < n; ++i) {
        for (int rep = 0; rep < gamma[static_cast<std::size_t>(i)]; ++rep) {
            // -(A^{-1} u)_i / 2 as an exact polynomial in u
            MultiPoly drift(alpha);
            for (int j = 0; j < n; ++j) {
                Rational c = frz.inv_a_exact(i, j) * Rational(-1, 2);
                drift += MultiPoly::variable(alpha, alpha->u(j)).scaled(c);
            }
            h = h.derivative(alpha->u(i)) + drift * h;
        }
    }
    return h;
}

double GaussianDerivTerm::eval(double tau, const std::vector<double>& xi,
                               const std::vector<double>& u) const {
    std::vector<double> point(static_cast<std::size_t>(prefactor.alphabet()->size()), 0.0);
    const int n = base->dim();
    for (int i = 0; i < n; ++i) {
        point[static_cast<std::size_t>(prefactor.alphabet()->xi(i))] = xi[static_cast<std::size_t>(i)];
        point[static_cast<std::size_t>(prefactor.alphabet()->u(i))] = u[static_cast<std::size_t>(i)];
    }
    return prefactor.eval(point) * gaussian_eval(*base, tau, u);
}

double gaussian_deriv_eval(const EllipticFreeze& frz, double tau,
                           const std::vector<double>& u, const DerivIndex& gamma) {
    // G_tau(u) = tau^{-N/2} G(u/sqrt(tau)), so
    // (d^gamma G_tau)(u) = tau^{-|gamma|/2} h_gamma(u/sqrt(tau)) G_tau(u).
    const int n = frz.dim();
    auto alpha = Alphabet::make(n, 0);
    MultiPoly h = hermite_prefactor(alpha, frz, gamma);
    std::vector<double> point(static_cast<std::size_t>(alpha->size()), 0.0);
    double root_tau = std::sqrt(tau);
    for (int i = 0; i < n; ++i)
        point[static_cast<std::size_t>(alpha->u(i))] = u[static_cast<std::size_t>(i)] / root_tau;
    int total = std::accumulate(gamma.begin(), gamma.end(), 0);
    return std::pow(tau, -0.5 * total) * h.eval(point) * gaussian_eval(frz, tau, u);
}

std::vector<GaussianDerivTerm> apply_diffop_to_gaussian(const DiffOp& p,
                                                        const FreezePtr& frz) {
    const AlphabetPtr& alpha = p.alphabet();
    if (alpha->dim() != frz->dim())
        throw StructuralError("apply_diffop_to_gaussian: dimension mismatch");
    std::vector<GaussianDerivTerm> out;
    std::map<DerivIndex, MultiPoly> hermite_cache;
    for (const auto& [gamma, coeff] : p.terms()) {
        if (coeff.degree_in(VarKind::Time) > 0 || coeff.degree_in(VarKind::Theta) > 0 ||
            coeff.degree_in(VarKind::Sigma) > 0)
            throw StructuralError(
                "apply_diffop_to_gaussian: coefficients still carry scalar time variables");
        auto it = hermite_cache.find(gamma);
        if (it == hermite_cache.end())
            it = hermite_cache.emplace(gamma, hermite_prefactor(alpha, *frz, gamma)).first;
        out.push_back(GaussianDerivTerm{coeff * it->second, frz});
    }
    return out;
}

}  // namespace dtcm
