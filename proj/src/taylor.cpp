#include "dtcm/taylor.hpp"

#include "dtcm/errors.hpp"

namespace dtcm {

namespace {

// All spatial multi-indices with the given total degree.
void for_each_beta(int dim, int total, DerivIndex& beta, std::size_t axis,
                   const std::function<void(const DerivIndex&)>& fn) {
    if (axis + 1 == beta.size()) {
        beta[axis] = static_cast<std::uint16_t>(total);
        fn(beta);
        return;
    }
    for (int v = 0; v <= total; ++v) {
        beta[axis] = static_cast<std::uint16_t>(v);
        for_each_beta(dim, total - v, beta, axis + 1, fn);
    }
}

Rational beta_factorial(const DerivIndex& beta) {
    Rational r(1);
    for (auto v : beta) r *= factorial(v);
    return r;
}

}  // namespace

TaylorFamily taylor_terms(const CoefficientModel& model, const std::vector<double>& z,
                          double t_base, int n) {
    const int dim = model.dim();
    if (z.size() != static_cast<std::size_t>(dim))
        throw StructuralError("taylor_terms: freeze point dimension mismatch");
    if (n < 0) throw StructuralError("taylor_terms: negative order");

    TaylorFamily fam;
    fam.dim = dim;
    fam.z = z;
    fam.t_base = t_base;
    fam.n = n;
    fam.alpha = Alphabet::make(dim, std::max(n, 1));
    fam.frz = EllipticFreeze::make(dim, model.a_matrix(t_base, z));

    const AlphabetPtr& alpha = fam.alpha;
    fam.ops.assign(static_cast<std::size_t>(n + 1), DiffOp(alpha));

    // weight w contribution of one coefficient family: all (k, beta) with
    // 2k + |beta| = w, each monomial t^k xi^beta / (k! beta!).
    auto accumulate = [&](int w, const DerivIndex& dgamma,
                          const std::function<double(int, const DerivIndex&)>& deriv,
                          DiffOp& target) {
        for (int k = 0; 2 * k <= w; ++k) {
            int rest = w - 2 * k;
            DerivIndex beta(static_cast<std::size_t>(dim), 0);
            for_each_beta(dim, rest, beta, 0, [&](const DerivIndex& b) {
                double value = deriv(k, b);
                if (value == 0.0) return;
                Rational coeff = Rational::from_double(value) /
                                 (factorial(static_cast<unsigned>(k)) * beta_factorial(b));
                Expo e(static_cast<std::size_t>(alpha->size()), 0);
                e[static_cast<std::size_t>(alpha->time())] = static_cast<std::uint16_t>(k);
                for (int i = 0; i < dim; ++i)
                    e[static_cast<std::size_t>(alpha->xi(i))] = b[static_cast<std::size_t>(i)];
                target.add_term(dgamma, MultiPoly::monomial(alpha, e, coeff));
            });
        }
    };

    for (int m = 0; m <= n; ++m) {
        DiffOp& lm = fam.ops[static_cast<std::size_t>(m)];
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                DerivIndex g(static_cast<std::size_t>(dim), 0);
                ++g[static_cast<std::size_t>(i)];
                ++g[static_cast<std::size_t>(j)];
                accumulate(m, g,
                           [&](int k, const DerivIndex& b) {
                               return model.a(i, j, k, b, t_base, z);
                           },
                           lm);
            }
            if (m >= 1) {
                DerivIndex g(static_cast<std::size_t>(dim), 0);
                ++g[static_cast<std::size_t>(i)];
                accumulate(m - 1, g,
                           [&](int k, const DerivIndex& b) {
                               return model.b(i, k, b, t_base, z);
                           },
                           lm);
            }
        }
        if (m >= 2) {
            DerivIndex g(static_cast<std::size_t>(dim), 0);
            accumulate(m - 2, g,
                       [&](int k, const DerivIndex& b) { return model.c(k, b, t_base, z); },
                       lm);
        }
    }
    return fam;
}

}  // namespace dtcm
