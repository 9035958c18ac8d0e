#pragma once

// Random differential operators for property tests.

#include <random>

#include "dtcm/diffop.hpp"

namespace dtcm::testsupport {

inline Rational random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 9);
    return Rational(num(rng), den(rng));
}

// Random element of D(a, b): spatial degree <= a, order <= b, with a few terms.
inline DiffOp random_diffop(const AlphabetPtr& alpha, int max_deg, int max_order,
                            std::mt19937_64& rng, bool allow_theta = false) {
    std::uniform_int_distribution<int> n_terms(1, 3);
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_int_distribution<int> order(0, max_order);
    DiffOp op(alpha);
    const int dim = alpha->dim();
    for (int t = n_terms(rng); t-- > 0;) {
        DerivIndex gamma(static_cast<std::size_t>(dim), 0);
        int b = order(rng);
        for (int i = 0; i < b; ++i)
            ++gamma[static_cast<std::size_t>(rng() % static_cast<unsigned>(dim))];
        Expo e(static_cast<std::size_t>(alpha->size()), 0);
        int a = deg(rng);
        for (int i = 0; i < a; ++i)
            ++e[static_cast<std::size_t>(alpha->xi(static_cast<int>(rng() % static_cast<unsigned>(dim))))];
        if (allow_theta && (rng() & 1))
            e[static_cast<std::size_t>(alpha->time())] = static_cast<std::uint16_t>(rng() % 2);
        Rational c = random_rational(rng);
        if (c.is_zero()) c = Rational(1);
        op.add_term(gamma, MultiPoly::monomial(alpha, e, c));
    }
    return op;
}

// Random constant-coefficient operator (spatial degree 0).
inline DiffOp random_const_coeff_op(const AlphabetPtr& alpha, int max_order,
                                    std::mt19937_64& rng) {
    return random_diffop(alpha, 0, max_order, rng);
}

// Random polynomial in the spatial variables of degree <= deg.
inline MultiPoly random_spatial_poly(const AlphabetPtr& alpha, int max_deg,
                                     std::mt19937_64& rng) {
    MultiPoly p(alpha);
    std::uniform_int_distribution<int> n_terms(1, 4);
    std::uniform_int_distribution<int> deg(0, max_deg);
    for (int t = n_terms(rng); t-- > 0;) {
        Expo e(static_cast<std::size_t>(alpha->size()), 0);
        int a = deg(rng);
        for (int i = 0; i < a; ++i)
            ++e[static_cast<std::size_t>(alpha->xi(static_cast<int>(rng() % static_cast<unsigned>(alpha->dim()))))];
        p.add_term(e, random_rational(rng));
    }
    if (p.is_zero()) p = MultiPoly::constant(alpha, Rational(1));
    return p;
}

}  // namespace dtcm::testsupport
