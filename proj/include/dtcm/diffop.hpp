#pragma once

#include <map>
#include <string>
#include <vector>

#include "dtcm/multipoly.hpp"

namespace dtcm {

// Spatial derivative multi-index, one entry per dimension.
using DerivIndex = std::vector<std::uint16_t>;

Rational factorial(unsigned n);
Rational binomial(unsigned n, unsigned k);

// Differential operator with MultiPoly coefficients: sum of p(xi,t,th,s)*d^gamma.
// Coefficients never involve the u variables; those only appear after the
// operator has been applied to the Gaussian kernel.
class DiffOp {
public:
    explicit DiffOp(AlphabetPtr alpha) : alpha_(std::move(alpha)) {}

    static DiffOp identity(AlphabetPtr alpha);
    static DiffOp partial(AlphabetPtr alpha, DerivIndex gamma);
    static DiffOp term(MultiPoly coeff, DerivIndex gamma);

    const AlphabetPtr& alphabet() const { return alpha_; }
    bool is_zero() const { return terms_.empty(); }

    // membership data for D(a, b)
    int order() const;           // b: max |gamma|
    int spatial_degree() const;  // a: max xi-degree over coefficients
    int degree_of_var(int var) const;

    DiffOp operator-() const;
    friend DiffOp operator+(const DiffOp& a, const DiffOp& b);
    friend DiffOp operator-(const DiffOp& a, const DiffOp& b);
    DiffOp& operator+=(const DiffOp& o) { *this = *this + o; return *this; }
    DiffOp& operator-=(const DiffOp& o) { *this = *this - o; return *this; }

    DiffOp scaled(const Rational& c) const;
    DiffOp scaled(const MultiPoly& p) const;

    // Leibniz composition (this ∘ other).
    friend DiffOp operator*(const DiffOp& a, const DiffOp& b);

    // Substitute a scalar (non-spatial) variable inside every coefficient.
    DiffOp substituted(int var, const MultiPoly& value) const;

    // Apply to a polynomial in the spatial variables.
    MultiPoly apply(const MultiPoly& f) const;

    friend bool operator==(const DiffOp& a, const DiffOp& b);
    friend bool operator!=(const DiffOp& a, const DiffOp& b) { return !(a == b); }

    // Deterministic debug form, highest derivative order first,
    // e.g. "(2 - 2*s1) d[3] + (xi1) d[2]".
    std::string to_string() const;

    using TermMap = std::map<DerivIndex, MultiPoly, GradedLexLess>;
    const TermMap& terms() const { return terms_; }

    void add_term(const DerivIndex& gamma, const MultiPoly& coeff);

private:
    AlphabetPtr alpha_;
    TermMap terms_;

    void check_same_alphabet(const DiffOp& o) const;
};

DiffOp commutator(const DiffOp& a, const DiffOp& b);

// Iterated adjoint ad_Q^j(A).
DiffOp ad_power(const DiffOp& q, const DiffOp& a, unsigned j);

// Finite Hadamard sum  sum_{j=0}^{a} theta^j/j! * ad_Q^j(A)  with theta kept
// symbolic. Throws NilpotencyError if the series fails to terminate at the
// spatial degree of A (i.e. Q is not constant-coefficient).
DiffOp exp_ad(const DiffOp& q, const DiffOp& a, int theta_var);

}  // namespace dtcm
