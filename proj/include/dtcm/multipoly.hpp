#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dtcm/rational.hpp"

namespace dtcm {

enum class VarKind { Spatial, UVar, Time, Theta, Sigma };

// Fixed, shared variable alphabet for one expansion pipeline.
// Layout: xi_1..xi_N | u_1..u_N | t | th | s_1..s_K.
// xi_i stands for the spatial offset x-z, u_i for the kernel offset x-y,
// t for the rescaled time, th for the Hadamard parameter, s_j for the
// ordered simplex variables.
class Alphabet {
public:
    static std::shared_ptr<const Alphabet> make(int dim, int sigma_count);

    int dim() const { return dim_; }
    int sigma_count() const { return sigma_count_; }
    int size() const { return 2 * dim_ + 2 + sigma_count_; }

    int xi(int i) const { return i; }
    int u(int i) const { return dim_ + i; }
    int time() const { return 2 * dim_; }
    int theta() const { return 2 * dim_ + 1; }
    int sigma(int j) const { return 2 * dim_ + 2 + j; }  // j is 0-based

    VarKind kind(int var) const;
    std::string name(int var) const;

    friend bool operator==(const Alphabet& a, const Alphabet& b) {
        return a.dim_ == b.dim_ && a.sigma_count_ == b.sigma_count_;
    }

private:
    Alphabet(int dim, int sigma_count) : dim_(dim), sigma_count_(sigma_count) {}
    int dim_;
    int sigma_count_;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

using Expo = std::vector<std::uint16_t>;  // one exponent per alphabet slot

// Graded lexicographic order: total degree first, then lex on the exponents.
struct GradedLexLess {
    bool operator()(const Expo& a, const Expo& b) const;
};

std::size_t poly_term_cap();
void set_poly_term_cap(std::size_t cap);

// Sparse multivariate polynomial with exact rational coefficients over a
// shared alphabet. Zero coefficients are never stored; term iteration order
// is the canonical graded-lex order, so serialization is byte-stable.
class MultiPoly {
public:
    explicit MultiPoly(AlphabetPtr alpha) : alpha_(std::move(alpha)) {}

    static MultiPoly constant(AlphabetPtr alpha, Rational c);
    static MultiPoly variable(AlphabetPtr alpha, int var, unsigned power = 1);
    static MultiPoly monomial(AlphabetPtr alpha, Expo e, Rational c);

    const AlphabetPtr& alphabet() const { return alpha_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    bool is_constant() const;
    Rational constant_value() const;  // coefficient of the empty monomial

    int total_degree() const;
    int degree_of(int var) const;
    int degree_in(VarKind kind) const;  // max summed exponent over that group
    bool depends_on(int var) const { return degree_of(var) > 0; }

    MultiPoly operator-() const;
    friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    MultiPoly& operator+=(const MultiPoly& o) { *this = *this + o; return *this; }
    MultiPoly& operator-=(const MultiPoly& o) { *this = *this - o; return *this; }
    MultiPoly& operator*=(const MultiPoly& o) { *this = *this * o; return *this; }

    MultiPoly scaled(const Rational& c) const;
    MultiPoly derivative(int var) const;
    MultiPoly substituted(int var, const MultiPoly& value) const;
    MultiPoly pow(unsigned e) const;

    double eval(const std::vector<double>& point) const;

    friend bool operator==(const MultiPoly& a, const MultiPoly& b);
    friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

    std::string to_string() const;

    using TermMap = std::map<Expo, Rational, GradedLexLess>;
    const TermMap& terms() const { return terms_; }

    void add_term(const Expo& e, const Rational& c);  // accumulates, drops zeros

private:
    AlphabetPtr alpha_;
    TermMap terms_;

    void check_same_alphabet(const MultiPoly& o) const;
};

// Monomial pretty-printer shared with DiffOp::to_string.
std::string monomial_to_string(const Alphabet& alpha, const Expo& e);

}  // namespace dtcm
