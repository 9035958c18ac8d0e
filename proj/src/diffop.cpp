#include "dtcm/diffop.hpp"

#include <numeric>

#include "dtcm/errors.hpp"

namespace dtcm {

Rational factorial(unsigned n) {
    BigInt r(1);
    for (unsigned i = 2; i <= n; ++i) r *= BigInt(i);
    return Rational(r, BigInt(1));
}

Rational binomial(unsigned n, unsigned k) {
    if (k > n) return Rational(0);
    BigInt num(1), den(1);
    for (unsigned i = 0; i < k; ++i) {
        num *= BigInt(n - i);
        den *= BigInt(i + 1);
    }
    return Rational(num, den);
}

DiffOp DiffOp::identity(AlphabetPtr alpha) {
    DerivIndex g(static_cast<std::size_t>(alpha->dim()), 0);
    return term(MultiPoly::constant(alpha, Rational(1)), g);
}

DiffOp DiffOp::partial(AlphabetPtr alpha, DerivIndex gamma) {
    return term(MultiPoly::constant(alpha, Rational(1)), std::move(gamma));
}

DiffOp DiffOp::term(MultiPoly coeff, DerivIndex gamma) {
    const AlphabetPtr& alpha = coeff.alphabet();
    if (gamma.size() != static_cast<std::size_t>(alpha->dim()))
        throw StructuralError("DiffOp: derivative index size != dimension");
    if (coeff.degree_in(VarKind::UVar) > 0)
        throw StructuralError("DiffOp: coefficients must not involve u variables");
    DiffOp op(alpha);
    op.add_term(gamma, coeff);
    return op;
}

void DiffOp::add_term(const DerivIndex& gamma, const MultiPoly& coeff) {
    if (coeff.is_zero()) return;
    auto it = terms_.find(gamma);
    if (it == terms_.end()) {
        terms_.emplace(gamma, coeff);
    } else {
        it->second += coeff;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

void DiffOp::check_same_alphabet(const DiffOp& o) const {
    if (!(*alpha_ == *o.alpha_))
        throw StructuralError("DiffOp: operands use different alphabets");
}

int DiffOp::order() const {
    int b = 0;
    for (const auto& [g, c] : terms_)
        b = std::max(b, std::accumulate(g.begin(), g.end(), 0));
    return b;
}

int DiffOp::spatial_degree() const {
    int a = 0;
    for (const auto& [g, c] : terms_) a = std::max(a, c.degree_in(VarKind::Spatial));
    return a;
}

int DiffOp::degree_of_var(int var) const {
    int d = 0;
    for (const auto& [g, c] : terms_) d = std::max(d, c.degree_of(var));
    return d;
}

DiffOp DiffOp::operator-() const {
    DiffOp r(alpha_);
    for (const auto& [g, c] : terms_) r.terms_.emplace(g, -c);
    return r;
}

DiffOp operator+(const DiffOp& a, const DiffOp& b) {
    a.check_same_alphabet(b);
    DiffOp r = a;
    for (const auto& [g, c] : b.terms_) r.add_term(g, c);
    return r;
}

DiffOp operator-(const DiffOp& a, const DiffOp& b) { return a + (-b); }

DiffOp DiffOp::scaled(const Rational& c) const {
    DiffOp r(alpha_);
    if (c.is_zero()) return r;
    for (const auto& [g, p] : terms_) r.terms_.emplace(g, p.scaled(c));
    return r;
}

DiffOp DiffOp::scaled(const MultiPoly& p) const {
    DiffOp r(alpha_);
    for (const auto& [g, c] : terms_) r.add_term(g, c * p);
    return r;
}

namespace {

// Iterate rho over the box 0 <= rho <= gamma (componentwise).
bool next_sub_index(DerivIndex& rho, const DerivIndex& gamma) {
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (rho[i] < gamma[i]) {
            ++rho[i];
            for (std::size_t j = 0; j < i; ++j) rho[j] = 0;
            return true;
        }
    }
    return false;
}

MultiPoly spatial_derivative(const MultiPoly& p, const DerivIndex& rho) {
    MultiPoly r = p;
    const AlphabetPtr& alpha = p.alphabet();
    for (std::size_t i = 0; i < rho.size(); ++i)
        for (int k = 0; k < rho[i]; ++k)
            r = r.derivative(alpha->xi(static_cast<int>(i)));
    return r;
}

Rational multi_binomial(const DerivIndex& gamma, const DerivIndex& rho) {
    Rational c(1);
    for (std::size_t i = 0; i < gamma.size(); ++i) c *= binomial(gamma[i], rho[i]);
    return c;
}

}  // namespace

DiffOp operator*(const DiffOp& a, const DiffOp& b) {
    a.check_same_alphabet(b);
    DiffOp r(a.alpha_);
    for (const auto& [gamma, p] : a.terms_) {
        for (const auto& [delta, q] : b.terms_) {
            // (p d^gamma)(q d^delta) = sum_{rho<=gamma} C(gamma,rho) p (d^rho q) d^{gamma-rho+delta}
            DerivIndex rho(gamma.size(), 0);
            do {
                MultiPoly dq = spatial_derivative(q, rho);
                if (dq.is_zero()) continue;
                MultiPoly coeff = (p * dq).scaled(multi_binomial(gamma, rho));
                DerivIndex out(gamma.size());
                for (std::size_t i = 0; i < out.size(); ++i)
                    out[i] = static_cast<std::uint16_t>(gamma[i] - rho[i] + delta[i]);
                r.add_term(out, coeff);
            } while (next_sub_index(rho, gamma));
        }
    }
    return r;
}

DiffOp DiffOp::substituted(int var, const MultiPoly& value) const {
    if (alpha_->kind(var) == VarKind::Spatial || alpha_->kind(var) == VarKind::UVar)
        throw StructuralError("DiffOp: can only substitute scalar variables");
    DiffOp r(alpha_);
    for (const auto& [g, c] : terms_) r.add_term(g, c.substituted(var, value));
    return r;
}

MultiPoly DiffOp::apply(const MultiPoly& f) const {
    MultiPoly r(alpha_);
    for (const auto& [g, c] : terms_) r += c * spatial_derivative(f, g);
    return r;
}

bool operator==(const DiffOp& a, const DiffOp& b) {
    return *a.alpha_ == *b.alpha_ && a.terms_ == b.terms_;
}

std::string DiffOp::to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        if (!s.empty()) s += " + ";
        s += "(" + it->second.to_string() + ")";
        int total = std::accumulate(it->first.begin(), it->first.end(), 0);
        if (total > 0) {
            s += " d[";
            for (std::size_t i = 0; i < it->first.size(); ++i) {
                if (i) s += ",";
                s += std::to_string(it->first[i]);
            }
            s += "]";
        }
    }
    return s;
}

DiffOp commutator(const DiffOp& a, const DiffOp& b) { return a * b - b * a; }

DiffOp ad_power(const DiffOp& q, const DiffOp& a, unsigned j) {
    DiffOp r = a;
    for (unsigned i = 0; i < j; ++i) r = commutator(q, r);
    return r;
}

DiffOp exp_ad(const DiffOp& q, const DiffOp& a, int theta_var) {
    const AlphabetPtr& alpha = a.alphabet();
    switch (alpha->kind(theta_var)) {
        case VarKind::Spatial:
        case VarKind::UVar:
            throw StructuralError("exp_ad: theta must be a scalar variable");
        default:
            break;
    }
    if (a.degree_of_var(theta_var) > 0 || q.degree_of_var(theta_var) > 0)
        throw StructuralError("exp_ad: operands already depend on theta");

    const int cap = a.spatial_degree();
    DiffOp result = a;
    DiffOp cur = a;
    for (int j = 1;; ++j) {
        cur = commutator(q, cur);
        if (cur.is_zero()) break;
        if (j > cap)
            throw NilpotencyError(
                "exp_ad: ad-series not nilpotent at the spatial degree of A "
                "(is Q constant-coefficient?)");
        MultiPoly theta_pow =
            MultiPoly::variable(alpha, theta_var, static_cast<unsigned>(j))
                .scaled(factorial(static_cast<unsigned>(j)).reciprocal());
        result += cur.scaled(theta_pow);
    }
    return result;
}

}  // namespace dtcm
