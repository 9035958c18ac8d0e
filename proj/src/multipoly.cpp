#include "dtcm/multipoly.hpp"

#include <atomic>
#include <cmath>
#include <numeric>

#include "dtcm/errors.hpp"

namespace dtcm {

std::shared_ptr<const Alphabet> Alphabet::make(int dim, int sigma_count) {
    if (dim < 1) throw StructuralError("Alphabet: dimension must be >= 1");
    if (sigma_count < 0) throw StructuralError("Alphabet: negative sigma count");
    return std::shared_ptr<const Alphabet>(new Alphabet(dim, sigma_count));
}

VarKind Alphabet::kind(int var) const {
    if (var < dim_) return VarKind::Spatial;
    if (var < 2 * dim_) return VarKind::UVar;
    if (var == 2 * dim_) return VarKind::Time;
    if (var == 2 * dim_ + 1) return VarKind::Theta;
    return VarKind::Sigma;
}

std::string Alphabet::name(int var) const {
    switch (kind(var)) {
        case VarKind::Spatial: return "xi" + std::to_string(var + 1);
        case VarKind::UVar: return "u" + std::to_string(var - dim_ + 1);
        case VarKind::Time: return "t";
        case VarKind::Theta: return "th";
        case VarKind::Sigma: return "s" + std::to_string(var - 2 * dim_ - 1);
    }
    return "?";
}

bool GradedLexLess::operator()(const Expo& a, const Expo& b) const {
    int da = std::accumulate(a.begin(), a.end(), 0);
    int db = std::accumulate(b.begin(), b.end(), 0);
    if (da != db) return da < db;
    return a < b;
}

namespace {
std::atomic<std::size_t> g_term_cap{1000000};
}

std::size_t poly_term_cap() { return g_term_cap.load(); }
void set_poly_term_cap(std::size_t cap) { g_term_cap.store(cap); }

MultiPoly MultiPoly::constant(AlphabetPtr alpha, Rational c) {
    MultiPoly p(alpha);
    p.add_term(Expo(static_cast<std::size_t>(alpha->size()), 0), c);
    return p;
}

MultiPoly MultiPoly::variable(AlphabetPtr alpha, int var, unsigned power) {
    Expo e(static_cast<std::size_t>(alpha->size()), 0);
    e[static_cast<std::size_t>(var)] = static_cast<std::uint16_t>(power);
    return monomial(std::move(alpha), std::move(e), Rational(1));
}

MultiPoly MultiPoly::monomial(AlphabetPtr alpha, Expo e, Rational c) {
    if (e.size() != static_cast<std::size_t>(alpha->size()))
        throw StructuralError("MultiPoly: exponent vector size mismatch");
    MultiPoly p(std::move(alpha));
    p.add_term(e, c);
    return p;
}

void MultiPoly::add_term(const Expo& e, const Rational& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
        if (terms_.size() > poly_term_cap())
            throw ResourceError("MultiPoly: term cap exceeded (" +
                                std::to_string(poly_term_cap()) + ")");
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

void MultiPoly::check_same_alphabet(const MultiPoly& o) const {
    if (!(*alpha_ == *o.alpha_))
        throw StructuralError("MultiPoly: operands use different alphabets");
}

bool MultiPoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && total_degree() == 0);
}

Rational MultiPoly::constant_value() const {
    Expo zero(static_cast<std::size_t>(alpha_->size()), 0);
    auto it = terms_.find(zero);
    return it == terms_.end() ? Rational(0) : it->second;
}

int MultiPoly::total_degree() const {
    int deg = 0;
    for (const auto& [e, c] : terms_)
        deg = std::max(deg, std::accumulate(e.begin(), e.end(), 0));
    return deg;
}

int MultiPoly::degree_of(int var) const {
    int deg = 0;
    for (const auto& [e, c] : terms_)
        deg = std::max(deg, static_cast<int>(e[static_cast<std::size_t>(var)]));
    return deg;
}

int MultiPoly::degree_in(VarKind kind) const {
    int deg = 0;
    for (const auto& [e, c] : terms_) {
        int d = 0;
        for (int v = 0; v < alpha_->size(); ++v)
            if (alpha_->kind(v) == kind) d += e[static_cast<std::size_t>(v)];
        deg = std::max(deg, d);
    }
    return deg;
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly r(alpha_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
    a.check_same_alphabet(b);
    MultiPoly r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, c);
    return r;
}

MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) {
    a.check_same_alphabet(b);
    MultiPoly r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, -c);
    return r;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.check_same_alphabet(b);
    MultiPoly r(a.alpha_);
    Expo e(static_cast<std::size_t>(a.alpha_->size()), 0);
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            for (std::size_t i = 0; i < e.size(); ++i)
                e[i] = static_cast<std::uint16_t>(ea[i] + eb[i]);
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

MultiPoly MultiPoly::scaled(const Rational& c) const {
    MultiPoly r(alpha_);
    if (c.is_zero()) return r;
    for (const auto& [e, v] : terms_) r.terms_.emplace(e, v * c);
    return r;
}

MultiPoly MultiPoly::derivative(int var) const {
    MultiPoly r(alpha_);
    auto vi = static_cast<std::size_t>(var);
    for (const auto& [e, c] : terms_) {
        if (e[vi] == 0) continue;
        Expo d = e;
        --d[vi];
        r.add_term(d, c * Rational(e[vi]));
    }
    return r;
}

MultiPoly MultiPoly::substituted(int var, const MultiPoly& value) const {
    check_same_alphabet(value);
    auto vi = static_cast<std::size_t>(var);
    // powers of the replacement, memoized up to the max exponent present
    std::vector<MultiPoly> powers{constant(alpha_, Rational(1))};
    MultiPoly r(alpha_);
    for (const auto& [e, c] : terms_) {
        unsigned k = e[vi];
        while (powers.size() <= k) powers.push_back(powers.back() * value);
        Expo rest = e;
        rest[vi] = 0;
        MultiPoly term = powers[k].scaled(c);
        for (const auto& [pe, pc] : term.terms()) {
            Expo merged = pe;
            for (std::size_t i = 0; i < merged.size(); ++i)
                merged[i] = static_cast<std::uint16_t>(merged[i] + rest[i]);
            r.add_term(merged, pc);
        }
    }
    return r;
}

MultiPoly MultiPoly::pow(unsigned e) const {
    MultiPoly r = constant(alpha_, Rational(1));
    for (unsigned i = 0; i < e; ++i) r *= *this;
    return r;
}

double MultiPoly::eval(const std::vector<double>& point) const {
    if (point.size() != static_cast<std::size_t>(alpha_->size()))
        throw StructuralError("MultiPoly: eval point size mismatch");
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
        double m = c.to_double();
        for (std::size_t i = 0; i < point.size(); ++i)
            for (int k = 0; k < e[i]; ++k) m *= point[i];
        sum += m;
    }
    return sum;
}

bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return *a.alpha_ == *b.alpha_ && a.terms_ == b.terms_;
}

std::string monomial_to_string(const Alphabet& alpha, const Expo& e) {
    std::string s;
    for (int v = 0; v < alpha.size(); ++v) {
        auto p = e[static_cast<std::size_t>(v)];
        if (p == 0) continue;
        if (!s.empty()) s += "*";
        s += alpha.name(v);
        if (p > 1) s += "^" + std::to_string(p);
    }
    return s;
}

std::string MultiPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [e, c] : terms_) {
        if (!s.empty()) s += " + ";
        std::string mono = monomial_to_string(*alpha_, e);
        if (mono.empty()) s += c.to_string();
        else if (c.is_one()) s += mono;
        else s += c.to_string() + "*" + mono;
    }
    return s;
}

}  // namespace dtcm
