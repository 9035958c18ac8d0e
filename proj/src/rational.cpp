#include "dtcm/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace dtcm {

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    normalize();
}

Rational::Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
    normalize();
}

void Rational::normalize() {
    if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
    if (num_.is_zero()) { den_ = BigInt(1); return; }
    if (den_.is_negative()) { num_ = -num_; den_ = -den_; }
    BigInt g = BigInt::gcd(num_.abs(), den_);
    if (!g.is_one()) {
        num_ = num_ / g;
        den_ = den_ / g;
    }
}

Rational Rational::from_double(double v) {
    if (!std::isfinite(v)) throw std::domain_error("Rational: non-finite double");
    if (v == 0.0) return Rational();
    int exp = 0;
    double mant = std::frexp(v, &exp);       // v = mant * 2^exp, |mant| in [0.5, 1)
    auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));  // exact
    exp -= 53;
    BigInt num(scaled), den(1);
    if (exp >= 0) num = num.shifted_left(static_cast<std::size_t>(exp));
    else den = den.shifted_left(static_cast<std::size_t>(-exp));
    return Rational(std::move(num), std::move(den));
}

double Rational::to_double() const {
    if (num_.is_zero()) return 0.0;
    // scale so both parts carry full mantissas, then divide
    auto nb = static_cast<std::ptrdiff_t>(num_.bit_length());
    auto db = static_cast<std::ptrdiff_t>(den_.bit_length());
    std::ptrdiff_t shift = nb - db;           // num/den ~ 2^shift
    BigInt n = num_, d = den_;
    if (shift > 0) d = d.shifted_left(static_cast<std::size_t>(shift));
    else if (shift < 0) n = n.shifted_left(static_cast<std::size_t>(-shift));
    // now n/d in [0.5, 2); take 63 fractional bits
    BigInt q = n.shifted_left(63) / d;
    return std::ldexp(q.to_double(), static_cast<int>(shift - 63));
}

std::string Rational::to_string() const {
    if (den_.is_one()) return num_.to_string();
    return num_.to_string() + "/" + den_.to_string();
}

Rational Rational::operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
}

Rational Rational::reciprocal() const {
    if (num_.is_zero()) throw std::domain_error("Rational: reciprocal of zero");
    return Rational(den_, num_);
}

Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_.is_zero()) throw std::domain_error("Rational: division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
}

bool operator<(const Rational& a, const Rational& b) {
    return BigInt::compare(a.num_ * b.den_, b.num_ * a.den_) < 0;
}

}  // namespace dtcm
