#include "dtcm/bigint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dtcm {

namespace {
constexpr std::uint64_t kBase = 1ull << 32;
}

BigInt::BigInt(std::int64_t v) {
    if (v == 0) return;
    sign_ = v < 0 ? -1 : 1;
    std::uint64_t u = v < 0 ? ~static_cast<std::uint64_t>(v) + 1 : static_cast<std::uint64_t>(v);
    mag_.push_back(static_cast<std::uint32_t>(u & 0xffffffffu));
    if (u >> 32) mag_.push_back(static_cast<std::uint32_t>(u >> 32));
}

void BigInt::trim() {
    while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
    if (mag_.empty()) sign_ = 0;
}

bool BigInt::is_one() const {
    return sign_ == 1 && mag_.size() == 1 && mag_[0] == 1;
}

std::size_t BigInt::bit_length() const {
    if (mag_.empty()) return 0;
    std::uint32_t top = mag_.back();
    std::size_t bits = (mag_.size() - 1) * 32;
    while (top) { ++bits; top >>= 1; }
    return bits;
}

bool BigInt::fits_int64() const {
    std::size_t bl = bit_length();
    if (bl < 64) return true;
    // -2^63 fits as a special case
    return bl == 64 && sign_ < 0 && mag_[0] == 0 && mag_[1] == 0x80000000u;
}

std::int64_t BigInt::to_int64() const {
    std::uint64_t u = 0;
    if (mag_.size() > 0) u |= mag_[0];
    if (mag_.size() > 1) u |= static_cast<std::uint64_t>(mag_[1]) << 32;
    return sign_ < 0 ? -static_cast<std::int64_t>(u) : static_cast<std::int64_t>(u);
}

double BigInt::to_double() const {
    if (sign_ == 0) return 0.0;
    std::size_t bl = bit_length();
    if (bl <= 63) return static_cast<double>(sign_) * static_cast<double>(to_int64() * sign_);
    // take the top 64 bits, scale by the dropped exponent
    std::size_t drop = bl - 64;
    BigInt top = shifted_right(drop);
    std::uint64_t u = static_cast<std::uint32_t>(top.mag_[0]);
    u |= static_cast<std::uint64_t>(top.mag_[1]) << 32;
    return sign_ * std::ldexp(static_cast<double>(u), static_cast<int>(drop));
}

BigInt BigInt::operator-() const {
    BigInt r = *this;
    r.sign_ = -r.sign_;
    return r;
}

BigInt BigInt::abs() const {
    BigInt r = *this;
    if (r.sign_ < 0) r.sign_ = 1;
    return r;
}

int BigInt::compare_mag(const std::vector<std::uint32_t>& a,
                        const std::vector<std::uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

int BigInt::compare(const BigInt& a, const BigInt& b) {
    if (a.sign_ != b.sign_) return a.sign_ < b.sign_ ? -1 : 1;
    int c = compare_mag(a.mag_, b.mag_);
    return a.sign_ >= 0 ? c : -c;
}

std::vector<std::uint32_t> BigInt::add_mag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
    const auto& big = a.size() >= b.size() ? a : b;
    const auto& small = a.size() >= b.size() ? b : a;
    std::vector<std::uint32_t> r(big.size() + 1, 0);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < big.size(); ++i) {
        std::uint64_t s = carry + big[i] + (i < small.size() ? small[i] : 0u);
        r[i] = static_cast<std::uint32_t>(s & 0xffffffffu);
        carry = s >> 32;
    }
    r[big.size()] = static_cast<std::uint32_t>(carry);
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

std::vector<std::uint32_t> BigInt::sub_mag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> r(a.size(), 0);
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::int64_t d = static_cast<std::int64_t>(a[i]) - borrow -
                         (i < b.size() ? static_cast<std::int64_t>(b[i]) : 0);
        if (d < 0) { d += static_cast<std::int64_t>(kBase); borrow = 1; }
        else borrow = 0;
        r[i] = static_cast<std::uint32_t>(d);
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

std::vector<std::uint32_t> BigInt::mul_mag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<std::uint32_t> r(a.size() + b.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::uint64_t carry = 0;
        std::uint64_t ai = a[i];
        for (std::size_t j = 0; j < b.size(); ++j) {
            std::uint64_t s = static_cast<std::uint64_t>(r[i + j]) + carry + ai * b[j];
            r[i + j] = static_cast<std::uint32_t>(s & 0xffffffffu);
            carry = s >> 32;
        }
        r[i + b.size()] = static_cast<std::uint32_t>(carry);
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    BigInt r;
    if (a.sign_ == b.sign_) {
        r.mag_ = BigInt::add_mag(a.mag_, b.mag_);
        r.sign_ = a.sign_;
    } else {
        int c = BigInt::compare_mag(a.mag_, b.mag_);
        if (c == 0) return BigInt();
        if (c > 0) { r.mag_ = BigInt::sub_mag(a.mag_, b.mag_); r.sign_ = a.sign_; }
        else       { r.mag_ = BigInt::sub_mag(b.mag_, a.mag_); r.sign_ = b.sign_; }
    }
    r.trim();
    return r;
}

BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

BigInt operator*(const BigInt& a, const BigInt& b) {
    BigInt r;
    if (a.sign_ == 0 || b.sign_ == 0) return r;
    r.mag_ = BigInt::mul_mag(a.mag_, b.mag_);
    r.sign_ = a.sign_ * b.sign_;
    r.trim();
    return r;
}

BigInt BigInt::shifted_left(std::size_t bits) const {
    if (sign_ == 0 || bits == 0) return *this;
    std::size_t limbs = bits / 32, rem = bits % 32;
    BigInt r;
    r.sign_ = sign_;
    r.mag_.assign(limbs, 0);
    if (rem == 0) {
        r.mag_.insert(r.mag_.end(), mag_.begin(), mag_.end());
    } else {
        std::uint32_t carry = 0;
        for (std::uint32_t limb : mag_) {
            r.mag_.push_back((limb << rem) | carry);
            carry = static_cast<std::uint32_t>(static_cast<std::uint64_t>(limb) >> (32 - rem));
        }
        if (carry) r.mag_.push_back(carry);
    }
    r.trim();
    return r;
}

BigInt BigInt::shifted_right(std::size_t bits) const {
    std::size_t limbs = bits / 32, rem = bits % 32;
    if (limbs >= mag_.size()) return BigInt();
    BigInt r;
    r.sign_ = sign_;
    r.mag_.assign(mag_.begin() + static_cast<std::ptrdiff_t>(limbs), mag_.end());
    if (rem) {
        std::uint32_t carry = 0;
        for (std::size_t i = r.mag_.size(); i-- > 0;) {
            std::uint32_t limb = r.mag_[i];
            r.mag_[i] = (limb >> rem) | carry;
            carry = limb << (32 - rem);
        }
    }
    r.trim();
    return r;
}

// Knuth algorithm D on base-2^32 limbs.
void BigInt::divmod_mag(const std::vector<std::uint32_t>& a,
                        const std::vector<std::uint32_t>& b,
                        std::vector<std::uint32_t>& q,
                        std::vector<std::uint32_t>& r) {
    q.clear();
    r.clear();
    if (b.empty()) throw std::domain_error("BigInt: division by zero");
    if (compare_mag(a, b) < 0) { r = a; return; }
    if (b.size() == 1) {
        std::uint64_t d = b[0], rem = 0;
        q.assign(a.size(), 0);
        for (std::size_t i = a.size(); i-- > 0;) {
            std::uint64_t cur = (rem << 32) | a[i];
            q[i] = static_cast<std::uint32_t>(cur / d);
            rem = cur % d;
        }
        while (!q.empty() && q.back() == 0) q.pop_back();
        if (rem) r.push_back(static_cast<std::uint32_t>(rem));
        return;
    }

    // normalize so the top limb of the divisor has its high bit set
    int shift = 0;
    for (std::uint32_t top = b.back(); !(top & 0x80000000u); top <<= 1) ++shift;
    BigInt an, bn;
    an.sign_ = bn.sign_ = 1;
    an.mag_ = a;
    bn.mag_ = b;
    an = an.shifted_left(static_cast<std::size_t>(shift));
    bn = bn.shifted_left(static_cast<std::size_t>(shift));
    std::vector<std::uint32_t> u = an.mag_, v = bn.mag_;
    std::size_t n = v.size(), m = u.size() - n;
    u.push_back(0);
    q.assign(m + 1, 0);

    const std::uint64_t vtop = v[n - 1], vnext = v[n - 2];
    for (std::size_t j = m + 1; j-- > 0;) {
        std::uint64_t num = (static_cast<std::uint64_t>(u[j + n]) << 32) | u[j + n - 1];
        std::uint64_t qhat = num / vtop, rhat = num % vtop;
        while (qhat >= kBase || qhat * vnext > ((rhat << 32) | u[j + n - 2])) {
            --qhat;
            rhat += vtop;
            if (rhat >= kBase) break;
        }
        // multiply-subtract qhat * v from u[j .. j+n]
        std::int64_t borrow = 0;
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t p = qhat * v[i] + carry;
            carry = p >> 32;
            std::int64_t t = static_cast<std::int64_t>(u[i + j]) -
                             static_cast<std::int64_t>(p & 0xffffffffu) - borrow;
            if (t < 0) { t += static_cast<std::int64_t>(kBase); borrow = 1; }
            else borrow = 0;
            u[i + j] = static_cast<std::uint32_t>(t);
        }
        std::int64_t t = static_cast<std::int64_t>(u[j + n]) -
                         static_cast<std::int64_t>(carry) - borrow;
        if (t < 0) {
            // qhat was one too large: add v back
            --qhat;
            std::uint64_t c2 = 0;
            for (std::size_t i = 0; i < n; ++i) {
                std::uint64_t s = static_cast<std::uint64_t>(u[i + j]) + v[i] + c2;
                u[i + j] = static_cast<std::uint32_t>(s & 0xffffffffu);
                c2 = s >> 32;
            }
            t += static_cast<std::int64_t>(c2);
        }
        u[j + n] = static_cast<std::uint32_t>(t);
        q[j] = static_cast<std::uint32_t>(qhat);
    }
    while (!q.empty() && q.back() == 0) q.pop_back();
    u.resize(n);
    BigInt rb;
    rb.sign_ = 1;
    rb.mag_ = u;
    rb.trim();
    rb = rb.shifted_right(static_cast<std::size_t>(shift));
    r = rb.mag_;
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    std::vector<std::uint32_t> qm, rm;
    divmod_mag(a.mag_, b.mag_, qm, rm);
    q = BigInt();
    r = BigInt();
    q.mag_ = qm;
    r.mag_ = rm;
    q.sign_ = qm.empty() ? 0 : a.sign_ * b.sign_;
    r.sign_ = rm.empty() ? 0 : a.sign_;
}

BigInt operator/(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    return q;
}

BigInt operator%(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    return r;
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
    a.sign_ = a.mag_.empty() ? 0 : 1;
    b.sign_ = b.mag_.empty() ? 0 : 1;
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    // binary gcd: strip common powers of two, then subtract-and-shift
    auto trailing_zeros = [](const BigInt& x) {
        std::size_t tz = 0;
        for (std::uint32_t limb : x.mag_) {
            if (limb == 0) { tz += 32; continue; }
            while (!(limb & 1)) { ++tz; limb >>= 1; }
            break;
        }
        return tz;
    };
    std::size_t za = trailing_zeros(a), zb = trailing_zeros(b);
    std::size_t common = std::min(za, zb);
    a = a.shifted_right(za);
    b = b.shifted_right(zb);
    while (true) {
        int c = compare_mag(a.mag_, b.mag_);
        if (c == 0) break;
        if (c < 0) std::swap(a, b);
        a.mag_ = sub_mag(a.mag_, b.mag_);
        a.trim();
        if (a.is_zero()) { a = b; break; }
        a = a.shifted_right(trailing_zeros(a));
    }
    return a.shifted_left(common);
}

BigInt BigInt::pow(const BigInt& base, unsigned exp) {
    BigInt result(1), b = base;
    while (exp) {
        if (exp & 1u) result *= b;
        exp >>= 1;
        if (exp) b *= b;
    }
    return result;
}

BigInt BigInt::from_string(const std::string& decimal) {
    BigInt r;
    std::size_t i = 0;
    int sign = 1;
    if (i < decimal.size() && (decimal[i] == '-' || decimal[i] == '+')) {
        sign = decimal[i] == '-' ? -1 : 1;
        ++i;
    }
    if (i == decimal.size()) throw std::invalid_argument("BigInt: empty numeral");
    for (; i < decimal.size(); ++i) {
        char c = decimal[i];
        if (c < '0' || c > '9') throw std::invalid_argument("BigInt: bad digit");
        r = r * BigInt(10) + BigInt(c - '0');
    }
    if (!r.is_zero()) r.sign_ = sign;
    return r;
}

std::string BigInt::to_string() const {
    if (is_zero()) return "0";
    BigInt x = abs();
    const BigInt chunk(1000000000);
    std::vector<std::uint32_t> groups;
    while (!x.is_zero()) {
        BigInt q, r;
        divmod(x, chunk, q, r);
        groups.push_back(r.is_zero() ? 0u : r.mag_[0]);
        x = q;
    }
    std::string s = sign_ < 0 ? "-" : "";
    s += std::to_string(groups.back());
    for (std::size_t i = groups.size() - 1; i-- > 0;) {
        std::string g = std::to_string(groups[i]);
        s += std::string(9 - g.size(), '0') + g;
    }
    return s;
}

}  // namespace dtcm
