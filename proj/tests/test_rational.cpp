#include <random>

#include "doctest.h"
#include "dtcm/rational.hpp"

using namespace dtcm;

TEST_CASE("bigint arithmetic agrees with int64") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 5000; ++i) {
        auto a = static_cast<std::int64_t>(rng()) >> (rng() % 40);
        auto b = static_cast<std::int64_t>(rng()) >> (rng() % 40);
        BigInt ba(a), bb(b);
        CHECK((ba + bb).to_int64() == a + b);
        CHECK((ba - bb).to_int64() == a - b);
        if (b != 0) {
            BigInt q, r;
            BigInt::divmod(ba, bb, q, r);
            CHECK(q.to_int64() == a / b);
            CHECK(r.to_int64() == a % b);
        }
    }
}

TEST_CASE("bigint divmod law and gcd on wide values") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        BigInt a(1), b(1);
        for (unsigned k = 0; k < 1 + rng() % 6; ++k)
            a *= BigInt(static_cast<std::int64_t>(rng() >> 1) + 1);
        for (unsigned k = 0; k < 1 + rng() % 4; ++k)
            b *= BigInt(static_cast<std::int64_t>(rng() >> 1) + 1);
        if (rng() & 1) a = -a;
        BigInt q, r;
        BigInt::divmod(a, b, q, r);
        CHECK(q * b + r == a);
        CHECK(r.abs() < b.abs());
        BigInt g = BigInt::gcd(a.abs(), b);
        CHECK((a % g).is_zero());
        CHECK((b % g).is_zero());
    }
}

TEST_CASE("bigint decimal round trip") {
    BigInt big = BigInt::pow(BigInt(99999999999ll), 9);
    CHECK(BigInt::from_string(big.to_string()) == big);
    CHECK(BigInt(-1234).to_string() == "-1234");
}

TEST_CASE("rational normalization invariants") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-3, -6) == Rational(1, 2));
    CHECK(Rational(3, -6) == Rational(-1, 2));
    CHECK(Rational(0, 7) == Rational(0));
    CHECK(Rational(0).den().is_one());
    CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("rational arithmetic is exact") {
    Rational half(1, 2), third(1, 3);
    CHECK(half + third == Rational(5, 6));
    CHECK(half - third == Rational(1, 6));
    CHECK(half * third == Rational(1, 6));
    CHECK(half / third == Rational(3, 2));
    // a chain that would lose precision in floats
    Rational sum(0);
    for (int k = 1; k <= 50; ++k) sum += Rational(1, k);
    for (int k = 1; k <= 50; ++k) sum -= Rational(1, k);
    CHECK(sum.is_zero());
}

TEST_CASE("double conversion is exact both ways") {
    CHECK(Rational::from_double(0.5) == Rational(1, 2));
    CHECK(Rational::from_double(-0.375) == Rational(-3, 8));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<> unit(-10, 10);
    for (int i = 0; i < 2000; ++i) {
        double v = unit(rng);
        CHECK(Rational::from_double(v).to_double() == v);
    }
    Rational r(123456789, 987654321);
    CHECK(std::abs(r.to_double() - 123456789.0 / 987654321.0) < 1e-16);
}
