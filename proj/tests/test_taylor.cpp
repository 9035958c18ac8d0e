#include "doctest.h"
#include "dtcm/errors.hpp"
#include "dtcm/taylor.hpp"

using namespace dtcm;

TEST_CASE("constant coefficients: L_0 = d^2, higher terms vanish") {
    auto fam = taylor_terms(*builtin("const", {{"a", 1.0}}), {0.0}, 0.0, 3);
    CHECK(fam.l(0) == DiffOp::partial(fam.alpha, {2}));
    for (int m = 1; m <= 3; ++m) CHECK(fam.l(m).is_zero());
}

TEST_CASE("a = 1 + x: L_1 = xi d^2, L_2 = 0") {
    auto model = from_spec(R"({"N":1,"a":[["1 + x1"]],"gamma":0.2,
                               "box":{"t":[0,1],"x":[[-0.7,0.7]]}})");
    auto fam = taylor_terms(*model, {0.0}, 0.0, 3);
    const auto& alpha = fam.alpha;
    CHECK(fam.l(0) == DiffOp::partial(alpha, {2}));
    CHECK(fam.l(1) == DiffOp::term(MultiPoly::variable(alpha, alpha->xi(0)), {2}));
    CHECK(fam.l(2).is_zero());
    CHECK(fam.l(3).is_zero());
}

TEST_CASE("a = 1 + t: weight rule puts t d^2 into L_2") {
    auto model = from_spec(R"({"N":1,"a":[["1 + t"]],"gamma":0.9,"box":{"t":[0,0.5]}})");
    auto fam = taylor_terms(*model, {0.0}, 0.0, 3);
    const auto& alpha = fam.alpha;
    CHECK(fam.l(0) == DiffOp::partial(alpha, {2}));
    CHECK(fam.l(1).is_zero());
    CHECK(fam.l(2) == DiffOp::term(MultiPoly::variable(alpha, alpha->time()), {2}));
    CHECK(fam.l(3).is_zero());
}

TEST_CASE("drift and zeroth-order coefficients shift by one and two weights") {
    auto model = from_spec(R"({"N":1,"a":[["1"]],"b":["2"],"c":"3","gamma":1.0})");
    auto fam = taylor_terms(*model, {0.0}, 0.0, 2);
    const auto& alpha = fam.alpha;
    CHECK(fam.l(0) == DiffOp::partial(alpha, {2}));
    CHECK(fam.l(1) == DiffOp::partial(alpha, {1}).scaled(Rational(2)));
    CHECK(fam.l(2) == DiffOp::identity(alpha).scaled(Rational(3)));
}

TEST_CASE("ou family: L_1 = -kappa z d, L_2 = -kappa xi d") {
    auto fam = taylor_terms(*builtin("ou", {{"D", 1.0}, {"kappa", 1.0}}), {0.25}, 0.0, 3);
    const auto& alpha = fam.alpha;
    CHECK(fam.l(0) == DiffOp::partial(alpha, {2}));
    CHECK(fam.l(1) == DiffOp::partial(alpha, {1}).scaled(Rational(-1, 4)));
    CHECK(fam.l(2) ==
          DiffOp::term(MultiPoly::variable(alpha, alpha->xi(0)).scaled(Rational(-1)), {1}));
    CHECK(fam.l(3).is_zero());
}

TEST_CASE("freeze-time translation uses t_base") {
    auto model = builtin("time_ramp", {{"a0", 1.0}, {"delta", 0.5}});
    auto fam = taylor_terms(*model, {0.0}, 0.4, 2);
    // L_0 = a(t_base) d^2 = 1.2 d^2
    CHECK(fam.l(0) ==
          DiffOp::partial(fam.alpha, {2}).scaled(Rational::from_double(1.2)));
    // L_2 = (d_t a)(t_base) t d^2 = 0.5 t d^2
    CHECK(fam.l(2) == DiffOp::term(MultiPoly::variable(fam.alpha, fam.alpha->time())
                                       .scaled(Rational(1, 2)),
                                   {2}));
}

TEST_CASE("ellipticity failure at the freeze point is a domain error") {
    auto model = from_spec(R"({"N":1,"a":[["1 + x1"]],"gamma":0.2,
                               "box":{"t":[0,1],"x":[[-0.7,0.7]]}})");
    CHECK_THROWS_AS(taylor_terms(*model, {-1.5}, 0.0, 2), DomainError);
}
