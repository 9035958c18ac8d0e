#include <cmath>
#include <random>

#include "doctest.h"
#include "dtcm/errors.hpp"
#include "dtcm/heatkernel.hpp"
#include "support/polygauss.hpp"
#include "support/random_ops.hpp"

using namespace dtcm;
using namespace dtcm::testsupport;

TEST_CASE("gaussian_eval closed-form spot values") {
    auto frz1 = EllipticFreeze::make(1, {1.0});
    CHECK(gaussian_eval(*frz1, 1.0, {0.0}) == doctest::Approx(0.2820947917738781).epsilon(1e-12));
    CHECK(gaussian_eval(*frz1, 1.0, {2.0}) ==
          doctest::Approx(std::exp(-1.0) * 0.2820947917738781).epsilon(1e-12));
    auto frz2 = EllipticFreeze::make(2, {1.0, 0.0, 0.0, 1.0});
    CHECK(gaussian_eval(*frz2, 0.25, {0.0, 0.0}) ==
          doctest::Approx(1.0 / M_PI).epsilon(1e-12));
    CHECK_THROWS_AS(gaussian_eval(*frz1, 0.0, {0.0}), DomainError);
}

TEST_CASE("cholesky rejects non-spd matrices") {
    CHECK_THROWS_AS(EllipticFreeze::make(1, {-0.5}), DomainError);
    CHECK_THROWS_AS(EllipticFreeze::make(2, {1.0, 2.0, 2.0, 1.0}), DomainError);
    CHECK_THROWS_AS(EllipticFreeze::make(2, {1.0, 0.5, 0.4, 1.0}), StructuralError);
}

TEST_CASE("freeze data: inverse, determinant, eigenvalue range") {
    auto frz = EllipticFreeze::make(2, {1.5, 0.3, 0.3, 1.0});
    // invA * A = I to 1e-12
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (int k = 0; k < 2; ++k)
                s += frz->inv_a()[static_cast<std::size_t>(i * 2 + k)] *
                     frz->a()[static_cast<std::size_t>(k * 2 + j)];
            CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
        }
    CHECK(frz->det_a() == doctest::Approx(1.5 - 0.09).epsilon(1e-12));
    // exact inverse agrees with the double one
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(frz->inv_a_exact(i, j).to_double() ==
                  doctest::Approx(frz->inv_a()[static_cast<std::size_t>(i * 2 + j)])
                      .epsilon(1e-14));
    double tr = 2.5, det = 1.41;
    double lo = (tr - std::sqrt(tr * tr - 4 * det)) / 2;
    double hi = (tr + std::sqrt(tr * tr - 4 * det)) / 2;
    CHECK(frz->lambda_min() == doctest::Approx(lo).epsilon(1e-10));
    CHECK(frz->lambda_max() == doctest::Approx(hi).epsilon(1e-10));
}

TEST_CASE("gaussian solves the frozen heat equation (finite differences)") {
    auto frz = EllipticFreeze::make(1, {1.3});
    double tau = 0.7, u = 0.45, dh = 1e-5;
    double dtau = (gaussian_eval(*frz, tau + dh, {u}) - gaussian_eval(*frz, tau - dh, {u})) /
                  (2 * dh);
    double dxx = (gaussian_eval(*frz, tau, {u + dh}) - 2 * gaussian_eval(*frz, tau, {u}) +
                  gaussian_eval(*frz, tau, {u - dh})) /
                 (dh * dh);
    CHECK(dtau == doctest::Approx(1.3 * dxx).epsilon(1e-5));
}

TEST_CASE("normalization: kernel integrates to one") {
    auto frz = EllipticFreeze::make(1, {1.7});
    for (double tau : {0.25, 1.0}) {
        double r = 10.0 * std::sqrt(tau * frz->lambda_max());
        double integral = integrate([&](double u) { return gaussian_eval(*frz, tau, {u}); },
                                    -r, r, 4000);
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-10));
    }
    // N = 2
    auto frz2 = EllipticFreeze::make(2, {1.2, 0.4, 0.4, 0.9});
    double r = 10.0 * std::sqrt(frz2->lambda_max());
    int n = 400;
    double h = 2 * r / n, sum = 0.0;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            double w = ((i == 0 || i == n) ? 0.5 : 1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);
            sum += w * gaussian_eval(*frz2, 1.0, {-r + h * i, -r + h * j});
        }
    CHECK(sum * h * h == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("second moments equal 2 A_ij (quadrature)") {
    auto frz = EllipticFreeze::make(2, {1.2, 0.4, 0.4, 0.9});
    double r = 12.0 * std::sqrt(frz->lambda_max());
    int n = 480;
    double h = 2 * r / n;
    double m11 = 0, m12 = 0, m22 = 0;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            double u1 = -r + h * i, u2 = -r + h * j;
            double w = ((i == 0 || i == n) ? 0.5 : 1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);
            double g = w * gaussian_eval(*frz, 1.0, {u1, u2});
            m11 += u1 * u1 * g;
            m12 += u1 * u2 * g;
            m22 += u2 * u2 * g;
        }
    m11 *= h * h;
    m12 *= h * h;
    m22 *= h * h;
    CHECK(m11 == doctest::Approx(2 * 1.2).epsilon(1e-8));
    CHECK(m12 == doctest::Approx(2 * 0.4).epsilon(1e-8));
    CHECK(m22 == doctest::Approx(2 * 0.9).epsilon(1e-8));
}

TEST_CASE("hermite prefactor examples") {
    auto alpha = Alphabet::make(1, 1);
    auto frz = EllipticFreeze::make(1, {1.0});
    // h_1 = -u/2
    auto h1 = hermite_prefactor(alpha, *frz, {1});
    CHECK(h1 == MultiPoly::variable(alpha, alpha->u(0)).scaled(Rational(-1, 2)));
    // h_2 = u^2/4 - 1/2
    auto h2 = hermite_prefactor(alpha, *frz, {2});
    auto expect = MultiPoly::variable(alpha, alpha->u(0), 2).scaled(Rational(1, 4)) -
                  MultiPoly::constant(alpha, Rational(1, 2));
    CHECK(h2 == expect);
}

TEST_CASE("apply_diffop_to_gaussian matches finite differences of the kernel") {
    auto alpha = Alphabet::make(1, 1);
    auto frz = EllipticFreeze::make(1, {1.0});
    auto terms = apply_diffop_to_gaussian(DiffOp::partial(alpha, {2}), frz);
    REQUIRE(terms.size() == 1);
    for (double u : {-1.0, -0.3, 0.0, 0.4, 1.2}) {
        double dh = 1e-5;
        double fd = (gaussian_eval(*frz, 1.0, {u + dh}) - 2 * gaussian_eval(*frz, 1.0, {u}) +
                     gaussian_eval(*frz, 1.0, {u - dh})) /
                    (dh * dh);
        CHECK(terms[0].eval(1.0, {0.0}, {u}) == doctest::Approx(fd).epsilon(1e-6));
        CHECK(gaussian_deriv_eval(*frz, 1.0, {u}, {2}) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("apply_diffop_to_gaussian rejects leftover scalar variables") {
    auto alpha = Alphabet::make(1, 1);
    auto frz = EllipticFreeze::make(1, {1.0});
    DiffOp p = DiffOp::term(MultiPoly::variable(alpha, alpha->sigma(0)), {1});
    CHECK_THROWS_AS(apply_diffop_to_gaussian(p, frz), StructuralError);
}

TEST_CASE("odd derivative terms integrate to zero") {
    auto alpha = Alphabet::make(1, 1);
    auto frz = EllipticFreeze::make(1, {1.4});
    for (DerivIndex gamma : {DerivIndex{1}, DerivIndex{3}}) {
        double integral = integrate(
            [&](double u) { return gaussian_deriv_eval(*frz, 1.0, {u}, gamma); }, -14, 14,
            4000);
        CHECK(integral == doctest::Approx(0.0).epsilon(1e-10));
    }
}

TEST_CASE("semigroup: convolving two tau-kernels gives the 2 tau kernel") {
    auto frz = EllipticFreeze::make(1, {0.9});
    double tau = 0.3;
    for (double x : {-0.7, 0.0, 0.5, 1.1}) {
        double conv = integrate(
            [&](double y) {
                return gaussian_eval(*frz, tau, {x - y}) * gaussian_eval(*frz, tau, {y});
            },
            -12, 12, 3000);
        CHECK(conv == doctest::Approx(gaussian_eval(*frz, 2 * tau, {x})).epsilon(1e-8));
    }
}

TEST_CASE("hadamard pull-through, numeric check on a test gaussian") {
    // e^{theta L0} A f  ==  exp_ad(theta L0)(A) e^{theta L0} f  via quadrature
    std::mt19937_64 rng(606);
    auto alpha = Alphabet::make(1, 2);
    double a_coeff = 1.0;
    auto frz = EllipticFreeze::make(1, {a_coeff});
    auto d2 = DiffOp::partial(alpha, {2});
    PolyGauss f{{1.0}, 1.0, 0.2};  // e^{-(x-0.2)^2}
    std::vector<double> scalar_point(static_cast<std::size_t>(alpha->size()), 0.0);

    for (int trial = 0; trial < 4; ++trial) {
        DiffOp op = random_diffop(alpha, 2, 2, rng);
        for (double theta : {0.25, 0.5, 1.0}) {
            // lhs: e^{theta L0}(A f)
            PolyGaussSum af = apply_diffop(op, 0.0, scalar_point, f);
            // rhs operator: theta substituted numerically into exp_ad
            DiffOp pulled = exp_ad(d2.scaled(Rational::from_double(a_coeff)), op, alpha->theta());
            std::vector<double> pt = scalar_point;
            pt[static_cast<std::size_t>(alpha->theta())] = theta;
            for (double x : {-0.6, 0.1, 0.8}) {
                double lhs = integrate(
                    [&](double y) {
                        return gaussian_eval(*frz, theta, {x - y}) * af.eval(y);
                    },
                    -14, 14, 4000);
                // rhs: apply pulled op to (e^{theta L0} f) using derivative kernels
                double rhs = 0.0;
                for (const auto& [gamma, coeff] : pulled.terms()) {
                    auto q = coeff_in_x(coeff, 0.0, pt);
                    double polyx = 0.0;
                    for (std::size_t k = q.size(); k-- > 0;) polyx = polyx * x + q[k];
                    double conv = integrate(
                        [&](double y) {
                            return gaussian_deriv_eval(*frz, theta, {x - y}, gamma) * f.eval(y);
                        },
                        -14, 14, 4000);
                    rhs += polyx * conv;
                }
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
            }
        }
    }
}
