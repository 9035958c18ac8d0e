#include <cmath>
#include <random>

#include "doctest.h"
#include "dtcm/oracle.hpp"

using namespace dtcm;

TEST_CASE("exact kernel spot values") {
    CHECK(exact_kernel("const", {{"a", 1.0}}, 0.0, 1.0, {0.0}, {0.0}) ==
          doctest::Approx(std::pow(4.0 * M_PI, -0.5)).epsilon(1e-14));
    // drift shift identity
    CHECK(exact_kernel("drift", {{"a", 1.0}, {"b", 1.0}}, 0.0, 0.04, {0.0}, {0.04}) ==
          doctest::Approx(1.4104739588693909).epsilon(1e-12));
    // ou at the mean: (2 pi Sigma)^{-1/2}, Sigma = 1 - e^{-0.2} = 0.18126924...
    double tau = 0.1;
    double sigma = 1.0 - std::exp(-2.0 * tau);
    double want = 1.0 / std::sqrt(2.0 * M_PI * sigma);
    CHECK(sigma == doctest::Approx(0.1812692469).epsilon(1e-10));
    CHECK(exact_kernel("ou", {{"D", 1.0}, {"kappa", 1.0}}, 0.0, tau, {0.5},
                       {0.5 * std::exp(-tau)}) == doctest::Approx(want).epsilon(1e-12));
    CHECK(want == doctest::Approx(0.9370).epsilon(1e-4));
    CHECK_THROWS(exact_kernel("const", {}, 0.2, 0.2, {0.0}, {0.0}));
}

TEST_CASE("exact kernels satisfy their pde in finite differences") {
    struct Case {
        const char* id;
        std::map<std::string, double> params;
        double a, bslope, bconst, c;  // L = a d^2 + (bslope x + bconst) d + c
    };
    std::vector<Case> cases = {
        {"const", {{"a", 1.3}}, 1.3, 0.0, 0.0, 0.0},
        {"drift", {{"a", 1.0}, {"b", 0.7}}, 1.0, 0.0, 0.7, 0.0},
        {"ou", {{"D", 0.8}, {"kappa", 1.2}}, 0.8, -1.2, 0.0, 0.0},
        {"bs_log", {{"sigma", 0.5}, {"r", 0.04}}, 0.125, 0.0, 0.04 - 0.125, -0.04},
    };
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<> tdist(0.05, 0.5), xdist(-1.0, 1.0);
    for (const auto& cs : cases) {
        for (int trial = 0; trial < 20; ++trial) {
            double tau = tdist(rng), x = xdist(rng), y = xdist(rng);
            double dh = 1e-4;
            auto k = [&](double tt, double xx) {
                return exact_kernel(cs.id, cs.params, 0.0, tt, {xx}, {y});
            };
            double dt = (k(tau + dh, x) - k(tau - dh, x)) / (2 * dh);
            double dx = (k(tau, x + dh) - k(tau, x - dh)) / (2 * dh);
            double dxx = (k(tau, x + dh) - 2 * k(tau, x) + k(tau, x - dh)) / (dh * dh);
            double lg = cs.a * dxx + (cs.bslope * x + cs.bconst) * dx + cs.c * k(tau, x);
            CHECK(std::abs(dt - lg) < 1e-4 * (std::abs(dt) + 1e-3));
        }
    }
}

TEST_CASE("cn_solve: heat gaussian widens exactly") {
    auto model = builtin("const", {{"a", 1.0}});
    double tau0 = 0.1, T = 0.2, h = 1.0 / 256;
    int count = static_cast<int>(std::round(16.0 / h)) + 1;
    GridFn u0 = GridFn::sample({-8.0}, h, {count}, [&](const std::vector<double>& x) {
        return std::exp(-x[0] * x[0] / (4 * tau0)) / std::sqrt(4 * M_PI * tau0);
    });
    GridFn u = cn_solve(*model, u0, 0.0, T, 512);
    for (int j = 0; j < count; ++j) {
        double x = u.coord(0, j);
        if (std::abs(x) > 4.0) continue;
        double want = std::exp(-x * x / (4 * (tau0 + T))) / std::sqrt(4 * M_PI * (tau0 + T));
        CHECK(u.values[static_cast<std::size_t>(j)] == doctest::Approx(want).epsilon(2e-6));
    }
}

TEST_CASE("cn_solve: zero data stays zero") {
    auto model = builtin("sin_diffusion", {{"eps", 0.3}});
    GridFn u0 = GridFn::make({-4.0}, 1.0 / 64, {513}, 0.0);
    GridFn u = cn_solve(*model, u0, 0.0, 0.3, 64);
    for (double v : u.values) CHECK(v == 0.0);
}

TEST_CASE("cn_solve matches the mehler propagation for ou") {
    auto model = builtin("ou", {{"D", 1.0}, {"kappa", 1.0}});
    double h = 1.0 / 512, T = 0.25;
    int count = static_cast<int>(std::round(20.0 / h)) + 1;
    GridFn u0 = GridFn::sample({-10.0}, h, {count}, [](const std::vector<double>& x) {
        return std::exp(-x[0] * x[0] / 0.4) / std::sqrt(0.4 * M_PI);
    });
    GridFn cn = cn_solve(*model, u0, 0.0, T, 1024);
    auto op = exact_kernel_op("ou", {{"D", 1.0}, {"kappa", 1.0}});
    GridFn ref = apply_kernel(*op, u0, 0.0, T, 8.0);
    double sup = 0.0;
    for (int j = 0; j < count; ++j) {
        if (std::abs(cn.coord(0, j)) > 2.0) continue;
        sup = std::max(sup, std::abs(cn.values[static_cast<std::size_t>(j)] -
                                     ref.values[static_cast<std::size_t>(j)]));
    }
    CHECK(sup < 1e-5);
}

TEST_CASE("cn self-convergence is second order (richardson)") {
    auto model = builtin("sin_diffusion", {{"eps", 0.3}});
    double T = 0.2;
    auto solve_at = [&](double h, int steps) {
        int count = static_cast<int>(std::round(16.0 / h)) + 1;
        GridFn u0 = GridFn::sample({-8.0}, h, {count}, [](const std::vector<double>& x) {
            return std::exp(-x[0] * x[0] / 0.2) / std::sqrt(0.2 * M_PI);
        });
        return cn_solve(*model, u0, 0.0, T, steps);
    };
    GridFn c1 = solve_at(1.0 / 64, 64);
    GridFn c2 = solve_at(1.0 / 128, 128);
    GridFn c3 = solve_at(1.0 / 256, 256);
    // sup differences on |x| <= 2 at common points
    double d12 = 0.0, d23 = 0.0;
    for (int j = 0; j < static_cast<int>(c1.size()); ++j) {
        double x = c1.coord(0, j);
        if (std::abs(x) > 2.0) continue;
        d12 = std::max(d12, std::abs(c1.values[static_cast<std::size_t>(j)] -
                                     c2.values[static_cast<std::size_t>(2 * j)]));
        d23 = std::max(d23, std::abs(c2.values[static_cast<std::size_t>(2 * j)] -
                                     c3.values[static_cast<std::size_t>(4 * j)]));
    }
    CHECK(d12 / d23 > 3.2);
    CHECK(d12 / d23 < 4.8);
}
