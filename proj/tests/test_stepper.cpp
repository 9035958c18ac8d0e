#include <cmath>

#include "doctest.h"
#include "dtcm/errors.hpp"
#include "dtcm/grid.hpp"
#include "dtcm/oracle.hpp"

using namespace dtcm;

namespace {

GridFn heat_gaussian(double lo, double h, int count, double tau) {
    return GridFn::sample({lo}, h, {count}, [tau](const std::vector<double>& x) {
        return std::exp(-x[0] * x[0] / (4.0 * tau)) / std::sqrt(4.0 * M_PI * tau);
    });
}

}  // namespace

TEST_CASE("apply_kernel: heat kernel preserves constants on the interior") {
    auto op = exact_kernel_op("const", {{"a", 1.0}});
    GridFn u = GridFn::make({-8.0}, 1.0 / 32, {513}, 1.0);
    GridFn v = apply_kernel(*op, u, 0.0, 0.05, 8.0);
    for (int j = 0; j < 513; ++j) {
        if (std::abs(u.coord(0, j)) > 4.0) continue;
        CHECK(v.values[static_cast<std::size_t>(j)] == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("apply_kernel: gaussian in, wider gaussian out") {
    auto op = exact_kernel_op("const", {{"a", 1.0}});
    double tau0 = 0.1, t = 0.15;
    GridFn u = heat_gaussian(-8.0, 1.0 / 64, 1025, tau0);
    GridFn v = apply_kernel(*op, u, 0.0, t, 8.0);
    GridFn want = heat_gaussian(-8.0, 1.0 / 64, 1025, tau0 + t);
    for (int j = 0; j < 1025; ++j) {
        if (std::abs(u.coord(0, j)) > 4.0) continue;
        CHECK(v.values[static_cast<std::size_t>(j)] ==
              doctest::Approx(want.values[static_cast<std::size_t>(j)]).epsilon(1e-7));
    }
}

TEST_CASE("apply_kernel: truncation tail shrinks like exp(-trunc^2/4)") {
    auto op = exact_kernel_op("const", {{"a", 1.0}});
    GridFn u = heat_gaussian(-8.0, 1.0 / 32, 513, 0.1);
    GridFn ref = apply_kernel(*op, u, 0.0, 0.1, 14.0);
    auto sup_diff = [&](double trunc) {
        GridFn v = apply_kernel(*op, u, 0.0, 0.1, trunc);
        double d = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j)
            d = std::max(d, std::abs(v.values[j] - ref.values[j]));
        return d;
    };
    // the discarded mass at radius trunc*sqrt(lambda tau) is of the order
    // exp(-trunc^2/4) times the data overlap, so each +2 on trunc must drop
    // it by orders of magnitude, reaching 1e-10 by trunc = 10
    double d6 = sup_diff(6.0), d8 = sup_diff(8.0), d10 = sup_diff(10.0);
    CHECK(d6 < 5e-5);
    CHECK(d8 < 5e-7);
    CHECK(d10 < 1e-10);
    CHECK(d6 > d8);
    CHECK(d8 > d10);
}

TEST_CASE("apply_kernel in two dimensions preserves constants") {
    std::map<std::string, double> params{
        {"N", 2}, {"a11", 1.2}, {"a12", 0.3}, {"a21", 0.3}, {"a22", 0.9}};
    auto op = exact_kernel_op("const", params);
    GridFn u = GridFn::make({-4.0, -4.0}, 1.0 / 8, {65, 65}, 1.0);
    GridFn v = apply_kernel(*op, u, 0.0, 0.02, 8.0);
    for (std::size_t j = 0; j < v.size(); ++j) {
        auto x = v.point(j);
        if (std::abs(x[0]) > 2.0 || std::abs(x[1]) > 2.0) continue;
        CHECK(v.values[j] == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("apply_kernel is bit-identical across thread counts") {
    auto model = builtin("ou");
    DtcmKernelOp kernel(model, 2, ZPolicy::left());
    GridFn u = heat_gaussian(-6.0, 1.0 / 32, 385, 0.1);
    GridFn a = apply_kernel(kernel, u, 0.0, 0.05, 8.0, 1);
    GridFn b = apply_kernel(kernel, u, 0.0, 0.05, 8.0, 4);
    CHECK(a.values == b.values);
}

TEST_CASE("apply_kernel guards") {
    auto op = exact_kernel_op("const", {{"a", 1.0}});
    GridFn u = GridFn::make({0.0}, 0.1, {11}, 0.0);
    CHECK_THROWS_AS(apply_kernel(*op, u, 0.1, 0.1, 8.0), DomainError);
}

TEST_CASE("bootstrap: const model is step-count independent") {
    // trunc_c = 10 keeps the per-step truncation tail below the 1e-8 gate
    auto model = builtin("const", {{"a", 1.0}});
    GridFn u0 = heat_gaussian(-8.0, 1.0 / 64, 1025, 0.1);
    GridFn u1 = bootstrap(*model, 0, ZPolicy::left(), u0, 0.2, 1, 10.0);
    GridFn u4 = bootstrap(*model, 0, ZPolicy::left(), u0, 0.2, 4, 10.0);
    GridFn u16 = bootstrap(*model, 0, ZPolicy::left(), u0, 0.2, 16, 10.0);
    double d14 = 0.0, d116 = 0.0;
    for (std::size_t j = 0; j < u1.size(); ++j) {
        if (std::abs(u1.point(j)[0]) > 4.0) continue;
        d14 = std::max(d14, std::abs(u1.values[j] - u4.values[j]));
        d116 = std::max(d116, std::abs(u1.values[j] - u16.values[j]));
    }
    CHECK(d14 < 1e-8);
    CHECK(d116 < 1e-8);
}

TEST_CASE("bootstrap: linearity in the initial datum") {
    auto model = builtin("ou");
    GridFn u0 = heat_gaussian(-8.0, 1.0 / 32, 513, 0.1);
    GridFn v0 = GridFn::sample({-8.0}, 1.0 / 32, {513}, [](const std::vector<double>& x) {
        return x[0] * std::exp(-x[0] * x[0]);
    });
    GridFn combo = u0;
    for (std::size_t j = 0; j < combo.size(); ++j)
        combo.values[j] = 2.0 * u0.values[j] - 0.5 * v0.values[j];
    GridFn a = bootstrap(*model, 2, ZPolicy::left(), combo, 0.25, 4, 8.0);
    GridFn b1 = bootstrap(*model, 2, ZPolicy::left(), u0, 0.25, 4, 8.0);
    GridFn b2 = bootstrap(*model, 2, ZPolicy::left(), v0, 0.25, 4, 8.0);
    for (std::size_t j = 0; j < a.size(); ++j)
        CHECK(a.values[j] ==
              doctest::Approx(2.0 * b1.values[j] - 0.5 * b2.values[j]).epsilon(1e-10));
}

TEST_CASE("grid norms: examples") {
    GridFn u = GridFn::sample({-4.0}, 1.0 / 16, {129}, [](const std::vector<double>& x) {
        return std::exp(-x[0] * x[0]);
    });
    NormSpec plain;  // p=2, a=0, r=0
    double got = grid_norm(u, plain);
    // continuum L2 norm of e^{-x^2} is (pi/2)^{1/4}
    CHECK(got == doctest::Approx(std::pow(M_PI / 2, 0.25)).epsilon(1e-3));

    GridFn zero = GridFn::make({-1.0}, 0.25, {9}, 0.0);
    for (const char* spec : {"p=2,a=0,r=0", "p=2,a=0.5,r=1", "p=inf,a=-0.3,r=0"})
        CHECK(grid_norm(zero, NormSpec::parse(spec)) == 0.0);

    // u = rho_{-a} sampled has weighted sup norm exactly 1
    NormSpec weighted = NormSpec::parse("p=inf,a=0.7,r=0");
    GridFn rho = GridFn::sample({-4.0}, 1.0 / 16, {129}, [](const std::vector<double>& x) {
        return std::exp(-0.7 * std::sqrt(1.0 + x[0] * x[0]));
    });
    CHECK(grid_norm(rho, weighted) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grid norm converges to the continuum norm at O(h^2)") {
    // e^{-|x|} has a kink, so the quadrature error is genuinely O(h^2)
    // (for entire functions the sum converges faster than any power)
    auto l2_of = [](double h) {
        int count = static_cast<int>(std::round(40.0 / h)) + 1;
        GridFn u = GridFn::sample({-20.0}, h, {count}, [](const std::vector<double>& x) {
            return std::exp(-std::abs(x[0]));
        });
        return grid_norm(u, NormSpec{});
    };
    double exact = 1.0;  // integral of e^{-2|x|} over R
    double e1 = std::abs(l2_of(1.0 / 4) - exact);
    double e2 = std::abs(l2_of(1.0 / 8) - exact);
    double e3 = std::abs(l2_of(1.0 / 16) - exact);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
    CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("grid norm r=1 needs three points per axis") {
    GridFn tiny = GridFn::make({0.0}, 1.0, {2}, 1.0);
    CHECK_THROWS_AS(grid_norm(tiny, NormSpec::parse("p=2,a=0,r=1")), StructuralError);
}

TEST_CASE("gridfn csv round trip") {
    GridFn u = GridFn::sample({-1.0}, 0.5, {5}, [](const std::vector<double>& x) {
        return 1.0 + x[0];
    });
    GridFn back = GridFn::from_csv(u.to_csv());
    CHECK(back.h == doctest::Approx(u.h));
    CHECK(back.values == u.values);
}
