#include <cmath>
#include <complex>

#include "doctest.h"
#include "dtcm/errors.hpp"
#include "dtcm/projection.hpp"

using namespace dtcm;

TEST_CASE("fft round trip and a known transform") {
    std::vector<std::complex<double>> data(64);
    for (std::size_t j = 0; j < data.size(); ++j)
        data[j] = std::cos(2.0 * M_PI * 5.0 * j / 64.0);
    auto spec = data;
    fft(spec, false);
    for (std::size_t k = 0; k < 64; ++k) {
        double want = (k == 5 || k == 59) ? 32.0 : 0.0;
        CHECK(spec[k].real() == doctest::Approx(want).epsilon(1e-9));
        CHECK(spec[k].imag() == doctest::Approx(0.0).epsilon(1e-9));
    }
    fft(spec, true);
    for (std::size_t j = 0; j < 64; ++j)
        CHECK(spec[j].real() == doctest::Approx(data[j].real()).epsilon(1e-12));
    std::vector<std::complex<double>> bad(5);
    CHECK_THROWS_AS(fft(bad, false), StructuralError);
}

TEST_CASE("lowpass keeps low modes and kills high ones") {
    std::vector<double> v(128);
    for (std::size_t j = 0; j < v.size(); ++j) {
        double x = 2.0 * M_PI * j / 128.0;
        v[j] = std::sin(3 * x) + 0.25 * std::cos(40 * x);
    }
    auto filtered = fourier_lowpass(v, 8);
    for (std::size_t j = 0; j < v.size(); ++j) {
        double x = 2.0 * M_PI * j / 128.0;
        CHECK(filtered[j] == doctest::Approx(std::sin(3 * x)).epsilon(1e-12));
    }
}

TEST_CASE("projection experiment: band-limited data under constant coefficients") {
    auto model = builtin("const", {{"a", 1.0}});
    std::vector<double> x0(256);
    for (std::size_t j = 0; j < x0.size(); ++j) {
        double x = 2.0 * M_PI * j / 256.0;
        x0[j] = std::sin(3 * x) + 0.5 * std::cos(7 * x);
    }
    ProjectionReport rep = projection_experiment(*model, x0, 32, 0.25, 16);
    CHECK(rep.dx0_norm == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.err < 1e-10);
}

TEST_CASE("projection experiment: full spectrum cutoff is the identity") {
    auto model = builtin("sin_diffusion", {{"eps", 0.3}, {"omega", 1.0}});
    std::vector<double> x0(128);
    for (std::size_t j = 0; j < x0.size(); ++j) {
        double x = 2.0 * M_PI * j / 128.0;
        x0[j] = std::exp(std::sin(x));
    }
    ProjectionReport rep = projection_experiment(*model, x0, 64, 0.25, 8);
    CHECK(rep.err == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("projection experiment: fitted constant is stable in n") {
    auto model = builtin("sin_diffusion", {{"eps", 0.3}, {"omega", 1.0}});
    std::vector<double> x0(256);
    for (std::size_t j = 0; j < x0.size(); ++j) {
        double x = 2.0 * M_PI * j / 256.0;
        x0[j] = std::exp(std::sin(x)) + 0.3 * std::cos(3 * x) + 0.2 * std::cos(28 * x) +
                0.1 * std::sin(44 * x);
    }
    double c_min = 1e300, c_max = 0.0;
    for (int n : {8, 16, 32, 64}) {
        ProjectionReport rep = projection_experiment(*model, x0, 32, 0.25, n);
        c_min = std::min(c_min, rep.fitted_c);
        c_max = std::max(c_max, rep.fitted_c);
    }
    CHECK(c_max / c_min < 2.0);
}

TEST_CASE("non-periodic models are rejected") {
    auto model = builtin("ou");
    std::vector<double> x0(64, 1.0);
    CHECK_THROWS_AS(projection_experiment(*model, x0, 8, 0.1, 4), StructuralError);
}
