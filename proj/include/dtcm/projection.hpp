#pragma once

#include <complex>
#include <vector>

#include "dtcm/model.hpp"

namespace dtcm {

// In-place radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& data, bool inverse);

// Fourier low-pass on real periodic samples: keep modes |k| <= cutoff.
std::vector<double> fourier_lowpass(const std::vector<double>& values, int cutoff);

struct ProjectionReport {
    int steps = 0;
    int cutoff = 0;
    double horizon = 0.0;
    double err = 0.0;       // ||x_n - y_n||_2 (discrete, periodic)
    double x0_norm = 0.0;   // ||y_0||
    double dx0_norm = 0.0;  // ||x_0 - y_0||
    double fitted_c = 0.0;  // err / (dx0_norm + horizon * x0_norm)
};

// Evolves x_k by a fine periodic Crank-Nicolson reference (the proxy for U,
// substepped so the same propagator serves every outer step count) and
// y_k by the same propagator followed by the Fourier projection P; reports
// the fitted constant of ||x_n - y_n|| <= C (||x_0 - y_0|| + T_0 ||y_0||).
// The domain is [0, 2 pi) sampled at x0.size() (power of two) points; the
// model's coefficients must be 2 pi periodic.
ProjectionReport projection_experiment(const CoefficientModel& model,
                                       const std::vector<double>& x0, int cutoff,
                                       double horizon, int steps, int fine_steps = 1024);

}  // namespace dtcm
