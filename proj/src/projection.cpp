#include "dtcm/projection.hpp"

#include <cmath>

#include "dtcm/errors.hpp"

namespace dtcm {

void fft(std::vector<std::complex<double>>& data, bool inverse) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0) throw StructuralError("fft: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> even = data[i + k];
                std::complex<double> odd = data[i + k + len / 2] * w;
                data[i + k] = even + odd;
                data[i + k + len / 2] = even - odd;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (auto& v : data) v /= static_cast<double>(n);
}

std::vector<double> fourier_lowpass(const std::vector<double>& values, int cutoff) {
    const std::size_t n = values.size();
    std::vector<std::complex<double>> spec(values.begin(), values.end());
    fft(spec, false);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t freq = k <= n / 2 ? k : n - k;
        if (freq > static_cast<std::size_t>(cutoff)) spec[k] = 0.0;
    }
    fft(spec, true);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = spec[k].real();
    return out;
}

namespace {

double l2_periodic(const std::vector<double>& v, double h) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s * h);
}

// One periodic Crank-Nicolson step via the Sherman-Morrison cyclic solve.
class PeriodicCn {
public:
    PeriodicCn(const CoefficientModel& model, std::size_t n, double dt)
        : model_(model), n_(n), dt_(dt), h_(2.0 * M_PI / static_cast<double>(n)),
          lo_(n), di_(n), up_(n) {
        if (!model.time_dependent()) {
            fill(0.0);
            frozen_ = true;
        }
    }

    void step(std::vector<double>& u, double t_old) {
        if (!frozen_) fill(t_old);  // midpoint coefficients are 2nd order too;
                                    // we use t_old for the explicit and t_new
                                    // for the implicit half below
        std::vector<double> rhs(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            std::size_t jm = (j + n_ - 1) % n_, jp = (j + 1) % n_;
            rhs[j] = (1.0 + 0.5 * dt_ * di_[j]) * u[j] + 0.5 * dt_ * lo_[j] * u[jm] +
                     0.5 * dt_ * up_[j] * u[jp];
        }
        if (!frozen_) fill(t_old + dt_);
        // solve (I - dt/2 A) u = rhs, cyclic tridiagonal
        std::vector<double> a(n_), b(n_), c(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            a[j] = -0.5 * dt_ * lo_[j];
            b[j] = 1.0 - 0.5 * dt_ * di_[j];
            c[j] = -0.5 * dt_ * up_[j];
        }
        u = cyclic_solve(a, b, c, rhs);
    }

private:
    const CoefficientModel& model_;
    std::size_t n_;
    double dt_, h_;
    std::vector<double> lo_, di_, up_;
    bool frozen_ = false;

    void fill(double t) {
        DerivIndex beta0{0};
        for (std::size_t j = 0; j < n_; ++j) {
            std::vector<double> x{h_ * static_cast<double>(j)};
            double a = model_.a(0, 0, 0, beta0, t, x);
            double b = model_.b(0, 0, beta0, t, x);
            double c = model_.c(0, beta0, t, x);
            lo_[j] = a / (h_ * h_) - b / (2 * h_);
            di_[j] = c - 2 * a / (h_ * h_);
            up_[j] = a / (h_ * h_) + b / (2 * h_);
        }
    }

    static std::vector<double> thomas(const std::vector<double>& a, const std::vector<double>& b,
                                      const std::vector<double>& c, const std::vector<double>& d) {
        const std::size_t n = d.size();
        std::vector<double> cp(n), dp(n), x(n);
        if (std::abs(b[0]) < 1e-300) throw NumericError("periodic cn: zero pivot");
        cp[0] = c[0] / b[0];
        dp[0] = d[0] / b[0];
        for (std::size_t j = 1; j < n; ++j) {
            double denom = b[j] - a[j] * cp[j - 1];
            if (std::abs(denom) < 1e-300)
                throw NumericError("periodic cn: tridiagonal breakdown at row " + std::to_string(j));
            cp[j] = c[j] / denom;
            dp[j] = (d[j] - a[j] * dp[j - 1]) / denom;
        }
        x[n - 1] = dp[n - 1];
        for (std::size_t j = n - 1; j-- > 0;) x[j] = dp[j] - cp[j] * x[j + 1];
        return x;
    }

    static std::vector<double> cyclic_solve(std::vector<double> a, std::vector<double> b,
                                            std::vector<double> c, const std::vector<double>& d) {
        const std::size_t n = d.size();
        // Sherman-Morrison: fold the corner entries a[0] (to u[n-1]) and
        // c[n-1] (to u[0]) into a rank-one update.
        double alpha = a[0], beta = c[n - 1];
        double gamma = -b[0];
        std::vector<double> bb = b;
        bb[0] -= gamma;
        bb[n - 1] -= alpha * beta / gamma;
        std::vector<double> u(n, 0.0);
        u[0] = gamma;
        u[n - 1] = alpha;
        std::vector<double> y = thomas(a, bb, c, d);
        std::vector<double> q = thomas(a, bb, c, u);
        double vy = y[0] + (beta / gamma) * y[n - 1];
        double vq = 1.0 + q[0] + (beta / gamma) * q[n - 1];
        if (std::abs(vq) < 1e-300) throw NumericError("periodic cn: singular rank-one update");
        std::vector<double> x(n);
        for (std::size_t j = 0; j < n; ++j) x[j] = y[j] - q[j] * vy / vq;
        return x;
    }
};

}  // namespace

ProjectionReport projection_experiment(const CoefficientModel& model,
                                       const std::vector<double>& x0, int cutoff,
                                       double horizon, int steps, int fine_steps) {
    if (model.dim() != 1) throw StructuralError("projection_experiment: 1D only");
    const std::size_t n = x0.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw StructuralError("projection_experiment: grid size must be a power of two");
    if (steps < 1) throw StructuralError("projection_experiment: steps must be >= 1");
    int substeps = (fine_steps + steps - 1) / steps;  // same fine dt for every sweep point

    // reject models whose coefficients are not 2 pi periodic
    DerivIndex beta0{0};
    for (int s = 0; s < 16; ++s) {
        double t = horizon * s / 16.0;
        double xs = 2.0 * M_PI * (s + 0.37) / 16.0;
        double inside = model.a(0, 0, 0, beta0, t, {xs});
        double wrapped = model.a(0, 0, 0, beta0, t, {xs + 2.0 * M_PI});
        double bw = model.b(0, 0, beta0, t, {xs}) - model.b(0, 0, beta0, t, {xs + 2.0 * M_PI});
        if (std::abs(inside - wrapped) > 1e-10 * (1 + std::abs(inside)) || std::abs(bw) > 1e-10)
            throw StructuralError("projection_experiment: model coefficients not 2 pi periodic");
    }

    const double h = 2.0 * M_PI / static_cast<double>(n);
    const double dt = horizon / steps / substeps;
    PeriodicCn cn(model, n, dt);

    std::vector<double> x = x0;
    std::vector<double> y = fourier_lowpass(x0, cutoff);
    std::vector<double> diff0(n);
    for (std::size_t j = 0; j < n; ++j) diff0[j] = x[j] - y[j];

    ProjectionReport report;
    report.steps = steps;
    report.cutoff = cutoff;
    report.horizon = horizon;
    report.x0_norm = l2_periodic(y, h);
    report.dx0_norm = l2_periodic(diff0, h);

    for (int k = 0; k < steps; ++k) {
        for (int s = 0; s < substeps; ++s) {
            double t_old = (static_cast<double>(k) * substeps + s) * dt;
            cn.step(x, t_old);
            cn.step(y, t_old);
        }
        y = fourier_lowpass(y, cutoff);
    }
    std::vector<double> diff(n);
    for (std::size_t j = 0; j < n; ++j) diff[j] = x[j] - y[j];
    report.err = l2_periodic(diff, h);
    double denom = report.dx0_norm + horizon * report.x0_norm;
    report.fitted_c = denom > 0 ? report.err / denom : 0.0;
    return report;
}

}  // namespace dtcm
