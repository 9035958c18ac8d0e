#include "dtcm/oracle.hpp"

#include <cmath>

#include "dtcm/elliptic.hpp"
#include "dtcm/errors.hpp"

namespace dtcm {

namespace {

double get(const std::map<std::string, double>& params, const std::string& key,
           double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

// const/drift/bs_log family: e^{c tau} G_{2 a tau}(x - y + b tau)
struct ConstLike {
    FreezePtr frz;
    std::vector<double> b;
    double c;

    double eval(double tau, const std::vector<double>& x, const std::vector<double>& y) const {
        std::vector<double> u(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) u[i] = x[i] - y[i] + b[i] * tau;
        return std::exp(c * tau) * gaussian_eval(*frz, tau, u);
    }
};

ConstLike make_const_like(const std::string& id, const std::map<std::string, double>& params) {
    ConstLike k;
    if (id == "const" || id == "drift") {
        int dim = static_cast<int>(get(params, "N", 1));
        std::vector<double> a(static_cast<std::size_t>(dim * dim), 0.0);
        if (params.count("a11")) {
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    std::string key = "a" + std::to_string(i + 1) + std::to_string(j + 1);
                    std::string alt = "a" + std::to_string(j + 1) + std::to_string(i + 1);
                    a[static_cast<std::size_t>(i * dim + j)] =
                        params.count(key) ? params.at(key)
                        : params.count(alt) ? params.at(alt) : 0.0;
                }
        } else {
            double scalar = get(params, "a", 1.0);
            for (int i = 0; i < dim; ++i) a[static_cast<std::size_t>(i * dim + i)] = scalar;
        }
        k.frz = EllipticFreeze::make(dim, a);
        k.b.assign(static_cast<std::size_t>(dim), 0.0);
        if (id == "drift" && dim == 1) k.b[0] = get(params, "b", 1.0);
        for (int i = 0; i < dim; ++i) {
            std::string key = "b" + std::to_string(i + 1);
            if (params.count(key)) k.b[static_cast<std::size_t>(i)] = params.at(key);
        }
        k.c = get(params, "c", 0.0);
        return k;
    }
    if (id == "bs_log") {
        double sigma = get(params, "sigma", 0.3);
        double r = get(params, "r", 0.05);
        double a = 0.5 * sigma * sigma;
        k.frz = EllipticFreeze::make(1, {a});
        k.b = {r - a};
        k.c = -r;
        return k;
    }
    throw StructuralError("exact_kernel: no const-like form for " + id);
}

double mehler(double d, double kappa, double tau, double x, double y) {
    if (kappa == 0.0) {
        double var = 2.0 * d * tau;
        return std::exp(-(y - x) * (y - x) / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
    }
    double mean = x * std::exp(-kappa * tau);
    double var = (d / kappa) * (1.0 - std::exp(-2.0 * kappa * tau));
    return std::exp(-(y - mean) * (y - mean) / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
}

}  // namespace

bool has_exact_kernel(const std::string& id) {
    return id == "const" || id == "drift" || id == "ou" || id == "bs_log";
}

double exact_kernel(const std::string& id, const std::map<std::string, double>& params,
                    double t0, double t1, const std::vector<double>& x,
                    const std::vector<double>& y) {
    double tau = t1 - t0;
    if (!(tau > 0)) throw DomainError("exact_kernel: t must exceed t0");
    if (id == "ou") {
        if (x.size() != 1) throw StructuralError("exact_kernel: ou is 1D");
        return mehler(get(params, "D", 1.0), get(params, "kappa", 1.0), tau, x[0], y[0]);
    }
    return make_const_like(id, params).eval(tau, x, y);
}

std::unique_ptr<KernelOp> exact_kernel_op(const std::string& id,
                                          const std::map<std::string, double>& params) {
    if (!has_exact_kernel(id))
        throw StructuralError("exact_kernel: no closed form for model '" + id +
                              "' (available: const, drift, ou, bs_log)");
    if (id == "ou") {
        double d = get(params, "D", 1.0), kappa = get(params, "kappa", 1.0);
        return std::make_unique<ClosedFormKernelOp>(
            1, d,
            [d, kappa](double t0, double t1, const std::vector<double>& x,
                       const std::vector<double>& y) {
                return mehler(d, kappa, t1 - t0, x[0], y[0]);
            });
    }
    ConstLike k = make_const_like(id, params);
    double lmax = k.frz->lambda_max();
    int dim = k.frz->dim();
    return std::make_unique<ClosedFormKernelOp>(
        dim, lmax,
        [k](double t0, double t1, const std::vector<double>& x, const std::vector<double>& y) {
            return k.eval(t1 - t0, x, y);
        });
}

GridFn cn_solve(const CoefficientModel& model, const GridFn& u0, double t0, double horizon,
                int steps) {
    if (model.dim() != 1 || u0.dim() != 1) throw StructuralError("cn_solve: 1D only");
    if (steps < 1) throw StructuralError("cn_solve: steps must be >= 1");
    if (!(horizon > 0)) throw DomainError("cn_solve: horizon must be positive");

    const int n = u0.shape[0];
    const double h = u0.h;
    const double dt = horizon / steps;
    DerivIndex beta0{0};

    // discrete L at time t: (a/h^2 - b/2h) u_{j-1} + (c - 2a/h^2) u_j + (a/h^2 + b/2h) u_{j+1}
    auto fill_coeffs = [&](double t, std::vector<double>& lo, std::vector<double>& di,
                           std::vector<double>& up) {
        for (int j = 0; j < n; ++j) {
            std::vector<double> x{u0.coord(0, j)};
            double a = model.a(0, 0, 0, beta0, t, x);
            double b = model.b(0, 0, beta0, t, x);
            double c = model.c(0, beta0, t, x);
            lo[static_cast<std::size_t>(j)] = a / (h * h) - b / (2 * h);
            di[static_cast<std::size_t>(j)] = c - 2 * a / (h * h);
            up[static_cast<std::size_t>(j)] = a / (h * h) + b / (2 * h);
        }
    };

    std::vector<double> lo_old(static_cast<std::size_t>(n)), di_old(static_cast<std::size_t>(n)),
        up_old(static_cast<std::size_t>(n)), lo_new(static_cast<std::size_t>(n)),
        di_new(static_cast<std::size_t>(n)), up_new(static_cast<std::size_t>(n));

    const bool frozen = !model.time_dependent();
    if (frozen) {
        fill_coeffs(t0, lo_old, di_old, up_old);
        lo_new = lo_old;
        di_new = di_old;
        up_new = up_old;
    }

    GridFn u = u0;
    std::vector<double> rhs(static_cast<std::size_t>(n)), cp(static_cast<std::size_t>(n)),
        dp(static_cast<std::size_t>(n));

    for (int step = 0; step < steps; ++step) {
        double t_old = t0 + step * dt, t_new = t_old + dt;
        if (!frozen) {
            fill_coeffs(t_old, lo_old, di_old, up_old);
            fill_coeffs(t_new, lo_new, di_new, up_new);
        }
        // rhs = (I + dt/2 A_old) u, Dirichlet zero outside
        for (int j = 0; j < n; ++j) {
            double s = (1.0 + 0.5 * dt * di_old[static_cast<std::size_t>(j)]) * u.values[static_cast<std::size_t>(j)];
            if (j > 0) s += 0.5 * dt * lo_old[static_cast<std::size_t>(j)] * u.values[static_cast<std::size_t>(j - 1)];
            if (j < n - 1) s += 0.5 * dt * up_old[static_cast<std::size_t>(j)] * u.values[static_cast<std::size_t>(j + 1)];
            rhs[static_cast<std::size_t>(j)] = s;
        }
        // Thomas solve of (I - dt/2 A_new) u_new = rhs
        double diag0 = 1.0 - 0.5 * dt * di_new[0];
        if (std::abs(diag0) < 1e-300) throw NumericError("cn_solve: zero pivot at row 0");
        cp[0] = -0.5 * dt * up_new[0] / diag0;
        dp[0] = rhs[0] / diag0;
        for (int j = 1; j < n; ++j) {
            double aj = -0.5 * dt * lo_new[static_cast<std::size_t>(j)];
            double bj = 1.0 - 0.5 * dt * di_new[static_cast<std::size_t>(j)];
            double cj = -0.5 * dt * up_new[static_cast<std::size_t>(j)];
            double denom = bj - aj * cp[static_cast<std::size_t>(j - 1)];
            if (std::abs(denom) < 1e-300)
                throw NumericError("cn_solve: tridiagonal breakdown at row " + std::to_string(j) +
                                   " of " + std::to_string(n));
            cp[static_cast<std::size_t>(j)] = cj / denom;
            dp[static_cast<std::size_t>(j)] =
                (rhs[static_cast<std::size_t>(j)] - aj * dp[static_cast<std::size_t>(j - 1)]) / denom;
        }
        u.values[static_cast<std::size_t>(n - 1)] = dp[static_cast<std::size_t>(n - 1)];
        for (int j = n - 2; j >= 0; --j)
            u.values[static_cast<std::size_t>(j)] =
                dp[static_cast<std::size_t>(j)] -
                cp[static_cast<std::size_t>(j)] * u.values[static_cast<std::size_t>(j + 1)];
    }
    return u;
}

}  // namespace dtcm
