#include "dtcm/grid.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "dtcm/errors.hpp"
#include "dtcm/threads.hpp"

namespace dtcm {

GridFn GridFn::make(std::vector<double> origin, double h, std::vector<int> shape,
                    double fill) {
    if (!(h > 0)) throw StructuralError("GridFn: spacing must be positive");
    if (origin.size() != shape.size()) throw StructuralError("GridFn: origin/shape mismatch");
    std::size_t total = 1;
    for (int s : shape) {
        if (s < 1) throw StructuralError("GridFn: empty axis");
        total *= static_cast<std::size_t>(s);
    }
    GridFn g;
    g.origin = std::move(origin);
    g.h = h;
    g.shape = std::move(shape);
    g.values.assign(total, fill);
    return g;
}

GridFn GridFn::sample(std::vector<double> origin, double h, std::vector<int> shape,
                      const std::function<double(const std::vector<double>&)>& fn) {
    GridFn g = make(std::move(origin), h, std::move(shape));
    for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = fn(g.point(i));
    return g;
}

std::vector<double> GridFn::point(std::size_t flat) const {
    std::vector<double> x(origin.size());
    for (std::size_t axis = origin.size(); axis-- > 0;) {
        auto extent = static_cast<std::size_t>(shape[axis]);
        x[axis] = origin[axis] + h * static_cast<double>(flat % extent);
        flat /= extent;
    }
    return x;
}

bool GridFn::finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

std::string GridFn::to_csv() const {
    std::string out;
    for (std::size_t axis = 0; axis < origin.size(); ++axis)
        out += "x" + std::to_string(axis + 1) + ",";
    out += "value\n";
    char buf[64];
    for (std::size_t i = 0; i < size(); ++i) {
        std::vector<double> x = point(i);
        for (double xi : x) {
            std::snprintf(buf, sizeof buf, "%.17g,", xi);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g\n", values[i]);
        out += buf;
    }
    return out;
}

GridFn GridFn::from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw StructuralError("GridFn: empty CSV");
    std::vector<double> xs, vs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t comma = line.find(',');
        if (comma == std::string::npos) throw StructuralError("GridFn: bad CSV row");
        xs.push_back(std::stod(line.substr(0, comma)));
        vs.push_back(std::stod(line.substr(comma + 1)));
    }
    if (xs.size() < 2) throw StructuralError("GridFn: need at least two rows");
    double h = xs[1] - xs[0];
    if (!(h > 0)) throw StructuralError("GridFn: CSV x not increasing");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (std::abs(xs[i] - xs[i - 1] - h) > 1e-9 * (1 + std::abs(h)))
            throw StructuralError("GridFn: CSV grid not uniform");
    GridFn g = make({xs[0]}, h, {static_cast<int>(xs.size())});
    g.values = vs;
    return g;
}

NormSpec NormSpec::parse(const std::string& text) {
    NormSpec spec;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw StructuralError("norm spec: expected key=value");
        std::string key = item.substr(0, eq), value = item.substr(eq + 1);
        if (key == "p") {
            if (value == "inf" || value == "oo") spec.p = 0;
            else spec.p = std::stoi(value);
            if (spec.p != 2 && spec.p != 0)
                throw StructuralError("norm spec: p must be 2 or inf");
        } else if (key == "a") {
            spec.a = std::stod(value);
        } else if (key == "r") {
            spec.r = std::stoi(value);
            if (spec.r != 0 && spec.r != 1)
                throw StructuralError("norm spec: r must be 0 or 1");
        } else if (key == "w") {
            spec.w = {std::stod(value)};
        } else {
            throw StructuralError("norm spec: unknown key " + key);
        }
    }
    return spec;
}

std::string NormSpec::to_string() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "p=%s,a=%.17g,r=%d", p == 0 ? "inf" : "2", a, r);
    return buf;
}

namespace {

double weight_at(const NormSpec& spec, const std::vector<double>& x) {
    double d2 = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double c = spec.w.empty() ? 0.0 : spec.w[i];
        d2 += (x[i] - c) * (x[i] - c);
    }
    return std::exp(spec.a * std::sqrt(d2));
}

}  // namespace

double grid_norm(const GridFn& u, const NormSpec& spec) {
    const int n = u.dim();
    std::vector<double> weighted(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        weighted[i] = weight_at(spec, u.point(i)) * u.values[i];

    if (spec.p == 0) {
        double m = 0.0;
        for (double v : weighted) m = std::max(m, std::abs(v));
        return m;
    }

    double cell = std::pow(u.h, n);
    double sum = 0.0;
    for (double v : weighted) sum += v * v * cell;

    if (spec.r == 1) {
        for (int axis = 0; axis < n; ++axis) {
            if (u.shape[static_cast<std::size_t>(axis)] < 3)
                throw StructuralError("grid_norm: r=1 needs at least 3 points per axis");
        }
        // strides for index arithmetic
        std::vector<std::size_t> stride(static_cast<std::size_t>(n), 1);
        for (int axis = n - 2; axis >= 0; --axis)
            stride[static_cast<std::size_t>(axis)] =
                stride[static_cast<std::size_t>(axis + 1)] *
                static_cast<std::size_t>(u.shape[static_cast<std::size_t>(axis + 1)]);
        for (int axis = 0; axis < n; ++axis) {
            std::size_t st = stride[static_cast<std::size_t>(axis)];
            int extent = u.shape[static_cast<std::size_t>(axis)];
            for (std::size_t i = 0; i < u.size(); ++i) {
                int idx = static_cast<int>((i / st) % static_cast<std::size_t>(extent));
                double d;
                if (idx == 0)
                    d = (-3 * weighted[i] + 4 * weighted[i + st] - weighted[i + 2 * st]) /
                        (2 * u.h);
                else if (idx == extent - 1)
                    d = (3 * weighted[i] - 4 * weighted[i - st] + weighted[i - 2 * st]) /
                        (2 * u.h);
                else
                    d = (weighted[i + st] - weighted[i - st]) / (2 * u.h);
                sum += d * d * cell;
            }
        }
    }
    return std::sqrt(sum);
}

DtcmKernelOp::DtcmKernelOp(ModelPtr model, int m, ZPolicy zp, KernelConfig config)
    : model_(std::move(model)), m_(m), zp_(zp), config_(config) {
    // truncation scale: largest diffusion eigenvalue sampled over the model box
    const ModelBox& box = model_->box();
    double lmax = 0.0;
    const int samples = 64;
    for (int s = 0; s <= samples; ++s) {
        double t = box.t[0] + (box.t[1] - box.t[0]) * s / samples;
        std::vector<double> x(static_cast<std::size_t>(model_->dim()));
        for (int i = 0; i < model_->dim(); ++i) {
            const auto& ax = box.x[static_cast<std::size_t>(i)];
            x[static_cast<std::size_t>(i)] = ax[0] + (ax[1] - ax[0]) * ((s * 7 + i * 3) % (samples + 1)) / samples;
        }
        double lo, hi;
        sym_eigen_range(model_->dim(), model_->a_matrix(t, x), lo, hi);
        lmax = std::max(lmax, hi);
    }
    lambda_max_ = lmax * 1.05;
}

std::function<double(const double*)> DtcmKernelOp::row(double t0, double t1,
                                                       const std::vector<double>& x) const {
    double tau = t1 - t0;
    if (!(tau > 0)) throw DomainError("DtcmKernelOp: t must exceed t0");
    const int n = model_->dim();
    if (zp_.kind == ZPolicy::Kind::Left) {
        // z = x for the whole row: fetch the expansion once
        ExpansionPtr exp = cache_.get(*model_, x, t0, m_, config_);
        std::vector<double> xv = x;
        return [exp, xv, tau, n](const double* y) {
            std::vector<double> yv(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) yv[static_cast<std::size_t>(i)] = y[i];
            return exp->eval(tau, xv, yv);
        };
    }
    std::vector<double> xv = x;
    const CoefficientModel* model = model_.get();
    ExpansionCache* cache = &cache_;
    ZPolicy zp = zp_;
    KernelConfig config = config_;
    int m = m_;
    return [model, cache, zp, config, m, xv, tau, t0, n](const double* y) {
        std::vector<double> yv(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) yv[static_cast<std::size_t>(i)] = y[i];
        std::vector<double> z = zp(xv, yv);
        ExpansionPtr exp = cache->get(*model, z, t0, m, config);
        return exp->eval(tau, xv, yv);
    };
}

std::function<double(const double*)> ClosedFormKernelOp::row(
    double t0, double t1, const std::vector<double>& x) const {
    std::vector<double> xv = x;
    Fn fn = fn_;
    int n = dim_;
    return [fn, xv, t0, t1, n](const double* y) {
        std::vector<double> yv(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) yv[static_cast<std::size_t>(i)] = y[i];
        return fn(t0, t1, xv, yv);
    };
}

GridFn apply_kernel(const KernelOp& kernel, const GridFn& u, double t0, double t1,
                    double trunc_c, int threads) {
    if (!(t1 > t0)) throw DomainError("apply_kernel: t must exceed t0");
    if (u.size() == 0) throw StructuralError("apply_kernel: empty grid");
    const int n = u.dim();
    if (kernel.dim() != n) throw StructuralError("apply_kernel: dimension mismatch");

    double radius = trunc_c * std::sqrt(kernel.lambda_max() * (t1 - t0));
    GridFn v = u;
    double cell = std::pow(u.h, n);

    std::vector<std::size_t> stride(static_cast<std::size_t>(n), 1);
    for (int axis = n - 2; axis >= 0; --axis)
        stride[static_cast<std::size_t>(axis)] =
            stride[static_cast<std::size_t>(axis + 1)] *
            static_cast<std::size_t>(u.shape[static_cast<std::size_t>(axis + 1)]);

    parallel_for(u.size(), threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> y(static_cast<std::size_t>(n));
        std::vector<int> jlo(static_cast<std::size_t>(n)), jhi(static_cast<std::size_t>(n)),
            j(static_cast<std::size_t>(n));
        for (std::size_t ti = lo; ti < hi; ++ti) {
            std::vector<double> x = u.point(ti);
            auto rowfn = kernel.row(t0, t1, x);
            bool empty = false;
            for (int axis = 0; axis < n; ++axis) {
                double o = u.origin[static_cast<std::size_t>(axis)];
                int a = static_cast<int>(std::ceil((x[static_cast<std::size_t>(axis)] - radius - o) / u.h - 1e-12));
                int b = static_cast<int>(std::floor((x[static_cast<std::size_t>(axis)] + radius - o) / u.h + 1e-12));
                a = std::max(a, 0);
                b = std::min(b, u.shape[static_cast<std::size_t>(axis)] - 1);
                if (a > b) empty = true;
                jlo[static_cast<std::size_t>(axis)] = a;
                jhi[static_cast<std::size_t>(axis)] = b;
            }
            if (empty) {
                v.values[ti] = 0.0;
                continue;
            }
            j = jlo;
            double sum = 0.0;
            while (true) {
                std::size_t flat = 0;
                double w = 1.0;
                for (int axis = 0; axis < n; ++axis) {
                    int idx = j[static_cast<std::size_t>(axis)];
                    flat += static_cast<std::size_t>(idx) * stride[static_cast<std::size_t>(axis)];
                    y[static_cast<std::size_t>(axis)] = u.coord(axis, idx);
                    if (idx == 0 || idx == u.shape[static_cast<std::size_t>(axis)] - 1) w *= 0.5;
                }
                sum += w * rowfn(y.data()) * u.values[flat];
                int axis = n - 1;
                for (; axis >= 0; --axis) {
                    if (j[static_cast<std::size_t>(axis)] < jhi[static_cast<std::size_t>(axis)]) {
                        ++j[static_cast<std::size_t>(axis)];
                        for (int later = axis + 1; later < n; ++later)
                            j[static_cast<std::size_t>(later)] = jlo[static_cast<std::size_t>(later)];
                        break;
                    }
                }
                if (axis < 0) break;
            }
            v.values[ti] = sum * cell;
        }
    });
    return v;
}

GridFn bootstrap(const CoefficientModel& model, int m, const ZPolicy& zp, const GridFn& u0,
                 double horizon, int steps, double trunc_c, int threads,
                 const KernelConfig& config) {
    if (steps < 1) throw StructuralError("bootstrap: steps must be >= 1");
    if (!(horizon > 0)) throw DomainError("bootstrap: horizon must be positive");
    DtcmKernelOp kernel(ModelPtr(ModelPtr{}, &model), m, zp, config);
    GridFn u = u0;
    double delta = horizon / steps;
    for (int k = 0; k < steps; ++k) {
        u = apply_kernel(kernel, u, k * delta, (k + 1) * delta, trunc_c, threads);
        if (!u.finite())
            throw NumericError("bootstrap: non-finite value after step " + std::to_string(k));
    }
    return u;
}

}  // namespace dtcm
