#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dtcm/expansion.hpp"
#include "dtcm/model.hpp"

namespace dtcm {

// Uniform rectangular grid with row-major values (last axis fastest).
struct GridFn {
    std::vector<double> origin;
    double h = 0.0;
    std::vector<int> shape;
    std::vector<double> values;

    static GridFn make(std::vector<double> origin, double h, std::vector<int> shape,
                       double fill = 0.0);
    static GridFn sample(std::vector<double> origin, double h, std::vector<int> shape,
                         const std::function<double(const std::vector<double>&)>& fn);

    int dim() const { return static_cast<int>(shape.size()); }
    std::size_t size() const { return values.size(); }
    std::vector<double> point(std::size_t flat) const;
    double coord(int axis, int index) const {
        return origin[static_cast<std::size_t>(axis)] + h * index;
    }
    bool finite() const;

    std::string to_csv() const;                       // x1,...,xN,value
    static GridFn from_csv(const std::string& text);  // 1D only
};

struct NormSpec {
    int p = 2;                  // 2 or infinity (0 means infinity here)
    double a = 0.0;             // weight exponent of rho_a(x) = e^{a <x - w>}
    std::vector<double> w;      // weight center; empty = origin 0
    int r = 0;                  // Sobolev order 0 or 1 (p = 2 only)

    static NormSpec parse(const std::string& text);  // "p=2,a=0.5,r=0"
    std::string to_string() const;
};

double grid_norm(const GridFn& u, const NormSpec& spec);

// Integral kernel interface for quadrature application: row(x) returns a
// pointwise evaluator over source points y (thread-safe, pure).
class KernelOp {
public:
    virtual ~KernelOp() = default;
    virtual int dim() const = 0;
    virtual double lambda_max() const = 0;  // truncation-radius scale
    virtual std::function<double(const double* y)> row(double t0, double t1,
                                                       const std::vector<double>& x) const = 0;
};

// DTCM kernel as a KernelOp; expansions are cached per (z, t_base).
class DtcmKernelOp : public KernelOp {
public:
    DtcmKernelOp(ModelPtr model, int m, ZPolicy zp, KernelConfig config = {});

    int dim() const override { return model_->dim(); }
    double lambda_max() const override { return lambda_max_; }
    std::function<double(const double* y)> row(double t0, double t1,
                                               const std::vector<double>& x) const override;

    ExpansionCache& cache() const { return cache_; }

private:
    ModelPtr model_;
    int m_;
    ZPolicy zp_;
    KernelConfig config_;
    double lambda_max_;
    mutable ExpansionCache cache_;
};

// Closed-form kernel wrapper.
class ClosedFormKernelOp : public KernelOp {
public:
    using Fn = std::function<double(double t0, double t1, const std::vector<double>& x,
                                    const std::vector<double>& y)>;
    ClosedFormKernelOp(int dim, double lambda_max, Fn fn)
        : dim_(dim), lambda_max_(lambda_max), fn_(std::move(fn)) {}

    int dim() const override { return dim_; }
    double lambda_max() const override { return lambda_max_; }
    std::function<double(const double* y)> row(double t0, double t1,
                                               const std::vector<double>& x) const override;

private:
    int dim_;
    double lambda_max_;
    Fn fn_;
};

// v(x_i) = h^N sum_j w_j K(t0, t1, x_i, y_j) u(y_j), trapezoid weights at the
// grid boundary, summation truncated to |x - y|_axis <= trunc_c sqrt(lambda_max (t1-t0)).
GridFn apply_kernel(const KernelOp& kernel, const GridFn& u, double t0, double t1,
                    double trunc_c, int threads = 1);

// u_{k+1} = apply_kernel(G^[m]_{(k+1)d, kd}, u_k), d = T/n.
GridFn bootstrap(const CoefficientModel& model, int m, const ZPolicy& zp, const GridFn& u0,
                 double horizon, int steps, double trunc_c, int threads = 1,
                 const KernelConfig& config = {});

}  // namespace dtcm
