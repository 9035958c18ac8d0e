#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dtcm/diffop.hpp"

namespace dtcm {

// Rectangular sampling box the model is declared (and checked) on.
struct ModelBox {
    std::array<double, 2> t{0.0, 1.0};
    std::vector<std::array<double, 2>> x;  // per axis

    static ModelBox standard(int dim, double half_width = 10.0);
};

// Provider of pointwise partial derivatives of the coefficients of
// L = sum a_ij d_i d_j + sum b_i d_i + c. Immutable and thread-safe.
class CoefficientModel {
public:
    virtual ~CoefficientModel() = default;

    int dim() const { return dim_; }
    double gamma() const { return gamma_; }
    const std::string& id() const { return id_; }
    bool time_dependent() const { return time_dependent_; }
    const ModelBox& box() const { return box_; }

    // d_t^k d_x^beta of the requested coefficient, evaluated at (t, x).
    virtual double a(int i, int j, int k, const DerivIndex& beta, double t,
                     const std::vector<double>& x) const = 0;
    virtual double b(int i, int k, const DerivIndex& beta, double t,
                     const std::vector<double>& x) const = 0;
    virtual double c(int k, const DerivIndex& beta, double t,
                     const std::vector<double>& x) const = 0;

    // [a_ij(t, x)] as a dense row-major matrix.
    std::vector<double> a_matrix(double t, const std::vector<double>& x) const;

protected:
    CoefficientModel(int dim, double gamma, std::string id, bool time_dependent,
                     ModelBox box)
        : dim_(dim), gamma_(gamma), id_(std::move(id)),
          time_dependent_(time_dependent), box_(std::move(box)) {}

    int dim_;
    double gamma_;
    std::string id_;
    bool time_dependent_;
    ModelBox box_;
};

using ModelPtr = std::shared_ptr<const CoefficientModel>;

// Built-in analytic models with exact derivatives:
//   const         a (scalar or a11..) , b1.., c constants; N via "N"
//   drift         constant a, b; c = 0
//   ou            a = D, b = -kappa x, c = 0 (1D)
//   sin_diffusion a = 1 + eps sin(omega x), |eps| < 1 (1D)
//   time_ramp     a = a0 (1 + delta t) (1D)
//   bs_log        a = sigma^2/2, b = r - sigma^2/2, c = -r (1D)
ModelPtr builtin(const std::string& id, const std::map<std::string, double>& params = {});

// JSON model loader, schema:
// {"N": int, "a": [[expr]], "b": [expr], "c": expr, "gamma": real,
//  "box": {"t": [lo,hi], "x": [[lo,hi],...]}}
// where expr is arithmetic over t, x1..xN, sin, cos, exp and literals.
ModelPtr from_spec(const std::string& json_text);
ModelPtr from_spec_file(const std::string& path);

// Black-box coefficients, derivatives by second-order central differences.
struct CoefficientValues {
    std::function<double(int i, int j, double t, const std::vector<double>&)> a;
    std::function<double(int i, double t, const std::vector<double>&)> b;       // may be null (0)
    std::function<double(double t, const std::vector<double>&)> c;              // may be null (0)
};
ModelPtr fd_adapter(int dim, CoefficientValues f, double h, double gamma,
                    ModelBox box = {});

// Seeded ellipticity sampling over the box; throws DomainError naming the
// violating sample point if lambda_min(a(t,x)) < gamma somewhere.
void check_ellipticity(const CoefficientModel& model, int samples = 10000,
                       std::uint64_t seed = 20109);

}  // namespace dtcm
