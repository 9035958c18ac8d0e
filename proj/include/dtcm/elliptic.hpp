#pragma once

#include <memory>
#include <vector>

#include "dtcm/rational.hpp"

namespace dtcm {

// Frozen diffusion matrix A = [a_ij(t', z)] with everything eval_kernel and
// the Hermite recursion need: numeric inverse/determinant from Cholesky and
// the exact rational inverse for the symbolic prefactors.
class EllipticFreeze {
public:
    // Throws DomainError if A is not symmetric positive definite.
    static std::shared_ptr<const EllipticFreeze> make(int dim,
                                                      const std::vector<double>& a);

    int dim() const { return dim_; }
    const std::vector<double>& a() const { return a_; }
    const std::vector<double>& inv_a() const { return inv_a_; }
    double det_a() const { return det_a_; }
    double lambda_min() const { return lambda_min_; }
    double lambda_max() const { return lambda_max_; }
    const Rational& inv_a_exact(int i, int j) const {
        return inv_a_exact_[static_cast<std::size_t>(i * dim_ + j)];
    }

private:
    EllipticFreeze() = default;
    int dim_ = 0;
    std::vector<double> a_;
    std::vector<double> inv_a_;
    double det_a_ = 0;
    double lambda_min_ = 0;
    double lambda_max_ = 0;
    std::vector<Rational> inv_a_exact_;
};

using FreezePtr = std::shared_ptr<const EllipticFreeze>;

// Smallest/largest eigenvalue of a symmetric matrix (cyclic Jacobi).
void sym_eigen_range(int dim, const std::vector<double>& a,
                     double& lambda_min, double& lambda_max);

}  // namespace dtcm
