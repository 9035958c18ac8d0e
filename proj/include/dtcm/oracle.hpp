#pragma once

#include <map>
#include <memory>
#include <string>

#include "dtcm/grid.hpp"

namespace dtcm {

// Closed-form Green functions for the models that have one:
//   const   Gaussian with covariance 2 a tau, drift shift b tau, factor e^{c tau}
//   drift   same, c = 0
//   ou      Mehler kernel of D d^2 - kappa x d
//   bs_log  const kernel of a = sigma^2/2, b = r - sigma^2/2, c = -r
bool has_exact_kernel(const std::string& id);

double exact_kernel(const std::string& id, const std::map<std::string, double>& params,
                    double t0, double t1, const std::vector<double>& x,
                    const std::vector<double>& y);

std::unique_ptr<KernelOp> exact_kernel_op(const std::string& id,
                                          const std::map<std::string, double>& params);

// theta = 1/2 Crank-Nicolson for u_t = a u'' + b u' + c u on a 1D grid with
// homogeneous Dirichlet ends; second order in h and dt.
GridFn cn_solve(const CoefficientModel& model, const GridFn& u0, double t0, double horizon,
                int steps);

}  // namespace dtcm
