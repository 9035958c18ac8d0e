#pragma once

#include <vector>

#include "dtcm/diffop.hpp"
#include "dtcm/elliptic.hpp"
#include "dtcm/model.hpp"

namespace dtcm {

// Taylor terms L_0..L_n of the parabolically rescaled operator at the freeze
// point (t_base, z): L_0 is the frozen pure second-order part, and L_m
// collects the weight-m terms (weight = 2k + |beta| from t^k (x-z)^beta,
// shifted by 1 for b and by 2 for c).
struct TaylorFamily {
    int dim = 0;
    std::vector<double> z;
    double t_base = 0.0;
    int n = 0;
    AlphabetPtr alpha;
    std::vector<DiffOp> ops;  // L_0 .. L_n
    FreezePtr frz;

    const DiffOp& l(int m) const { return ops[static_cast<std::size_t>(m)]; }
};

TaylorFamily taylor_terms(const CoefficientModel& model, const std::vector<double>& z,
                          double t_base, int n);

}  // namespace dtcm
