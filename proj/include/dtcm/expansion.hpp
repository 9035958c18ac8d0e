#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "dtcm/heatkernel.hpp"
#include "dtcm/taylor.hpp"

namespace dtcm {

// Member of the index set A_{k,l}: k parts, each >= 1, summing to l.
struct CompositionIndex {
    int k = 0;
    std::vector<int> parts;
    int ell() const;
};

// All compositions of ell into exactly k parts >= 1, lexicographic;
// empty when ell < k. Count is binom(ell-1, k-1).
std::vector<CompositionIndex> enumerate_compositions(int k, int ell);

// P_m(sigma_slot) = exp_ad with theta := 1 - sigma_slot of L_m(t := sigma_slot):
// the operator pulled through e^{(1-sigma)L_0}.
DiffOp p_operator(const TaylorFamily& fam, int m, int sigma_slot);

// Exact integration over the ordered region 1 >= s_1 >= ... >= s_k >= 0 by
// iterated antidifferentiation, innermost variable first.
DiffOp simplex_integrate(const DiffOp& p, int k);

// The operator part of Lambda_alpha = P_alpha e^{L_0}.
DiffOp lambda_alpha(const TaylorFamily& fam, const CompositionIndex& alpha);

// Lambda^ell = sum over k = 1..min(ell, cap_k) and alpha in A_{k,ell}.
// Identical for every cap_k >= ell; ell = 0 is the caller's bare semigroup.
DiffOp lambda_ell(const TaylorFamily& fam, int ell, int cap_k);

// Dilation-center policy z(x, y).
struct ZPolicy {
    enum class Kind { Left, Midpoint, Convex };
    Kind kind = Kind::Midpoint;
    double lambda = 0.5;  // Convex only: z = lambda x + (1 - lambda) y

    std::vector<double> operator()(const std::vector<double>& x,
                                   const std::vector<double>& y) const;

    static ZPolicy left() { return {Kind::Left, 1.0}; }
    static ZPolicy midpoint() { return {Kind::Midpoint, 0.5}; }
    static ZPolicy convex(double lambda) { return {Kind::Convex, lambda}; }
    static ZPolicy parse(const std::string& text);  // "left" | "mid" | "convex:l"
    std::string to_string() const;
};

struct KernelConfig {
    int max_order = 4;     // hard error above this
    double t_max = 16.0;   // configured horizon for a single kernel
    double t_min = 1e-12;  // underflow guard for the (t-t')^{(l-N)/2} prefactors
};

// The assembled order-m kernel: per power l, Gaussian-derivative terms plus a
// compiled numeric form for fast grid evaluation.
class KernelExpansion {
public:
    KernelExpansion(int m, TaylorFamily fam);

    int order() const { return m_; }
    int dim() const { return dim_; }
    const std::vector<double>& z() const { return z_; }
    double t_base() const { return t_base_; }
    const FreezePtr& freeze() const { return frz_; }
    const std::vector<GaussianDerivTerm>& level(int ell) const {
        return levels_[static_cast<std::size_t>(ell)];
    }
    bool level_empty(int ell) const { return level(ell).empty(); }

    // sum_l tau^{l/2} P_l(xi, u); multiply by the base Gaussian for the kernel.
    double eval_scaled(double tau, const std::vector<double>& xi,
                       const std::vector<double>& u) const;

    // Full kernel value at original coordinates; tau = t - t'.
    double eval(double tau, const std::vector<double>& x,
                const std::vector<double>& y) const;

private:
    int m_;
    int dim_;
    std::vector<double> z_;
    double t_base_;
    FreezePtr frz_;
    std::vector<std::vector<GaussianDerivTerm>> levels_;

    struct CompiledTerm {
        double coeff;
        std::vector<std::uint16_t> xi_pow, u_pow;
    };
    std::vector<std::vector<CompiledTerm>> compiled_;
    int max_pow_ = 0;

    void compile();
    friend KernelExpansion assemble(const CoefficientModel&, const std::vector<double>&,
                                    double, int, const KernelConfig&);
};

using ExpansionPtr = std::shared_ptr<const KernelExpansion>;

KernelExpansion assemble(const CoefficientModel& model, const std::vector<double>& z,
                         double t_base, int m, const KernelConfig& config = {});

// Cache keyed by (model id, m, t_base bits, z bits); t_base collapses to 0
// for time-independent models. Insertion is idempotent.
class ExpansionCache {
public:
    ExpansionPtr get(const CoefficientModel& model, const std::vector<double>& z,
                     double t_base, int m, const KernelConfig& config = {});

    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, ExpansionPtr> entries_;
};

// G^[m]_{t,t'}(x, y) with freeze point z = zp(x, y) and coefficients frozen
// at (t', z).
double eval_kernel(const CoefficientModel& model, int m, const ZPolicy& zp, double t_prime,
                   double t, const std::vector<double>& x, const std::vector<double>& y,
                   ExpansionCache& cache, const KernelConfig& config = {});

}  // namespace dtcm
