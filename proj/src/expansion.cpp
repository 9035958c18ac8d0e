#include "dtcm/expansion.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "dtcm/errors.hpp"

namespace dtcm {

int CompositionIndex::ell() const {
    return std::accumulate(parts.begin(), parts.end(), 0);
}

namespace {

void gen_compositions(int k_left, int remaining, std::vector<int>& prefix,
                      std::vector<CompositionIndex>& out) {
    if (k_left == 1) {
        prefix.push_back(remaining);
        out.push_back(CompositionIndex{static_cast<int>(prefix.size()), prefix});
        prefix.pop_back();
        return;
    }
    for (int v = 1; v <= remaining - (k_left - 1); ++v) {
        prefix.push_back(v);
        gen_compositions(k_left - 1, remaining - v, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

std::vector<CompositionIndex> enumerate_compositions(int k, int ell) {
    if (k < 1) throw StructuralError("enumerate_compositions: k must be >= 1");
    std::vector<CompositionIndex> out;
    if (ell < k) return out;
    std::vector<int> prefix;
    gen_compositions(k, ell, prefix, out);
    return out;
}

DiffOp p_operator(const TaylorFamily& fam, int m, int sigma_slot) {
    if (m < 1 || m > fam.n) throw OrderError("p_operator: index out of range");
    if (sigma_slot < 0 || sigma_slot >= fam.alpha->sigma_count())
        throw StructuralError("p_operator: sigma slot out of range");
    const AlphabetPtr& alpha = fam.alpha;
    MultiPoly sigma = MultiPoly::variable(alpha, alpha->sigma(sigma_slot));
    DiffOp lm = fam.l(m).substituted(alpha->time(), sigma);
    DiffOp pulled = exp_ad(fam.l(0), lm, alpha->theta());
    MultiPoly one_minus_sigma = MultiPoly::constant(alpha, Rational(1)) - sigma;
    return pulled.substituted(alpha->theta(), one_minus_sigma);
}

DiffOp simplex_integrate(const DiffOp& p, int k) {
    const AlphabetPtr& alpha = p.alphabet();
    if (k < 1 || k > alpha->sigma_count())
        throw StructuralError("simplex_integrate: level out of range");
    DiffOp out(alpha);
    for (const auto& [gamma, poly] : p.terms()) {
        for (const auto& [e, c] : poly.terms()) {
            if (e[static_cast<std::size_t>(alpha->time())] != 0 ||
                e[static_cast<std::size_t>(alpha->theta())] != 0)
                throw StructuralError("simplex_integrate: t or theta still present");
            for (int j = k; j < alpha->sigma_count(); ++j)
                if (e[static_cast<std::size_t>(alpha->sigma(j))] != 0)
                    throw StructuralError("simplex_integrate: sigma beyond level k present");
            // innermost first: each step turns s_j^E into s_{j-1}^{E+1}/(E+1)
            Rational factor(1);
            int carried = 0;
            for (int j = k - 1; j >= 0; --j) {
                int expo = e[static_cast<std::size_t>(alpha->sigma(j))] + carried;
                factor /= Rational(expo + 1);
                carried = expo + 1;
            }
            Expo rest = e;
            for (int j = 0; j < k; ++j) rest[static_cast<std::size_t>(alpha->sigma(j))] = 0;
            out.add_term(gamma, MultiPoly::monomial(alpha, rest, c * factor));
        }
    }
    return out;
}

DiffOp lambda_alpha(const TaylorFamily& fam, const CompositionIndex& alpha) {
    if (alpha.k < 1 || alpha.parts.size() != static_cast<std::size_t>(alpha.k))
        throw StructuralError("lambda_alpha: malformed composition");
    for (int part : alpha.parts)
        if (part < 1 || part > fam.n) throw OrderError("lambda_alpha: part out of range");
    DiffOp prod = p_operator(fam, alpha.parts[0], 0);
    for (int i = 1; i < alpha.k; ++i) prod = prod * p_operator(fam, alpha.parts[static_cast<std::size_t>(i)], i);
    return simplex_integrate(prod, alpha.k);
}

DiffOp lambda_ell(const TaylorFamily& fam, int ell, int cap_k) {
    if (ell < 0 || ell > fam.n) throw OrderError("lambda_ell: ell out of range");
    DiffOp sum(fam.alpha);
    for (int k = 1; k <= std::min(ell, cap_k); ++k)
        for (const auto& alpha : enumerate_compositions(k, ell))
            sum += lambda_alpha(fam, alpha);
    return sum;
}

std::vector<double> ZPolicy::operator()(const std::vector<double>& x,
                                        const std::vector<double>& y) const {
    if (x.size() != y.size()) throw StructuralError("ZPolicy: dimension mismatch");
    std::vector<double> z(x.size());
    double l = kind == Kind::Left ? 1.0 : kind == Kind::Midpoint ? 0.5 : lambda;
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = l * x[i] + (1.0 - l) * y[i];
    return z;
}

ZPolicy ZPolicy::parse(const std::string& text) {
    if (text == "left") return left();
    if (text == "mid" || text == "midpoint") return midpoint();
    if (text.rfind("convex:", 0) == 0) {
        double l = std::stod(text.substr(7));
        return convex(l);
    }
    throw StructuralError("z-policy: expected left|mid|convex:<lambda>, got '" + text + "'");
}

std::string ZPolicy::to_string() const {
    switch (kind) {
        case Kind::Left: return "left";
        case Kind::Midpoint: return "mid";
        case Kind::Convex: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "convex:%.17g", lambda);
            return buf;
        }
    }
    return "?";
}

KernelExpansion::KernelExpansion(int m, TaylorFamily fam)
    : m_(m), dim_(fam.dim), z_(fam.z), t_base_(fam.t_base), frz_(fam.frz) {}

void KernelExpansion::compile() {
    compiled_.clear();
    max_pow_ = 0;
    const int n = dim_;
    for (const auto& lvl : levels_) {
        std::vector<CompiledTerm> cl;
        for (const auto& term : lvl) {
            const AlphabetPtr& alpha = term.prefactor.alphabet();
            for (const auto& [e, c] : term.prefactor.terms()) {
                CompiledTerm ct;
                ct.coeff = c.to_double();
                ct.xi_pow.resize(static_cast<std::size_t>(n));
                ct.u_pow.resize(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i) {
                    ct.xi_pow[static_cast<std::size_t>(i)] = e[static_cast<std::size_t>(alpha->xi(i))];
                    ct.u_pow[static_cast<std::size_t>(i)] = e[static_cast<std::size_t>(alpha->u(i))];
                    max_pow_ = std::max({max_pow_, static_cast<int>(ct.xi_pow[static_cast<std::size_t>(i)]),
                                         static_cast<int>(ct.u_pow[static_cast<std::size_t>(i)])});
                }
                cl.push_back(std::move(ct));
            }
        }
        compiled_.push_back(std::move(cl));
    }
}

double KernelExpansion::eval_scaled(double tau, const std::vector<double>& xi,
                                    const std::vector<double>& u) const {
    const int n = dim_;
    // power tables xi^p, u^p up to the max exponent present
    const std::size_t cols = static_cast<std::size_t>(max_pow_ + 1);
    double pows[2 * 4 * 17];  // supports dim <= 4, powers <= 16
    std::vector<double> heap_pows;
    double* table = pows;
    if (static_cast<std::size_t>(2 * n) * cols > sizeof(pows) / sizeof(double)) {
        heap_pows.assign(static_cast<std::size_t>(2 * n) * cols, 0.0);
        table = heap_pows.data();
    }
    for (int i = 0; i < n; ++i) {
        double* xrow = table + static_cast<std::size_t>(2 * i) * cols;
        double* urow = table + static_cast<std::size_t>(2 * i + 1) * cols;
        xrow[0] = urow[0] = 1.0;
        for (std::size_t p = 1; p < cols; ++p) {
            xrow[p] = xrow[p - 1] * xi[static_cast<std::size_t>(i)];
            urow[p] = urow[p - 1] * u[static_cast<std::size_t>(i)];
        }
    }
    double total = 0.0;
    double root_tau = std::sqrt(tau);
    double tau_half_pow = 1.0;
    for (std::size_t ell = 0; ell < compiled_.size(); ++ell) {
        double lvl = 0.0;
        for (const auto& ct : compiled_[ell]) {
            double v = ct.coeff;
            for (int i = 0; i < n; ++i) {
                v *= table[static_cast<std::size_t>(2 * i) * cols + ct.xi_pow[static_cast<std::size_t>(i)]];
                v *= table[static_cast<std::size_t>(2 * i + 1) * cols + ct.u_pow[static_cast<std::size_t>(i)]];
            }
            lvl += v;
        }
        total += tau_half_pow * lvl;
        tau_half_pow *= root_tau;
    }
    return total;
}

double KernelExpansion::eval(double tau, const std::vector<double>& x,
                             const std::vector<double>& y) const {
    if (!(tau > 0)) throw DomainError("KernelExpansion: tau must be positive");
    const int n = dim_;
    std::vector<double> u(static_cast<std::size_t>(n)), xi(static_cast<std::size_t>(n));
    double root_tau = std::sqrt(tau);
    for (int i = 0; i < n; ++i) {
        u[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)];
        xi[static_cast<std::size_t>(i)] =
            (x[static_cast<std::size_t>(i)] - z_[static_cast<std::size_t>(i)]) / root_tau;
    }
    double g = gaussian_eval(*frz_, tau, u);
    for (int i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] /= root_tau;
    return g * eval_scaled(tau, xi, u);
}

KernelExpansion assemble(const CoefficientModel& model, const std::vector<double>& z,
                         double t_base, int m, const KernelConfig& config) {
    if (m < 0 || m > config.max_order)
        throw OrderError("assemble: order " + std::to_string(m) + " above configured cap " +
                         std::to_string(config.max_order));
    TaylorFamily fam = taylor_terms(model, z, t_base, m);
    KernelExpansion exp(m, fam);
    exp.levels_.clear();

    // identity level: the bare semigroup Lambda^0 = e^{L_0}
    exp.levels_.push_back(
        apply_diffop_to_gaussian(DiffOp::identity(fam.alpha), fam.frz));

    // memoized P_m per (m, slot) shared across all compositions
    std::map<std::pair<int, int>, DiffOp> p_cache;
    auto p_op = [&](int idx, int slot) -> const DiffOp& {
        auto key = std::make_pair(idx, slot);
        auto it = p_cache.find(key);
        if (it == p_cache.end()) it = p_cache.emplace(key, p_operator(fam, idx, slot)).first;
        return it->second;
    };

    for (int ell = 1; ell <= m; ++ell) {
        DiffOp sum(fam.alpha);
        for (int k = 1; k <= ell; ++k) {
            for (const auto& alpha : enumerate_compositions(k, ell)) {
                DiffOp prod = p_op(alpha.parts[0], 0);
                for (int i = 1; i < k; ++i)
                    prod = prod * p_op(alpha.parts[static_cast<std::size_t>(i)], i);
                sum += simplex_integrate(prod, k);
            }
        }
        exp.levels_.push_back(apply_diffop_to_gaussian(sum, fam.frz));
    }
    exp.compile();
    return exp;
}

namespace {

std::string bits_key(double v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
    return buf;
}

}  // namespace

ExpansionPtr ExpansionCache::get(const CoefficientModel& model, const std::vector<double>& z,
                                 double t_base, int m, const KernelConfig& config) {
    double key_t = model.time_dependent() ? t_base : 0.0;
    std::string key = model.id() + "|m" + std::to_string(m) + "|t" + bits_key(key_t) + "|z";
    for (double zi : z) key += bits_key(zi);

    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = entries_.find(key);
        if (it != entries_.end()) return it->second;
    }
    auto built = std::make_shared<const KernelExpansion>(assemble(model, z, t_base, m, config));
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = entries_.emplace(key, built);
    return it->second;
}

std::size_t ExpansionCache::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
}

double eval_kernel(const CoefficientModel& model, int m, const ZPolicy& zp, double t_prime,
                   double t, const std::vector<double>& x, const std::vector<double>& y,
                   ExpansionCache& cache, const KernelConfig& config) {
    double tau = t - t_prime;
    if (!(tau > 0)) throw DomainError("eval_kernel: t must exceed t0");
    if (tau < config.t_min)
        throw DomainError("eval_kernel: t - t0 below the underflow guard t_min");
    if (tau > config.t_max)
        throw DomainError("eval_kernel: t - t0 above the configured horizon");
    std::vector<double> z = zp(x, y);
    ExpansionPtr exp = cache.get(model, z, t_prime, m, config);
    return exp->eval(tau, x, y);
}

}  // namespace dtcm
