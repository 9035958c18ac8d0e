#include "dtcm/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "dtcm/errors.hpp"
#include "dtcm/threads.hpp"
#include "json.hpp"

namespace dtcm {

FitResult fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys,
                     double floor) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw StructuralError("fit_loglog: need at least two points");
    FitResult fit;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (ys[i] < 10.0 * floor) {
            fit.dropped.push_back(i);
            continue;
        }
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
    }
    if (lx.size() < 2) {
        fit.floor_limited = true;
        return fit;
    }
    double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy * sxx - sx * sxy) / denom;
    return fit;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string StudyReport::to_json() const {
    nlohmann::ordered_json j;
    j["study"] = study;
    j["model"] = model_id;
    j["m"] = m;
    j["z_policy"] = z_policy;
    j["expected_slope"] = expected_slope;
    nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const auto& p : points) {
        sweep.push_back(p.param);
        pts.push_back({{"param", p.param}, {"error", p.error}});
    }
    j["sweep"] = sweep;
    j["points"] = pts;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["floor_limited"] = fit.floor_limited;
    j["dropped"] = fit.dropped;
    j["seed"] = seed;
    j["threads"] = threads;
    if (runtime_sec) j["runtime_sec"] = *runtime_sec;
    else j["runtime_sec"] = nullptr;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    return j.dump(2) + "\n";
}

std::string StudyReport::to_csv() const {
    std::string out = "param,error\n";
    for (const auto& p : points) out += fmt17(p.param) + "," + fmt17(p.error) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// kernel-order study
// ---------------------------------------------------------------------------

namespace {

double round_pow2_down(double v) {
    return std::ldexp(1.0, static_cast<int>(std::floor(std::log2(v))));
}

struct KernelErrorRow {
    double e_phi;  // |integral (G^[m] - G^exact)(x, y) phi(y) dy|
    double e_l1;   // integral |G^[m] - G^exact|(x, y) dy
};

}  // namespace

StudyReport kernel_order_study(const ModelPtr& model, const std::string& oracle_id,
                               const std::map<std::string, double>& oracle_params, int m,
                               const ZPolicy& zp, const std::vector<int>& k_sweep,
                               const KernelOrderOptions& opts) {
    if (model->dim() != 1) throw StructuralError("kernel_order_study: 1D models only");
    if (!has_exact_kernel(oracle_id))
        throw StructuralError("kernel_order_study: no exact oracle for '" + oracle_id +
                              "' (available: const, drift, ou, bs_log)");

    const double w = opts.phi_width;
    auto phi = [w](double y) {
        return std::pow(M_PI * w * w, -0.25) * std::exp(-y * y / (2.0 * w * w));
    };

    double lambda_max = 0.0;
    for (int i = -8; i <= 8; ++i) {
        std::vector<double> x{opts.window_halfwidth * i / 8.0};
        lambda_max = std::max(lambda_max, model->a(0, 0, 0, {0}, 0.0, x));
    }

    StudyReport report;
    report.study = "kernel-order";
    report.model_id = model->id();
    report.m = m;
    report.z_policy = zp.to_string();
    report.expected_slope = 0.5 * (m + 1);
    report.config["oracle"] = oracle_id;
    report.config["phi_width"] = fmt17(w);
    report.config["window_halfwidth"] = fmt17(opts.window_halfwidth);
    report.config["x_count"] = std::to_string(opts.x_count);
    report.config["trunc_c"] = fmt17(opts.trunc_c);
    report.config["metric"] = "l1_row";

    std::vector<double> ts, e_l1s, e_phis;
    for (int k : k_sweep) {
        double t = std::ldexp(1.0, -k);
        // dyadic y-spacing keeps midpoint freeze points cheap exactly
        double hy = round_pow2_down(std::sqrt(model->gamma() * t) / 4.0);
        double radius = opts.trunc_c * std::sqrt(lambda_max * t) + 8.0 * t;
        long half = static_cast<long>(std::ceil(radius / hy));

        ExpansionCache cache;
        KernelConfig config;
        std::vector<KernelErrorRow> rows(static_cast<std::size_t>(opts.x_count));
        double hx = 2.0 * opts.window_halfwidth / (opts.x_count - 1);
        parallel_for(static_cast<std::size_t>(opts.x_count), opts.threads,
                     [&](std::size_t lo, std::size_t hi) {
                         for (std::size_t xi = lo; xi < hi; ++xi) {
                             double x = -opts.window_halfwidth + hx * static_cast<double>(xi);
                             double acc_phi = 0.0, acc_l1 = 0.0;
                             for (long j = -half; j <= half; ++j) {
                                 double y = x + hy * static_cast<double>(j);
                                 double approx = eval_kernel(*model, m, zp, 0.0, t, {x}, {y},
                                                             cache, config);
                                 double exact = exact_kernel(oracle_id, oracle_params, 0.0, t,
                                                             {x}, {y});
                                 double diff = approx - exact;
                                 acc_phi += diff * phi(y) * hy;
                                 acc_l1 += std::abs(diff) * hy;
                             }
                             rows[xi] = {std::abs(acc_phi), acc_l1};
                         }
                     });
        double e_phi = 0.0, e_l1 = 0.0;
        for (const auto& r : rows) {
            e_phi = std::max(e_phi, r.e_phi);
            e_l1 = std::max(e_l1, r.e_l1);
        }
        ts.push_back(t);
        e_l1s.push_back(e_l1);
        e_phis.push_back(e_phi);
        report.points.push_back({t, e_l1});
    }
    report.fit = fit_loglog(ts, e_l1s, opts.error_floor);
    FitResult phi_fit = fit_loglog(ts, e_phis, opts.error_floor);
    report.config["phi_slope"] = fmt17(phi_fit.slope);
    double e_phi_max = 0.0;
    for (double e : e_phis) e_phi_max = std::max(e_phi_max, e);
    report.config["phi_error_max"] = fmt17(e_phi_max);
    return report;
}

// ---------------------------------------------------------------------------
// bootstrap-order study
// ---------------------------------------------------------------------------

StudyReport bootstrap_order_study(const ModelPtr& model, const std::string& oracle_id,
                                  const std::map<std::string, double>& oracle_params, int m,
                                  const ZPolicy& zp, double horizon,
                                  const std::vector<int>& n_sweep,
                                  const BootstrapOrderOptions& opts) {
    if (model->dim() != 1) throw StructuralError("bootstrap_order_study: 1D models only");

    const double W = opts.domain_halfwidth;
    int count = static_cast<int>(std::round(2.0 * W / opts.h)) + 1;
    GridFn u0 = GridFn::sample({-W}, opts.h, {count}, [&](const std::vector<double>& x) {
        return std::exp(-x[0] * x[0] / (4.0 * opts.tau0)) /
               std::sqrt(4.0 * M_PI * opts.tau0);
    });

    // reference: exact kernel applied in one shot, else a fine CN solve
    GridFn ref = u0;
    int ref_stride = 1;
    if (has_exact_kernel(oracle_id)) {
        auto op = exact_kernel_op(oracle_id, oracle_params);
        ref = apply_kernel(*op, u0, 0.0, horizon, opts.trunc_c, opts.threads);
    } else {
        ref_stride = opts.cn_refine;
        double h_fine = opts.h / ref_stride;
        int count_fine = (count - 1) * ref_stride + 1;
        GridFn u0_fine =
            GridFn::sample({-W}, h_fine, {count_fine}, [&](const std::vector<double>& x) {
                return std::exp(-x[0] * x[0] / (4.0 * opts.tau0)) /
                       std::sqrt(4.0 * M_PI * opts.tau0);
            });
        int cn_steps = 4096;
        ref = cn_solve(*model, u0_fine, 0.0, horizon, cn_steps);
    }

    StudyReport report;
    report.study = "bootstrap-order";
    report.model_id = model->id();
    report.m = m;
    report.z_policy = zp.to_string();
    report.expected_slope = -0.5 * (m - 1);
    report.config["oracle"] = has_exact_kernel(oracle_id) ? oracle_id : "cn";
    report.config["horizon"] = fmt17(horizon);
    report.config["h"] = fmt17(opts.h);
    report.config["tau0"] = fmt17(opts.tau0);
    report.config["window_halfwidth"] = fmt17(opts.window_halfwidth);
    report.config["trunc_c"] = fmt17(opts.trunc_c);

    std::vector<double> ns, errs;
    for (int n : n_sweep) {
        GridFn u = bootstrap(*model, m, zp, u0, horizon, n, opts.trunc_c, opts.threads);
        double err = 0.0;
        for (int j = 0; j < count; ++j) {
            double x = u.coord(0, j);
            if (std::abs(x) > opts.window_halfwidth) continue;
            double reference = ref.values[static_cast<std::size_t>(j * ref_stride)];
            err = std::max(err, std::abs(u.values[static_cast<std::size_t>(j)] - reference));
        }
        ns.push_back(static_cast<double>(n));
        errs.push_back(err);
        report.points.push_back({static_cast<double>(n), err});
    }
    report.fit = fit_loglog(ns, errs, opts.error_floor);
    return report;
}

double bootstrap_operator_error(const ModelPtr& model, const std::string& oracle_id,
                                const std::map<std::string, double>& oracle_params, int m,
                                const ZPolicy& zp, double horizon, int n,
                                const BootstrapOrderOptions& opts) {
    if (model->dim() != 1) throw StructuralError("bootstrap_operator_error: 1D models only");
    if (!has_exact_kernel(oracle_id))
        throw StructuralError("bootstrap_operator_error: exact oracle required");

    const double lo = -opts.domain_halfwidth, h = opts.h;
    const int count = static_cast<int>(std::round(2.0 * opts.domain_halfwidth / h)) + 1;
    DtcmKernelOp kernel(model, m, zp);

    std::vector<int> window;
    for (int j = 0; j < count; ++j)
        if (std::abs(lo + j * h) <= opts.window_halfwidth) window.push_back(j);

    const double delta = horizon / n;
    const double radius = opts.trunc_c * std::sqrt(kernel.lambda_max() * delta);
    const int halfband = static_cast<int>(std::ceil(radius / h));
    const std::size_t w_rows = window.size(), grid_n = static_cast<std::size_t>(count);

    std::vector<double> rows(w_rows * grid_n, 0.0), next(w_rows * grid_n, 0.0);
    std::vector<std::vector<double>> band(grid_n);

    // accumulate e_x^T G(T, T-d) G(T-d, T-2d) ... G(d, 0) left to right
    for (int step = n - 1; step >= 0; --step) {
        double t0 = step * delta, t1 = (step + 1) * delta;
        for (int z = 0; z < count; ++z) {
            std::vector<double> xz{lo + z * h};
            auto rowfn = kernel.row(t0, t1, xz);
            int jlo = std::max(0, z - halfband), jhi = std::min(count - 1, z + halfband);
            std::vector<double> vals(static_cast<std::size_t>(jhi - jlo + 1));
            for (int j = jlo; j <= jhi; ++j) {
                double y = lo + j * h;
                vals[static_cast<std::size_t>(j - jlo)] = rowfn(&y);
            }
            band[static_cast<std::size_t>(z)] = std::move(vals);
        }
        if (step == n - 1) {
            for (std::size_t wi = 0; wi < w_rows; ++wi) {
                int z = window[wi];
                int jlo = std::max(0, z - halfband);
                const auto& b = band[static_cast<std::size_t>(z)];
                for (std::size_t k = 0; k < b.size(); ++k)
                    rows[wi * grid_n + static_cast<std::size_t>(jlo) + k] = b[k];
            }
            continue;
        }
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t wi = 0; wi < w_rows; ++wi) {
            for (int z = 0; z < count; ++z) {
                double rz = rows[wi * grid_n + static_cast<std::size_t>(z)];
                if (rz == 0.0) continue;
                rz *= (z == 0 || z == count - 1 ? 0.5 : 1.0) * h;
                int jlo = std::max(0, z - halfband);
                const auto& b = band[static_cast<std::size_t>(z)];
                double* dst = &next[wi * grid_n + static_cast<std::size_t>(jlo)];
                for (std::size_t k = 0; k < b.size(); ++k) dst[k] += rz * b[k];
            }
        }
        std::swap(rows, next);
    }

    double worst = 0.0;
    for (std::size_t wi = 0; wi < w_rows; ++wi) {
        double x = lo + window[wi] * h;
        double sum = 0.0;
        for (int j = 0; j < count; ++j) {
            double y = lo + j * h;
            double exact = exact_kernel(oracle_id, oracle_params, 0.0, horizon, {x}, {y});
            double wq = (j == 0 || j == count - 1) ? 0.5 : 1.0;
            sum += std::abs(rows[wi * grid_n + static_cast<std::size_t>(j)] - exact) * wq * h;
        }
        worst = std::max(worst, sum);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// projection study
// ---------------------------------------------------------------------------

StudyReport projection_study(const ModelPtr& model, int cutoff, double horizon,
                             const std::vector<int>& n_sweep,
                             const ProjectionStudyOptions& opts) {
    std::vector<double> x0(static_cast<std::size_t>(opts.grid));
    for (int j = 0; j < opts.grid; ++j) {
        double x = 2.0 * M_PI * j / opts.grid;
        // generic data carries energy near and above the cutoff so the
        // projection loss is exercised, not just roundoff
        x0[static_cast<std::size_t>(j)] =
            opts.band_limited
                ? std::sin(3.0 * x) + 0.5 * std::cos(7.0 * x)
                : std::exp(std::sin(x)) + 0.3 * std::cos(3.0 * x) +
                      0.2 * std::cos(28.0 * x) + 0.1 * std::sin(44.0 * x);
    }

    StudyReport report;
    report.study = "projection";
    report.model_id = model->id();
    report.m = 0;
    report.z_policy = "n/a";
    report.expected_slope = 0.0;
    report.config["cutoff"] = std::to_string(cutoff);
    report.config["horizon"] = fmt17(horizon);
    report.config["grid"] = std::to_string(opts.grid);
    report.config["init"] = opts.band_limited ? "bandlimited" : "generic";

    double c_min = 1e300, c_max = 0.0, err_max = 0.0;
    std::vector<double> ns, cs;
    for (int n : n_sweep) {
        ProjectionReport pr = projection_experiment(*model, x0, cutoff, horizon, n);
        ns.push_back(static_cast<double>(n));
        cs.push_back(pr.fitted_c);
        report.points.push_back({static_cast<double>(n), pr.fitted_c});
        c_min = std::min(c_min, pr.fitted_c);
        c_max = std::max(c_max, pr.fitted_c);
        err_max = std::max(err_max, pr.err);
    }
    bool all_positive = true;
    for (double c : cs) all_positive = all_positive && c > opts.error_floor;
    if (all_positive && cs.size() >= 2) report.fit = fit_loglog(ns, cs, opts.error_floor);
    else report.fit.floor_limited = true;
    report.config["c_min"] = fmt17(c_min);
    report.config["c_max"] = fmt17(c_max);
    report.config["c_ratio"] = fmt17(c_min > 0 ? c_max / c_min : 0.0);
    report.config["err_max"] = fmt17(err_max);
    return report;
}

}  // namespace dtcm
