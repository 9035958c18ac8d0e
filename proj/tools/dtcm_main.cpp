#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dtcm/errors.hpp"
#include "dtcm/oracle.hpp"
#include "dtcm/study.hpp"
#include "dtcm/threads.hpp"
#include "json.hpp"

namespace {

using namespace dtcm;

struct AxisSpec {
    double lo = 0.0, hi = 0.0;
    int count = 1;
};

std::vector<AxisSpec> parse_grid(const std::string& text) {
    std::vector<AxisSpec> axes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        AxisSpec axis;
        if (std::sscanf(item.c_str(), "%lf:%lf:%d", &axis.lo, &axis.hi, &axis.count) != 3)
            throw StructuralError("grid: expected lo:hi:count, got '" + item + "'");
        if (axis.count < 1 || axis.hi < axis.lo)
            throw StructuralError("grid: need count >= 1 and hi >= lo");
        axes.push_back(axis);
    }
    if (axes.empty()) throw StructuralError("grid: empty specification");
    return axes;
}

std::vector<double> axis_points(const AxisSpec& axis) {
    std::vector<double> pts;
    if (axis.count == 1) {
        pts.push_back(axis.lo);
        return pts;
    }
    double h = (axis.hi - axis.lo) / (axis.count - 1);
    for (int i = 0; i < axis.count; ++i) pts.push_back(axis.lo + h * i);
    return pts;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& kvs) {
    std::map<std::string, double> params;
    for (const auto& kv : kvs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw StructuralError("param: expected key=value, got '" + kv + "'");
        params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }
    return params;
}

struct LoadedModel {
    ModelPtr model;
    std::string builtin_id;  // empty for JSON models
    std::map<std::string, double> params;
};

LoadedModel load_model(const std::string& spec, const std::vector<std::string>& kvs) {
    LoadedModel lm;
    lm.params = parse_params(kvs);
    if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
        lm.model = from_spec_file(spec);
    } else {
        lm.builtin_id = spec;
        lm.model = builtin(spec, lm.params);
    }
    return lm;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StructuralError("cannot open output file " + path);
    out << content;
}

int run_kernel(const LoadedModel& lm, int m, double t, double t0, const std::string& grid,
               const std::string& zp_text, const std::string& out) {
    ZPolicy zp = ZPolicy::parse(zp_text);
    std::vector<AxisSpec> axes = parse_grid(grid);
    const int dim = lm.model->dim();
    if (axes.size() != static_cast<std::size_t>(dim))
        throw StructuralError("grid: expected one lo:hi:count per spatial axis");

    // Cartesian set of spatial points, used for both x and y
    std::vector<std::vector<double>> points{{}};
    for (const auto& axis : axes) {
        std::vector<std::vector<double>> grown;
        for (const auto& prefix : points)
            for (double v : axis_points(axis)) {
                auto p = prefix;
                p.push_back(v);
                grown.push_back(std::move(p));
            }
        points = std::move(grown);
    }

    std::string csv = "t";
    for (int i = 0; i < dim; ++i) csv += ",x" + std::to_string(i + 1);
    for (int i = 0; i < dim; ++i) csv += ",y" + std::to_string(i + 1);
    csv += ",G_m\n";

    ExpansionCache cache;
    KernelConfig config;
    for (const auto& x : points) {
        for (const auto& y : points) {
            double g = eval_kernel(*lm.model, m, zp, t0, t, x, y, cache, config);
            csv += fmt17(t);
            for (double v : x) csv += "," + fmt17(v);
            for (double v : y) csv += "," + fmt17(v);
            csv += "," + fmt17(g) + "\n";
        }
    }
    write_output(out, csv);
    return 0;
}

int run_solve(const LoadedModel& lm, int m, double horizon, int steps,
              const std::string& grid, const std::string& init, double trunc_c,
              const std::string& zp_text, int threads, const std::string& report,
              const std::vector<std::string>& norm_flags, const std::string& out) {
    if (lm.model->dim() != 1)
        throw StructuralError("solve: the bootstrap stepper is 1D");
    ZPolicy zp = ZPolicy::parse(zp_text);
    std::vector<AxisSpec> axes = parse_grid(grid);
    if (axes.size() != 1) throw StructuralError("solve: expected a single-axis grid");

    GridFn u0 = [&] {
        if (init.rfind("gaussian:", 0) == 0) {
            double tau0 = std::stod(init.substr(9));
            if (!(tau0 > 0)) throw StructuralError("init: gaussian width must be positive");
            double h = (axes[0].hi - axes[0].lo) / (axes[0].count - 1);
            return GridFn::sample({axes[0].lo}, h, {axes[0].count},
                                  [tau0](const std::vector<double>& x) {
                                      return std::exp(-x[0] * x[0] / (4.0 * tau0)) /
                                             std::sqrt(4.0 * M_PI * tau0);
                                  });
        }
        std::ifstream in(init);
        if (!in) throw StructuralError("init: cannot open " + init);
        std::stringstream ss;
        ss << in.rdbuf();
        return GridFn::from_csv(ss.str());
    }();

    GridFn u = bootstrap(*lm.model, m, zp, u0, horizon, steps, trunc_c, threads);
    std::string csv = u.to_csv();
    if (report == "norms") {
        std::vector<std::string> specs = norm_flags;
        if (specs.empty()) specs = {"p=2,a=0,r=0"};
        for (const auto& text : specs) {
            NormSpec spec = NormSpec::parse(text);
            csv += "# norm " + spec.to_string() + " = " + fmt17(grid_norm(u, spec)) + "\n";
        }
    }
    write_output(out, csv);
    return 0;
}

int run_study(const LoadedModel& lm, const std::string& study_id, int m, double horizon,
              const std::string& sweep_text, const std::string& zp_text, int cutoff,
              bool band_limited, bool timing, std::uint64_t seed, int threads,
              const std::string& out) {
    std::vector<int> sweep;
    {
        std::stringstream ss(sweep_text);
        std::string item;
        while (std::getline(ss, item, ',')) sweep.push_back(std::stoi(item));
        if (sweep.size() < 2) throw StructuralError("study: sweep needs at least two values");
    }
    auto start = std::chrono::steady_clock::now();

    std::string zp = zp_text.empty() ? (study_id == "bootstrap-order" ? "left" : "mid")
                                     : zp_text;

    StudyReport report;
    if (study_id == "kernel-order") {
        if (lm.builtin_id.empty() || !has_exact_kernel(lm.builtin_id))
            throw StructuralError(
                "study kernel-order: exact oracle required; valid model/oracle pairs: "
                "const, drift, ou, bs_log");
        KernelOrderOptions opts;
        opts.threads = threads;
        report = kernel_order_study(lm.model, lm.builtin_id, lm.params, m,
                                    ZPolicy::parse(zp), sweep, opts);
    } else if (study_id == "bootstrap-order") {
        BootstrapOrderOptions opts;
        opts.threads = threads;
        std::string oracle = lm.builtin_id;
        if (oracle.empty() || !has_exact_kernel(oracle)) {
            if (lm.model->dim() != 1)
                throw StructuralError("study bootstrap-order: 1D models only");
            oracle = "cn";
        }
        report = bootstrap_order_study(lm.model, oracle, lm.params, m, ZPolicy::parse(zp),
                                       horizon, sweep, opts);
    } else if (study_id == "projection") {
        ProjectionStudyOptions opts;
        opts.band_limited = band_limited;
        report = projection_study(lm.model, cutoff, horizon, sweep, opts);
    } else {
        throw StructuralError("study: unknown id '" + study_id +
                              "' (kernel-order | bootstrap-order | projection)");
    }
    report.seed = seed;
    report.threads = threads;
    if (timing) {
        auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
        report.runtime_sec = elapsed.count();
    }

    std::string json = report.to_json();
    if (out.empty()) {
        std::cout << json;
    } else {
        write_output(out, json);
        std::string csv_path = out;
        auto dot = csv_path.rfind('.');
        if (dot != std::string::npos) csv_path = csv_path.substr(0, dot);
        csv_path += ".csv";
        write_output(csv_path, report.to_csv());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dyson-Taylor commutator approximations of parabolic Green functions"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    int threads = dtcm::default_threads();
    std::uint64_t seed = 0;
    app.add_option("--threads", threads, "worker threads (env DTCM_THREADS)");
    app.add_option("--seed", seed, "seed echoed into reports and used by sampling");

    std::string model_spec, out, grid, init = "gaussian:0.1";
    std::vector<std::string> params, norm_flags;
    int m = 1, steps = 0, cutoff = 32;
    double t = 0.0, t0 = 0.0, horizon = 1.0, trunc_c = 8.0;
    std::string report_kind, study_id, sweep;
    bool band_limited = false, timing = false;

    // single-kernel evaluation defaults to the midpoint center; the bootstrap
    // stepper defaults to left, which needs one expansion per target row
    // instead of one per (x, y) pair
    std::string zp_kernel = "mid", zp_solve = "left", zp_study;
    auto add_model_flags = [&](CLI::App* cmd, std::string* zp_target) {
        cmd->add_option("--model", model_spec, "builtin id or model .json file")->required();
        cmd->add_option("--param", params, "builtin parameter key=value (repeatable)");
        cmd->add_option("--m", m, "expansion order");
        cmd->add_option("--z-policy", *zp_target, "left | mid | convex:<lambda>");
        cmd->add_option("--out", out, "output file (stdout when omitted)");
    };

    CLI::App* kernel = app.add_subcommand("kernel", "dump G^[m] over a grid as CSV");
    add_model_flags(kernel, &zp_kernel);
    kernel->add_option("--t", t, "evaluation time")->required();
    kernel->add_option("--t0", t0, "base time (default 0)");
    kernel->add_option("--grid", grid, "lo:hi:count per spatial axis")->required();

    CLI::App* solve = app.add_subcommand("solve", "solve the IVP with the bootstrap stepper");
    add_model_flags(solve, &zp_solve);
    solve->add_option("--T", horizon, "time horizon")->required();
    solve->add_option("--steps", steps, "bootstrap steps")
        ->required()
        ->check(CLI::PositiveNumber);
    solve->add_option("--grid", grid, "lo:hi:count")->required();
    solve->add_option("--init", init, "gaussian:<tau0> or a GridFn CSV file");
    solve->add_option("--trunc-c", trunc_c, "truncation radius multiplier");
    solve->add_option("--report", report_kind, "norms: append weighted-norm summary");
    solve->add_option("--norm", norm_flags, "norm spec p=...,a=...,r=... (repeatable)");

    CLI::App* study = app.add_subcommand("study", "convergence studies with slope fits");
    study->add_option("id", study_id, "kernel-order | bootstrap-order | projection")
        ->required();
    add_model_flags(study, &zp_study);  // empty: resolved per study id
    study->add_option("--sweep", sweep, "comma-separated sweep values")->required();
    study->add_option("--T", horizon, "horizon (bootstrap-order, projection)");
    study->add_option("--cutoff", cutoff, "Fourier mode cutoff (projection)");
    study->add_flag("--band-limited", band_limited, "band-limited initial data (projection)");
    study->add_flag("--timing", timing, "include wall time in the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        LoadedModel lm = load_model(model_spec, params);
        if (kernel->parsed()) return run_kernel(lm, m, t, t0, grid, zp_kernel, out);
        if (solve->parsed())
            return run_solve(lm, m, horizon, steps, grid, init, trunc_c, zp_solve, threads,
                             report_kind, norm_flags, out);
        return run_study(lm, study_id, m, horizon, sweep, zp_study, cutoff, band_limited,
                         timing, seed, threads, out);
    } catch (const std::exception& e) {
        nlohmann::ordered_json err;
        err["error"] = e.what();
        err["type"] = dynamic_cast<const dtcm::StructuralError*>(&e) ? "structural"
                     : dynamic_cast<const dtcm::DomainError*>(&e)    ? "domain"
                     : dynamic_cast<const dtcm::OrderError*>(&e)     ? "order"
                     : dynamic_cast<const dtcm::ResourceError*>(&e)  ? "resource"
                     : dynamic_cast<const dtcm::NumericError*>(&e)   ? "numeric"
                                                                     : "runtime";
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
