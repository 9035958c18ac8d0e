#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtcm/grid.hpp"
#include "dtcm/oracle.hpp"
#include "dtcm/projection.hpp"

namespace dtcm {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    bool floor_limited = false;
    std::vector<std::size_t> dropped;  // indices excluded by floor detection
};

// OLS on (log x, log y); points with y < 10 * floor are dropped first and the
// fit is flagged floor-limited when fewer than two points survive.
FitResult fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys,
                     double floor);

struct StudyPoint {
    double param = 0.0;
    double error = 0.0;
};

struct StudyReport {
    std::string study;
    std::string model_id;
    int m = 0;
    std::string z_policy;
    double expected_slope = 0.0;
    std::vector<StudyPoint> points;
    FitResult fit;
    std::uint64_t seed = 0;
    int threads = 1;
    std::optional<double> runtime_sec;  // filled only on request, so default
                                        // reports stay byte-reproducible
    std::map<std::string, std::string> config;

    std::string to_json() const;  // schema: schemas/study_report.json
    std::string to_csv() const;   // param,error rows
};

struct KernelOrderOptions {
    double window_halfwidth = 0.5;  // sup over |x| <= this
    int x_count = 65;
    double phi_width = 0.35;        // unit-L2 Gaussian bump width
    double trunc_c = 8.0;
    double error_floor = 1e-13;
    int threads = 1;
};

// E(t) = sup_x |integral (G^[m] - G^exact)(x, y) phi(y) dy| over t = 2^-k;
// expected log-log slope (m+1)/2.
StudyReport kernel_order_study(const ModelPtr& model, const std::string& oracle_id,
                               const std::map<std::string, double>& oracle_params, int m,
                               const ZPolicy& zp, const std::vector<int>& k_sweep,
                               const KernelOrderOptions& opts = {});

struct BootstrapOrderOptions {
    double domain_halfwidth = 8.0;
    double h = 1.0 / 64.0;
    double tau0 = 0.1;              // width of the Gaussian initial datum
    double window_halfwidth = 2.0;  // interior sup window
    double trunc_c = 8.0;
    // quadrature/truncation floor of the defaults; points below 10x this are
    // dropped from the fit and the report is flagged floor-limited when
    // fewer than two survive (exact-semigroup models land here)
    double error_floor = 1e-8;
    int threads = 1;
    int cn_refine = 16;             // space refinement of the CN reference
};

// Error of the n-step bootstrap against the oracle-propagated initial datum,
// swept over n; expected log-log slope -(m-1)/2.
StudyReport bootstrap_order_study(const ModelPtr& model, const std::string& oracle_id,
                                  const std::map<std::string, double>& oracle_params, int m,
                                  const ZPolicy& zp, double horizon,
                                  const std::vector<int>& n_sweep,
                                  const BootstrapOrderOptions& opts = {});

// Discrete L^inf operator norm of U - prod G^[m] on the window: the window
// rows of the n-step kernel product are composed exactly (banded matrices
// with the same trapezoid weights as apply_kernel) and compared against the
// exact kernel rows, max_x integral |diff|(x, y) dy.
double bootstrap_operator_error(const ModelPtr& model, const std::string& oracle_id,
                                const std::map<std::string, double>& oracle_params, int m,
                                const ZPolicy& zp, double horizon, int n,
                                const BootstrapOrderOptions& opts = {});

struct ProjectionStudyOptions {
    int grid = 512;         // power of two
    bool band_limited = false;
    double error_floor = 0.0;
};

// Fitted constant of the projected-evolution bound per n; the report's
// "error" column carries C_n and the fit is over C_n vs n.
StudyReport projection_study(const ModelPtr& model, int cutoff, double horizon,
                             const std::vector<int>& n_sweep,
                             const ProjectionStudyOptions& opts = {});

}  // namespace dtcm
