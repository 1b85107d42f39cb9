#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nestfn/model.hpp"
#include "nestfn/panel.hpp"

namespace nestfn {

/// Signed interval plus a minimum magnitude; the feasible set is
/// [lo, hi] \ (-min_abs, min_abs). With the defaults this is the union
/// [-1, -1e-3] U [1e-3, 1].
struct CurvatureBounds {
    double lo = -1.0;
    double hi = 1.0;
    double min_abs = kMinAbsCurvature;
};

struct ParamBounds {
    Interval A{1e-6, 1e6};
    Interval sigma{0.0, 2.0};
    Interval delta{0.0, 2.0};
    CurvatureBounds p;
    CurvatureBounds q;
};

struct FitConfig {
    int n_starts = 16;
    std::uint64_t seed = 0;
    int max_iters_per_start = 2000;
    double objective_tol = 1e-12;
    double param_tol = 1e-10;
    ParamBounds bounds;
    std::vector<Parameters> user_starts;  // run before the Latin-hypercube starts
};

void validate_fit_config(const FitConfig& cfg);

// Nearest feasible point of the bounds box (curvature coordinates snap out of
// the excluded (-min_abs, min_abs) band toward the closer allowed side).
Parameters clip_to_bounds(const Parameters& params, const ParamBounds& bounds);

bool within_bounds(const Parameters& params, const ParamBounds& bounds);

/// V_observed - V_predicted, aligned with panel order.
struct ResidualVector {
    std::vector<double> values;
    double rss() const;
};

struct FitStatistics {
    double rss = 0.0;
    double r_squared = 0.0;
    bool r_squared_defined = false;  // false when TSS = 0
    double std_error = 0.0;
    bool std_error_defined = false;  // requires n_obs > 5
    double substitution_elasticity = 0.0;
    bool substitution_elasticity_defined = false;
};

struct StartOutcome {
    int index = 0;
    double rss = 0.0;
    bool converged = false;
    int iterations = 0;
    bool failed = false;  // no feasible point ever evaluated
};

struct FitResult {
    Parameters params;
    double rss = 0.0;
    double r_squared = 0.0;
    bool r_squared_defined = false;
    double std_error = 0.0;
    bool std_error_defined = false;
    double substitution_elasticity = 0.0;
    bool substitution_elasticity_defined = false;
    bool converged = false;
    int n_iterations = 0;
    int best_start_index = 0;
    long long n_obs = 0;
    std::vector<StartOutcome> starts;  // audit trail, one entry per start
};

// Rowwise model evaluation in panel order. NonPositiveBracket carries the
// offending row index.
std::vector<double> predict(const Parameters& params, const Panel& panel);

ResidualVector residuals(const Parameters& params, const Panel& panel);

// Goodness-of-fit statistics for ANY parameters, not only fitted ones.
// substitution_elasticity is evaluated at the panel's (median K, median L).
FitStatistics fit_statistics(const Parameters& params, const Panel& panel);

// Multistart bounded nonlinear least squares: user starts first, then
// Latin-hypercube starts over the bounds (log A, raw sigma/delta, curvature
// union mapped by arc length), each minimized by Nelder-Mead with box
// constraints enforced by clipping inside the objective. Infeasible points
// (any NonPositiveBracket row) score +inf. Best local minimum wins with
// tie-break on (rss, start index).
FitResult fit(const Panel& panel, const FitConfig& cfg);

double median(std::vector<double> values);

}  // namespace nestfn
