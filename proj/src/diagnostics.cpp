#include "nestfn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nestfn/rng.hpp"

namespace nestfn {

void validate_scan_config(const ScanConfig& cfg) {
    auto check_interval = [](const Interval& r, const char* name) {
        if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo <= 0.0 || r.hi < r.lo)
            throw InvalidParameter(std::string(name) +
                                   " must be a positive interval with lo <= hi");
    };
    check_interval(cfg.k_range, "k_range");
    check_interval(cfg.l_range, "l_range");
    if (cfg.grid < 2) throw InvalidParameter("grid must be >= 2 points per axis");
    if (cfg.samples < 1) throw InvalidParameter("samples must be >= 1");
    const long long grid_points = static_cast<long long>(cfg.grid) * cfg.grid;
    if (grid_points + cfg.samples > cfg.max_budget)
        throw ScanBudgetExceeded("grid*grid + samples = " +
                                 std::to_string(grid_points + cfg.samples) +
                                 " exceeds max_budget = " + std::to_string(cfg.max_budget));
}

std::vector<InputPoint> scan_grid(const ScanConfig& cfg) {
    validate_scan_config(cfg);
    auto axis = [&](const Interval& r) {
        std::vector<double> pts(static_cast<std::size_t>(cfg.grid));
        for (int i = 0; i < cfg.grid; ++i) {
            const double t = static_cast<double>(i) / (cfg.grid - 1);
            pts[static_cast<std::size_t>(i)] =
                cfg.log_spacing ? std::exp(std::log(r.lo) + t * (std::log(r.hi) - std::log(r.lo)))
                                : r.lo + t * (r.hi - r.lo);
        }
        return pts;
    };
    const std::vector<double> ks = axis(cfg.k_range);
    const std::vector<double> ls = axis(cfg.l_range);
    std::vector<InputPoint> grid;
    grid.reserve(ks.size() * ls.size());
    for (double K : ks)
        for (double L : ls) grid.push_back(InputPoint{K, L});
    return grid;
}

double homogeneity_degree(const Parameters& params, const InputPoint& x) {
    constexpr double eps = 1e-4;  // step in ln lambda
    const double up = std::exp(eps);
    const double down = std::exp(-eps);
    const double v_up = eval_v(params, InputPoint{x.K * up, x.L * up}).v;
    const double v_down = eval_v(params, InputPoint{x.K * down, x.L * down}).v;
    return (std::log(v_up) - std::log(v_down)) / (2.0 * eps);
}

HomogeneitySection homogeneity_scan(const Parameters& params, const ScanConfig& cfg) {
    const auto grid = scan_grid(cfg);
    HomogeneitySection section;
    section.degree_min = std::numeric_limits<double>::infinity();
    section.degree_max = -std::numeric_limits<double>::infinity();
    for (const InputPoint& x : grid) {
        const double d = homogeneity_degree(params, x);
        section.degree_min = std::min(section.degree_min, d);
        section.degree_max = std::max(section.degree_max, d);
    }
    const double spread = section.degree_max - section.degree_min;
    const double degree = 0.5 * (section.degree_min + section.degree_max);
    section.is_homogeneous = spread <= 1e-6;
    section.claimed_degree_one = section.is_homogeneous && std::fabs(degree - 1.0) <= 1e-6;
    return section;
}

PositivitySection positivity_scan(const Parameters& params, const ScanConfig& cfg) {
    validate_scan_config(cfg);
    validate_parameters(params);
    const CounterRng rng(cfg.seed);
    PositivitySection section;
    for (long long i = 0; i < cfg.samples; ++i) {
        const std::uint64_t c = static_cast<std::uint64_t>(2 * i);
        const double K = cfg.log_spacing ? rng.log_uniform(c, cfg.k_range.lo, cfg.k_range.hi)
                                         : rng.uniform(c, cfg.k_range.lo, cfg.k_range.hi);
        const double L = cfg.log_spacing ? rng.log_uniform(c + 1, cfg.l_range.lo, cfg.l_range.hi)
                                         : rng.uniform(c + 1, cfg.l_range.lo, cfg.l_range.hi);
        ++section.checked;
        bool violated = false;
        try {
            violated = !(eval_v(params, InputPoint{K, L}).v > 0.0);
        } catch (const NonPositiveBracket&) {
            violated = true;
        } catch (const NumericalBreakdown&) {
            violated = true;
        }
        if (violated && ++section.violations == 1) section.first_violation = InputPoint{K, L};
    }
    return section;
}

ConcavitySection concavity_scan(const Parameters& params, const ScanConfig& cfg) {
    const auto grid = scan_grid(cfg);
    validate_parameters(params);
    ConcavitySection section;
    section.max_eig_over_region = -std::numeric_limits<double>::infinity();
    for (const InputPoint& x : grid) {
        Hessian2 H;
        try {
            H = hessian(params, x);
        } catch (const NumericalBreakdown&) {
            ++section.breakdown_count;
            continue;
        } catch (const NonPositiveBracket&) {
            ++section.breakdown_count;
            continue;
        }
        ++section.points_checked;
        const double nd_tol = 1e-9 * std::max({1.0, std::fabs(H.eig1), std::fabs(H.eig2)});
        if (H.eig1 <= nd_tol) ++section.negative_semidefinite_count;
        section.max_eig_over_region = std::max(section.max_eig_over_region, H.eig1);
    }

    // Audit channel: quoted closed-form eigenvalues at the unit point. After
    // simplification the quoted expressions lose all delta dependence.
    const double lam1 = -params.A * (params.p / params.q) * params.sigma * params.q;
    section.closed_form_eig1_at_unit = lam1;
    section.closed_form_eig2_at_unit = lam1 * (1.0 - params.q);
    try {
        const Hessian2 H1 = hessian(params, InputPoint{1.0, 1.0});
        section.measured_eig1_at_unit = H1.eig1;
        section.measured_eig2_at_unit = H1.eig2;
    } catch (const Error&) {
        section.measured_eig1_at_unit = std::numeric_limits<double>::quiet_NaN();
        section.measured_eig2_at_unit = std::numeric_limits<double>::quiet_NaN();
    }
    return section;
}

MonotonicitySection monotonicity_scan(const Parameters& params, const ScanConfig& cfg) {
    const auto grid = scan_grid(cfg);
    validate_parameters(params);
    MonotonicitySection section;
    long long k_positive = 0;
    long long l_positive = 0;
    for (const InputPoint& x : grid) {
        Gradient g;
        try {
            g = gradient(params, x);
        } catch (const NonPositiveBracket&) {
            ++section.points_failed;
            continue;
        } catch (const NumericalBreakdown&) {
            ++section.points_failed;
            continue;
        }
        ++section.points_checked;
        if (g.dV_dK > 0.0) ++k_positive;
        if (g.dV_dL > 0.0) ++l_positive;
    }
    if (section.points_checked > 0) {
        section.share_dVdK_positive =
            static_cast<double>(k_positive) / static_cast<double>(section.points_checked);
        section.share_dVdL_positive =
            static_cast<double>(l_positive) / static_cast<double>(section.points_checked);
    }
    return section;
}

DiagnosticsReport run_all(const Parameters& params, const ScanConfig& cfg) {
    DiagnosticsReport report;
    report.positivity = positivity_scan(params, cfg);
    report.homogeneity = homogeneity_scan(params, cfg);
    report.concavity = concavity_scan(params, cfg);
    report.monotonicity = monotonicity_scan(params, cfg);

    double max_err = 0.0;
    for (const InputPoint& x : scan_grid(cfg)) {
        try {
            const double analytic = elasticity_k(params, x) + elasticity_l(params, x);
            const double measured = homogeneity_degree(params, x);
            max_err = std::max(max_err, std::fabs(analytic - measured));
        } catch (const NonPositiveBracket&) {
            // skipped points are already counted by the component scans
        } catch (const NumericalBreakdown&) {
        }
    }
    report.euler_identity_max_abs_err = max_err;
    return report;
}

}  // namespace nestfn
