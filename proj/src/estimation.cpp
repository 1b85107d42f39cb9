#include "nestfn/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nestfn/rng.hpp"
#include "nestfn/simplex.hpp"

namespace nestfn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

// Feasible segments of a curvature coordinate.
struct Segments {
    bool has_neg = false, has_pos = false;
    double neg_lo = 0, neg_hi = 0;  // [lo, min(hi, -min_abs)]
    double pos_lo = 0, pos_hi = 0;  // [max(lo, min_abs), hi]
};

Segments segments_of(const CurvatureBounds& b) {
    Segments s;
    if (b.lo <= -b.min_abs) {
        s.has_neg = true;
        s.neg_lo = b.lo;
        s.neg_hi = std::min(b.hi, -b.min_abs);
    }
    if (b.hi >= b.min_abs) {
        s.has_pos = true;
        s.pos_lo = std::max(b.lo, b.min_abs);
        s.pos_hi = b.hi;
    }
    return s;
}

double clip_curvature(double v, const CurvatureBounds& b) {
    const Segments s = segments_of(b);
    if (!s.has_neg && !s.has_pos)
        throw InvalidParameter("curvature bounds exclude every admissible value");
    auto dist = [v](double lo, double hi) {
        const double c = clamp(v, lo, hi);
        return std::pair<double, double>(std::fabs(v - c), c);
    };
    if (!s.has_neg) return dist(s.pos_lo, s.pos_hi).second;
    if (!s.has_pos) return dist(s.neg_lo, s.neg_hi).second;
    const auto dn = dist(s.neg_lo, s.neg_hi);
    const auto dp = dist(s.pos_lo, s.pos_hi);
    // Exact midpoint resolves to the positive side.
    return dn.first < dp.first ? dn.second : dp.second;
}

// Arc-length map of u in [0,1) onto the feasible union, negative segment first.
double curvature_from_unit(double u, const CurvatureBounds& b) {
    const Segments s = segments_of(b);
    const double len_neg = s.has_neg ? s.neg_hi - s.neg_lo : 0.0;
    const double len_pos = s.has_pos ? s.pos_hi - s.pos_lo : 0.0;
    const double total = len_neg + len_pos;
    if (total <= 0.0) {
        if (s.has_neg) return s.neg_lo;
        if (s.has_pos) return s.pos_lo;
        throw InvalidParameter("curvature bounds exclude every admissible value");
    }
    const double t = u * total;
    if (s.has_neg && t < len_neg) return s.neg_lo + t;
    return s.pos_lo + (t - len_neg);
}

void validate_bounds(const ParamBounds& b) {
    if (!(b.A.lo > 0.0) || !(b.A.hi >= b.A.lo))
        throw InvalidParameter("A bounds must be a positive interval");
    if (b.sigma.lo < 0.0 || b.sigma.hi > 2.0 || b.sigma.hi < b.sigma.lo)
        throw InvalidParameter("sigma bounds must lie within [0, 2]");
    if (b.delta.lo < 0.0 || b.delta.hi > 2.0 || b.delta.hi < b.delta.lo)
        throw InvalidParameter("delta bounds must lie within [0, 2]");
    for (const CurvatureBounds* c : {&b.p, &b.q}) {
        if (!(c->min_abs >= kMinAbsCurvature))
            throw InvalidParameter("curvature min_abs must be >= 1e-3");
        const Segments s = segments_of(*c);
        if (!s.has_neg && !s.has_pos)
            throw InvalidParameter("curvature bounds exclude every admissible value");
    }
}

}  // namespace

void validate_fit_config(const FitConfig& cfg) {
    if (cfg.n_starts + static_cast<int>(cfg.user_starts.size()) < 1)
        throw InvalidParameter("n_starts plus user starts must be >= 1");
    if (cfg.n_starts < 0) throw InvalidParameter("n_starts must be >= 0");
    if (cfg.max_iters_per_start < 1) throw InvalidParameter("max_iters_per_start must be >= 1");
    if (!(cfg.objective_tol > 0.0) || !(cfg.param_tol > 0.0))
        throw InvalidParameter("tolerances must be > 0");
    validate_bounds(cfg.bounds);
    for (const Parameters& s : cfg.user_starts) validate_parameters(s);
}

Parameters clip_to_bounds(const Parameters& params, const ParamBounds& bounds) {
    Parameters out;
    out.A = clamp(params.A, bounds.A.lo, bounds.A.hi);
    out.sigma = clamp(params.sigma, bounds.sigma.lo, bounds.sigma.hi);
    out.delta = clamp(params.delta, bounds.delta.lo, bounds.delta.hi);
    out.p = clip_curvature(params.p, bounds.p);
    out.q = clip_curvature(params.q, bounds.q);
    return out;
}

bool within_bounds(const Parameters& params, const ParamBounds& bounds) {
    auto in_curv = [](double v, const CurvatureBounds& b) {
        return v >= b.lo && v <= b.hi && std::fabs(v) >= b.min_abs;
    };
    return params.A >= bounds.A.lo && params.A <= bounds.A.hi &&
           params.sigma >= bounds.sigma.lo && params.sigma <= bounds.sigma.hi &&
           params.delta >= bounds.delta.lo && params.delta <= bounds.delta.hi &&
           in_curv(params.p, bounds.p) && in_curv(params.q, bounds.q);
}

double ResidualVector::rss() const {
    double sum = 0.0;
    for (double r : values) sum += r * r;
    return sum;
}

std::vector<double> predict(const Parameters& params, const Panel& panel) {
    validate_parameters(params);
    std::vector<double> out;
    out.reserve(panel.size());
    for (std::size_t i = 0; i < panel.observations.size(); ++i) {
        const Observation& obs = panel.observations[i];
        try {
            out.push_back(eval_v(params, InputPoint{obs.K, obs.L}).v);
        } catch (const NonPositiveBracket& e) {
            throw NonPositiveBracket(std::string(e.what()) + " (panel row " + std::to_string(i) +
                                         ")",
                                     e.bracket, static_cast<long long>(i));
        }
    }
    return out;
}

ResidualVector residuals(const Parameters& params, const Panel& panel) {
    const std::vector<double> pred = predict(params, panel);
    ResidualVector r;
    r.values.resize(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i)
        r.values[i] = panel.observations[i].V - pred[i];
    return r;
}

double median(std::vector<double> values) {
    if (values.empty()) throw InvalidParameter("median of an empty sequence");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

FitStatistics fit_statistics(const Parameters& params, const Panel& panel) {
    if (panel.empty()) throw TooFewObservations("fit statistics require at least one observation");
    const ResidualVector res = residuals(params, panel);
    const std::size_t n = res.values.size();

    FitStatistics stats;
    stats.rss = res.rss();

    // Two-pass total sum of squares.
    double mean = 0.0;
    for (const Observation& obs : panel.observations) mean += obs.V;
    mean /= static_cast<double>(n);
    double tss = 0.0;
    for (const Observation& obs : panel.observations) tss += (obs.V - mean) * (obs.V - mean);

    if (tss > 0.0) {
        stats.r_squared = 1.0 - stats.rss / tss;
        stats.r_squared_defined = true;
    } else {
        stats.r_squared = std::numeric_limits<double>::quiet_NaN();
        stats.r_squared_defined = false;
    }

    if (n > 5) {
        stats.std_error = std::sqrt(stats.rss / static_cast<double>(n - 5));
        stats.std_error_defined = true;
    } else {
        stats.std_error = std::numeric_limits<double>::quiet_NaN();
        stats.std_error_defined = false;
    }

    std::vector<double> ks, ls;
    ks.reserve(n);
    ls.reserve(n);
    for (const Observation& obs : panel.observations) {
        ks.push_back(obs.K);
        ls.push_back(obs.L);
    }
    try {
        const SubstitutionElasticity se =
            substitution_elasticity(params, InputPoint{median(ks), median(ls)});
        stats.substitution_elasticity = se.value;
        stats.substitution_elasticity_defined =
            !se.degenerate_direction && std::isfinite(se.value);
    } catch (const Error&) {
        stats.substitution_elasticity = std::numeric_limits<double>::quiet_NaN();
        stats.substitution_elasticity_defined = false;
    }
    return stats;
}

namespace {

// Internal optimizer coordinates: [ln A, sigma, delta, p, q].
std::vector<double> to_internal(const Parameters& params) {
    return {std::log(params.A), params.sigma, params.delta, params.p, params.q};
}

Parameters from_internal(std::span<const double> z, const ParamBounds& bounds) {
    Parameters raw;
    raw.A = std::exp(clamp(z[0], -745.0, 709.0));  // keep exp finite
    raw.sigma = z[1];
    raw.delta = z[2];
    raw.p = z[3];
    raw.q = z[4];
    return clip_to_bounds(raw, bounds);
}

double objective_rss(const Parameters& params, const Panel& panel) {
    double sum = 0.0;
    for (const Observation& obs : panel.observations) {
        double v;
        try {
            v = eval_v(params, InputPoint{obs.K, obs.L}).v;
        } catch (const NonPositiveBracket&) {
            return kInf;
        } catch (const NumericalBreakdown&) {
            return kInf;
        }
        const double r = obs.V - v;
        sum += r * r;
    }
    return std::isfinite(sum) ? sum : kInf;
}

}  // namespace

FitResult fit(const Panel& panel, const FitConfig& cfg) {
    validate_fit_config(cfg);
    if (panel.size() < 6)
        throw TooFewObservations("fit requires at least 6 observations, got " +
                                 std::to_string(panel.size()));
    for (std::size_t i = 0; i < panel.observations.size(); ++i) {
        const Observation& obs = panel.observations[i];
        if (!(obs.K > 0.0) || !(obs.L > 0.0) || !(obs.V > 0.0))
            throw DomainError("panel row " + std::to_string(i) + " has a nonpositive column");
    }

    const ParamBounds& bounds = cfg.bounds;

    // Starts: user-supplied first, then Latin hypercube over the bounds.
    std::vector<Parameters> starts;
    starts.reserve(cfg.user_starts.size() + static_cast<std::size_t>(cfg.n_starts));
    for (const Parameters& s : cfg.user_starts) starts.push_back(clip_to_bounds(s, bounds));

    if (cfg.n_starts > 0) {
        CounterStream stream(cfg.seed);
        const std::size_t m = static_cast<std::size_t>(cfg.n_starts);
        std::vector<std::vector<std::size_t>> perms(5);
        for (auto& perm : perms) stream.permutation(m, perm);
        const double log_a_lo = std::log(bounds.A.lo);
        const double log_a_hi = std::log(bounds.A.hi);
        for (std::size_t i = 0; i < m; ++i) {
            auto stratum = [&](int dim) {
                return (static_cast<double>(perms[static_cast<std::size_t>(dim)][i]) +
                        stream.uniform()) /
                       static_cast<double>(m);
            };
            Parameters s;
            s.A = std::exp(log_a_lo + stratum(0) * (log_a_hi - log_a_lo));
            s.sigma = bounds.sigma.lo + stratum(1) * (bounds.sigma.hi - bounds.sigma.lo);
            s.delta = bounds.delta.lo + stratum(2) * (bounds.delta.hi - bounds.delta.lo);
            s.p = curvature_from_unit(stratum(3), bounds.p);
            s.q = curvature_from_unit(stratum(4), bounds.q);
            starts.push_back(clip_to_bounds(s, bounds));
        }
    }

    auto objective = [&](std::span<const double> z) {
        return objective_rss(from_internal(z, bounds), panel);
    };

    SimplexOptions opts;
    opts.max_iters = cfg.max_iters_per_start;
    opts.objective_tol = cfg.objective_tol;
    opts.param_tol = cfg.param_tol;

    // Initial simplex steps in internal coordinates.
    const std::vector<double> steps = {0.5, 0.1, 0.1, 0.1, 0.1};

    FitResult result;
    result.n_obs = static_cast<long long>(panel.size());
    result.starts.reserve(starts.size());

    int best_index = -1;
    double best_rss = kInf;
    SimplexResult best_run;

    for (std::size_t i = 0; i < starts.size(); ++i) {
        const SimplexResult run = nelder_mead(objective, to_internal(starts[i]), steps, opts);
        StartOutcome outcome;
        outcome.index = static_cast<int>(i);
        outcome.rss = run.fx;
        outcome.converged = run.converged;
        outcome.iterations = run.iterations;
        outcome.failed = !std::isfinite(run.fx);
        result.starts.push_back(outcome);
        if (!outcome.failed && run.fx < best_rss) {
            best_rss = run.fx;
            best_index = static_cast<int>(i);
            best_run = run;
        }
    }

    if (best_index < 0)
        throw AllStartsFailed("every start produced domain errors on the panel");

    result.params = from_internal(best_run.x, bounds);
    result.best_start_index = best_index;
    result.converged = best_run.converged;
    result.n_iterations = best_run.iterations;

    const FitStatistics stats = fit_statistics(result.params, panel);
    result.rss = stats.rss;
    result.r_squared = stats.r_squared;
    result.r_squared_defined = stats.r_squared_defined;
    result.std_error = stats.std_error;
    result.std_error_defined = stats.std_error_defined;
    result.substitution_elasticity = stats.substitution_elasticity;
    result.substitution_elasticity_defined = stats.substitution_elasticity_defined;
    return result;
}

}  // namespace nestfn
