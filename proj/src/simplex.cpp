#include "nestfn/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nestfn {

namespace {

// Ties broken by vertex index so the ordering (and thus the whole search)
// is deterministic even when several vertices share a value (e.g. +inf).
struct Vertex {
    std::vector<double> x;
    double f;
    std::size_t birth;
};

bool better(const Vertex& a, const Vertex& b) {
    if (a.f != b.f) return a.f < b.f;
    return a.birth < b.birth;
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                          std::span<const double> x0, std::span<const double> step,
                          const SimplexOptions& options) {
    const std::size_t n = x0.size();
    std::size_t births = 0;

    auto eval = [&](std::vector<double> x) {
        const double fx = f(x);
        return Vertex{std::move(x), std::isnan(fx) ? std::numeric_limits<double>::infinity() : fx,
                      births++};
    };

    std::vector<Vertex> simplex;
    simplex.reserve(n + 1);
    simplex.push_back(eval(std::vector<double>(x0.begin(), x0.end())));
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> v(x0.begin(), x0.end());
        v[j] += step[j] != 0.0 ? step[j] : 1e-4;
        simplex.push_back(eval(std::move(v)));
    }

    auto order = [&] { std::sort(simplex.begin(), simplex.end(), better); };
    order();

    SimplexResult result;
    result.x = simplex.front().x;
    result.fx = simplex.front().f;

    int iter = 0;
    for (; iter < options.max_iters; ++iter) {
        const Vertex& best = simplex.front();
        const Vertex& worst = simplex.back();

        // Stopping: relative objective spread or simplex extent.
        if (std::isfinite(best.f) && std::isfinite(worst.f)) {
            const double spread = worst.f - best.f;
            if (spread <= options.objective_tol * (std::fabs(best.f) + options.objective_tol)) {
                result.converged = true;
                break;
            }
        }
        double extent = 0.0;
        double scale = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            scale = std::max(scale, 1.0 + std::fabs(best.x[j]));
            for (std::size_t i = 1; i < simplex.size(); ++i)
                extent = std::max(extent, std::fabs(simplex[i].x[j] - best.x[j]));
        }
        if (extent <= options.param_tol * scale) {
            result.converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i + 1 < simplex.size(); ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i].x[j];
        for (double& c : centroid) c /= static_cast<double>(n);

        auto along = [&](double coeff) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j)
                x[j] = centroid[j] + coeff * (centroid[j] - worst.x[j]);
            return x;
        };

        Vertex reflected = eval(along(1.0));
        if (better(reflected, simplex.front())) {
            Vertex expanded = eval(along(2.0));
            simplex.back() = better(expanded, reflected) ? std::move(expanded)
                                                         : std::move(reflected);
        } else if (better(reflected, simplex[simplex.size() - 2])) {
            simplex.back() = std::move(reflected);
        } else {
            const bool outside = better(reflected, worst);
            Vertex contracted = eval(along(outside ? 0.5 : -0.5));
            if (better(contracted, outside ? reflected : worst)) {
                simplex.back() = std::move(contracted);
            } else {
                // Shrink toward the best vertex.
                for (std::size_t i = 1; i < simplex.size(); ++i) {
                    std::vector<double> x(n);
                    for (std::size_t j = 0; j < n; ++j)
                        x[j] = simplex.front().x[j] + 0.5 * (simplex[i].x[j] - simplex.front().x[j]);
                    simplex[i] = eval(std::move(x));
                }
            }
        }
        order();
        if (simplex.front().f < result.fx) {
            result.fx = simplex.front().f;
            result.x = simplex.front().x;
        }
    }
    result.iterations = iter;
    return result;
}

}  // namespace nestfn
