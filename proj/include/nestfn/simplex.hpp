#pragma once

#include <functional>
#include <span>
#include <vector>

namespace nestfn {

struct SimplexOptions {
    int max_iters = 2000;
    double objective_tol = 1e-12;  // relative improvement stop
    double param_tol = 1e-10;      // simplex size stop
};

struct SimplexResult {
    std::vector<double> x;  // best vertex ever seen
    double fx = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Derivative-free Nelder-Mead with standard coefficients (reflection 1,
// expansion 2, contraction 0.5, shrink 0.5). The objective may return +inf
// for infeasible points; such vertices are ordered worst. Deterministic for
// a given (f, x0, step).
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                          std::span<const double> x0, std::span<const double> step,
                          const SimplexOptions& options);

}  // namespace nestfn
