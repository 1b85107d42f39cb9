#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nestfn/model.hpp"

namespace nestfn {

/// One audited closed-form expression: the value the quoted formula produces
/// at (params, x) against the independently computed ground truth, and their
/// absolute deviation. defined = false when the quoted expression is not
/// evaluable at the point (e.g. a negative base under a non-integer power);
/// that is recorded here rather than thrown.
struct FormulaCheck {
    std::string id;
    double closed_form_value = 0.0;
    double computed_value = 0.0;
    double abs_deviation = 0.0;
    bool defined = true;
    std::string note;
};

struct FormulaAudit {
    std::vector<FormulaCheck> checks;  // fixed order, stable across runs
    const FormulaCheck* find(std::string_view id) const;
};

// Evaluates each quoted closed form verbatim and reports its deviation from
// the ground truth computed from first principles (analytic gradient,
// finite-difference Hessian, ray-probe homogeneity degree). Never asserts
// that the quoted forms are correct. The eigenvalue expressions are audited
// at the unit point (1, 1) regardless of x, matching how they are stated.
FormulaAudit audit_formulas(const Parameters& params, const InputPoint& x);

}  // namespace nestfn
