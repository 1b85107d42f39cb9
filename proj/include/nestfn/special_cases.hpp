#pragma once

#include <string>

#include "nestfn/model.hpp"

namespace nestfn {

enum class SpecialCaseTag {
    GeneralNested,
    DeltaZero,
    DeltaOne,
    SigmaZero,
    SigmaOne,
    PureCapitalIntensive,  // delta = 1 and sigma = 1: V = A / K
    PureLaborIntensive,    // delta = 1 and sigma = 0: V = A * K / L
    PlainCES,              // p = q
};

const char* to_string(SpecialCaseTag tag);

struct SpecialCaseForm {
    SpecialCaseTag tag;
    double tolerance_used;
};

// Most specific matching tag wins, precedence:
// PureCapitalIntensive > PureLaborIntensive > PlainCES > SigmaZero/SigmaOne
// > DeltaZero/DeltaOne > GeneralNested.
SpecialCaseForm classify_special_case(const Parameters& params, double tol = 1e-9);

// Evaluates the algebraically reduced expression for the form (obtained by
// substituting the form's constraint into the full definition). Equals
// eval_v(params, x).v within 1e-12 relative whenever the constraint holds.
// Throws FormMismatch when params violate the form's constraint beyond its
// tolerance.
double reduced_eval(const Parameters& params, const InputPoint& x, const SpecialCaseForm& form);

}  // namespace nestfn
