#pragma once

#include <string>

#include "nestfn/errors.hpp"

namespace nestfn {

/// The 5-tuple (A, sigma, delta, p, q) defining one production function instance.
///
/// V(K, L) = A * [ sigma * h^(-p/q) + (1 - sigma) * (K/L)^(-p) ]^(-1/p)
/// with the inner aggregate h(K, L) = delta * K^(-q) + (1 - delta) * L^(-q).
struct Parameters {
    double A = 1.0;      // total factor productivity, > 0
    double sigma = 0.5;  // outer nest weight, in [0, 2] (strict mode: [0, 1])
    double delta = 0.5;  // inner nest weight, in [0, 2] (strict mode: [0, 1])
    double p = 0.5;      // outer curvature, |p| >= 1e-3 (strict mode: |p| <= 1 too)
    double q = 0.5;      // inner curvature, |q| >= 1e-3 (strict mode: |q| <= 1 too)
};

// Smallest admissible |p|, |q|. Values below this are rejected at construction;
// the zero/Cobb-Douglas limit is out of scope.
inline constexpr double kMinAbsCurvature = 1e-3;

struct Interval {
    double lo;
    double hi;
};

// Throws InvalidParameter on range violations or non-finite values.
// strict additionally enforces |p|,|q| <= 1 and sigma, delta in [0, 1].
void validate_parameters(const Parameters& params, bool strict = false);

Parameters make_parameters(double A, double sigma, double delta, double p, double q,
                           bool strict = false);

/// A positive (K, L) input bundle.
struct InputPoint {
    double K = 1.0;  // capital input
    double L = 1.0;  // labor input
};

// Throws DomainError when K or L is nonpositive or non-finite.
void validate_input(const InputPoint& x);

InputPoint make_input(double K, double L);

/// Intermediate quantities of one evaluation, exposed for diagnostics.
struct EvalBreakdown {
    double h_value;     // inner aggregate delta*K^-q + (1-delta)*L^-q
    double ratio_term;  // (K/L)^-p
    double bracket;     // sigma*h^(-p/q) + (1-sigma)*ratio_term
    double v;           // A * bracket^(-1/p)
};

/// Marginal products.
struct Gradient {
    double dV_dK;
    double dV_dL;
};

/// Second derivatives from central finite differences of the analytic gradient,
/// plus closed-form eigenvalues of the symmetrized matrix (eig1 >= eig2).
struct Hessian2 {
    double hkk;
    double hkl;  // d(dV_dK)/dL
    double hlk;  // d(dV_dL)/dK, filled independently of hkl
    double hll;
    double eig1;
    double eig2;
};

/// Direct elasticity of substitution between K and L along the isoquant.
/// degenerate_direction is set when the denominator of the two-input formula
/// vanishes (e.g. sigma = 0, where MRTS is constant along rays); value is then
/// the raw ratio and is typically non-finite.
struct SubstitutionElasticity {
    double value;
    bool degenerate_direction;
};

EvalBreakdown eval_v(const Parameters& params, const InputPoint& x);

// The two-input composition {delta*K^-q + (1-delta)*L^-q} + (K/L)^-p, verbatim.
double eval_f(const Parameters& params, const InputPoint& x);

// Analytic chain-rule gradient. Agrees with central finite differences
// (relative step 1e-6) to relative error <= 1e-6 on smooth interior points.
Gradient gradient(const Parameters& params, const InputPoint& x);

// (dV/dK) * K / V
double elasticity_k(const Parameters& params, const InputPoint& x);

// (dV/dL) * L / V
double elasticity_l(const Parameters& params, const InputPoint& x);

SubstitutionElasticity substitution_elasticity(const Parameters& params, const InputPoint& x);

// Central finite differences of the analytic gradient, relative step 1e-5.
Hessian2 hessian(const Parameters& params, const InputPoint& x);

// Closed-form eigenvalues of the symmetric 2x2 matrix [[a, b], [b, c]],
// returned as {eig1, eig2} with eig1 >= eig2.
struct EigPair {
    double eig1;
    double eig2;
};
EigPair symmetric_eigenvalues_2x2(double a, double b, double c);

std::string format_double(double value);  // shortest round-trip decimal

}  // namespace nestfn
