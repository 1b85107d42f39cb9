#include "nestfn/model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

namespace nestfn {

namespace {

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void validate_parameters(const Parameters& params, bool strict) {
    if (!finite(params.A) || params.A <= 0.0)
        throw InvalidParameter("A must be finite and > 0, got " + format_double(params.A));
    if (!finite(params.sigma) || params.sigma < 0.0 || params.sigma > 2.0)
        throw InvalidParameter("sigma must be in [0, 2], got " + format_double(params.sigma));
    if (!finite(params.delta) || params.delta < 0.0 || params.delta > 2.0)
        throw InvalidParameter("delta must be in [0, 2], got " + format_double(params.delta));
    if (!finite(params.p) || std::fabs(params.p) < kMinAbsCurvature)
        throw InvalidParameter("p must satisfy |p| >= 1e-3 (p = 0 is not admissible), got " +
                               format_double(params.p));
    if (!finite(params.q) || std::fabs(params.q) < kMinAbsCurvature)
        throw InvalidParameter("q must satisfy |q| >= 1e-3 (q = 0 is not admissible), got " +
                               format_double(params.q));
    if (strict) {
        if (params.sigma > 1.0)
            throw InvalidParameter("strict mode: sigma must be in [0, 1], got " +
                                   format_double(params.sigma));
        if (params.delta > 1.0)
            throw InvalidParameter("strict mode: delta must be in [0, 1], got " +
                                   format_double(params.delta));
        if (std::fabs(params.p) > 1.0)
            throw InvalidParameter("strict mode: |p| must be <= 1, got " + format_double(params.p));
        if (std::fabs(params.q) > 1.0)
            throw InvalidParameter("strict mode: |q| must be <= 1, got " + format_double(params.q));
    }
}

Parameters make_parameters(double A, double sigma, double delta, double p, double q, bool strict) {
    Parameters params{A, sigma, delta, p, q};
    validate_parameters(params, strict);
    return params;
}

void validate_input(const InputPoint& x) {
    if (!finite(x.K) || x.K <= 0.0)
        throw DomainError("K must be finite and > 0, got " + format_double(x.K));
    if (!finite(x.L) || x.L <= 0.0)
        throw DomainError("L must be finite and > 0, got " + format_double(x.L));
}

InputPoint make_input(double K, double L) {
    InputPoint x{K, L};
    validate_input(x);
    return x;
}

std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

// Shared evaluation core. h_pow = h^(-p/q) is only taken (and h only required
// positive) when sigma != 0; with sigma = 0 the inner aggregate never enters
// the bracket and a nonpositive h (possible for delta > 1) is harmless.
struct Core {
    double h;
    double h_pow;  // h^(-p/q); 0 when sigma == 0
    double ratio;  // (K/L)^(-p)
    double bracket;
    double v;
};

Core eval_core(const Parameters& P, const InputPoint& x) {
    validate_parameters(P);
    validate_input(x);

    Core c{};
    c.h = P.delta * std::pow(x.K, -P.q) + (1.0 - P.delta) * std::pow(x.L, -P.q);
    c.ratio = std::pow(x.K / x.L, -P.p);

    double weighted_h = 0.0;
    c.h_pow = 0.0;
    if (P.sigma != 0.0) {
        if (!(c.h > 0.0))
            throw NonPositiveBracket("inner aggregate h = " + format_double(c.h) +
                                         " is not positive (delta > 1 with K >> L or L >> K)",
                                     c.h);
        c.h_pow = std::pow(c.h, -P.p / P.q);
        weighted_h = P.sigma * c.h_pow;
    }
    c.bracket = weighted_h + (1.0 - P.sigma) * c.ratio;
    if (!(c.bracket > 0.0))
        throw NonPositiveBracket("bracket = " + format_double(c.bracket) +
                                     " is not positive at K=" + format_double(x.K) +
                                     ", L=" + format_double(x.L),
                                 c.bracket);
    c.v = P.A * std::pow(c.bracket, -1.0 / P.p);
    if (!std::isfinite(c.v) || !std::isfinite(c.bracket) || !std::isfinite(c.h) ||
        !std::isfinite(c.ratio) || !(c.v > 0.0))
        throw NumericalBreakdown("evaluation overflowed or underflowed at K=" +
                                 format_double(x.K) + ", L=" + format_double(x.L));
    return c;
}

Gradient gradient_from_core(const Parameters& P, const InputPoint& x, const Core& c) {
    // dV/dK = -(v/B) * [ sigma*delta*h^(-p/q-1)*K^(-q-1) - (1-sigma)*(K/L)^(-p-1)/L ]
    // and (K/L)^(-p-1)/L simplifies to ratio/K; the mirrored L term to ratio/L.
    const double common = c.v / c.bracket;
    double inner_k = 0.0;
    double inner_l = 0.0;
    if (P.sigma != 0.0) {
        const double h_pow_over_h = c.h_pow / c.h;
        inner_k += P.sigma * P.delta * h_pow_over_h * std::pow(x.K, -P.q - 1.0);
        inner_l += P.sigma * (1.0 - P.delta) * h_pow_over_h * std::pow(x.L, -P.q - 1.0);
    }
    inner_k -= (1.0 - P.sigma) * c.ratio / x.K;
    inner_l += (1.0 - P.sigma) * c.ratio / x.L;

    Gradient g{-common * inner_k, -common * inner_l};
    if (!std::isfinite(g.dV_dK) || !std::isfinite(g.dV_dL))
        throw NumericalBreakdown("gradient overflowed at K=" + format_double(x.K) +
                                 ", L=" + format_double(x.L));
    return g;
}

}  // namespace

EvalBreakdown eval_v(const Parameters& params, const InputPoint& x) {
    const Core c = eval_core(params, x);
    return EvalBreakdown{c.h, c.ratio, c.bracket, c.v};
}

double eval_f(const Parameters& params, const InputPoint& x) {
    validate_parameters(params);
    validate_input(x);
    const double h =
        params.delta * std::pow(x.K, -params.q) + (1.0 - params.delta) * std::pow(x.L, -params.q);
    return h + std::pow(x.K / x.L, -params.p);
}

Gradient gradient(const Parameters& params, const InputPoint& x) {
    const Core c = eval_core(params, x);
    return gradient_from_core(params, x, c);
}

double elasticity_k(const Parameters& params, const InputPoint& x) {
    const Core c = eval_core(params, x);
    const Gradient g = gradient_from_core(params, x, c);
    return g.dV_dK * x.K / c.v;
}

double elasticity_l(const Parameters& params, const InputPoint& x) {
    const Core c = eval_core(params, x);
    const Gradient g = gradient_from_core(params, x, c);
    return g.dV_dL * x.L / c.v;
}

EigPair symmetric_eigenvalues_2x2(double a, double b, double c) {
    const double mean = 0.5 * (a + c);
    const double half_diff = 0.5 * (a - c);
    const double radius = std::hypot(half_diff, b);
    return EigPair{mean + radius, mean - radius};
}

Hessian2 hessian(const Parameters& params, const InputPoint& x) {
    constexpr double rel_step = 1e-5;
    const double hk = rel_step * x.K;
    const double hl = rel_step * x.L;

    // An infeasible center point is the caller's domain error; only stencil
    // excursions count as numerical breakdowns.
    (void)gradient(params, x);

    auto grad_at = [&](double K, double L) {
        try {
            return gradient(params, InputPoint{K, L});
        } catch (const NonPositiveBracket& e) {
            throw NumericalBreakdown(std::string("finite-difference stencil left the domain: ") +
                                     e.what());
        } catch (const DomainError& e) {
            throw NumericalBreakdown(std::string("finite-difference stencil left the domain: ") +
                                     e.what());
        }
    };

    const Gradient gkp = grad_at(x.K + hk, x.L);
    const Gradient gkm = grad_at(x.K - hk, x.L);
    const Gradient glp = grad_at(x.K, x.L + hl);
    const Gradient glm = grad_at(x.K, x.L - hl);

    Hessian2 H{};
    H.hkk = (gkp.dV_dK - gkm.dV_dK) / (2.0 * hk);
    H.hlk = (gkp.dV_dL - gkm.dV_dL) / (2.0 * hk);
    H.hkl = (glp.dV_dK - glm.dV_dK) / (2.0 * hl);
    H.hll = (glp.dV_dL - glm.dV_dL) / (2.0 * hl);

    const double off = 0.5 * (H.hkl + H.hlk);
    const EigPair e = symmetric_eigenvalues_2x2(H.hkk, off, H.hll);
    H.eig1 = e.eig1;
    H.eig2 = e.eig2;
    if (!std::isfinite(H.hkk) || !std::isfinite(H.hkl) || !std::isfinite(H.hlk) ||
        !std::isfinite(H.hll))
        throw NumericalBreakdown("Hessian finite differences overflowed");
    return H;
}

SubstitutionElasticity substitution_elasticity(const Parameters& params, const InputPoint& x) {
    const Core c = eval_core(params, x);
    const Gradient g = gradient_from_core(params, x, c);

    // Marginal-product scale for the zero test: |V|/K and |V|/L.
    const double tol_k = 1e-12 * c.v / x.K;
    const double tol_l = 1e-12 * c.v / x.L;
    if (std::fabs(g.dV_dK) <= tol_k)
        throw ZeroMarginalProduct("dV/dK is zero within tolerance; MRTS undefined");
    if (std::fabs(g.dV_dL) <= tol_l)
        throw ZeroMarginalProduct("dV/dL is zero within tolerance; MRTS undefined");

    const Hessian2 H = hessian(params, x);
    const double mixed = 0.5 * (H.hkl + H.hlk);

    // Two-input direct elasticity:
    //   sigma_KL = Fk*Fl*(K*Fk + L*Fl) / (K*L*(2*Fk*Fl*Fkl - Fk^2*Fll - Fl^2*Fkk))
    const double fk = g.dV_dK;
    const double fl = g.dV_dL;
    const double numer = fk * fl * (x.K * fk + x.L * fl);
    const double t1 = 2.0 * fk * fl * mixed;
    const double t2 = fk * fk * H.hll;
    const double t3 = fl * fl * H.hkk;
    const double denom = x.K * x.L * (t1 - t2 - t3);
    const double denom_scale = x.K * x.L * (std::fabs(t1) + std::fabs(t2) + std::fabs(t3));

    SubstitutionElasticity result{};
    result.degenerate_direction = !(std::fabs(denom) > 1e-9 * denom_scale) || denom_scale == 0.0;
    result.value = numer / denom;
    return result;
}

}  // namespace nestfn
