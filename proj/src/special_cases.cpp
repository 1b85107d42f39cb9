#include "nestfn/special_cases.hpp"

#include <cmath>

namespace nestfn {

const char* to_string(SpecialCaseTag tag) {
    switch (tag) {
        case SpecialCaseTag::GeneralNested: return "GeneralNested";
        case SpecialCaseTag::DeltaZero: return "DeltaZero";
        case SpecialCaseTag::DeltaOne: return "DeltaOne";
        case SpecialCaseTag::SigmaZero: return "SigmaZero";
        case SpecialCaseTag::SigmaOne: return "SigmaOne";
        case SpecialCaseTag::PureCapitalIntensive: return "PureCapitalIntensive";
        case SpecialCaseTag::PureLaborIntensive: return "PureLaborIntensive";
        case SpecialCaseTag::PlainCES: return "PlainCES";
    }
    return "GeneralNested";
}

SpecialCaseForm classify_special_case(const Parameters& params, double tol) {
    validate_parameters(params);
    if (!(tol > 0.0)) throw InvalidParameter("classification tolerance must be > 0");

    const bool sigma_zero = std::fabs(params.sigma) <= tol;
    const bool sigma_one = std::fabs(params.sigma - 1.0) <= tol;
    const bool delta_zero = std::fabs(params.delta) <= tol;
    const bool delta_one = std::fabs(params.delta - 1.0) <= tol;
    const bool equal_pq = std::fabs(params.p - params.q) <= tol;

    SpecialCaseTag tag = SpecialCaseTag::GeneralNested;
    if (delta_one && sigma_one)
        tag = SpecialCaseTag::PureCapitalIntensive;
    else if (delta_one && sigma_zero)
        tag = SpecialCaseTag::PureLaborIntensive;
    else if (equal_pq)
        tag = SpecialCaseTag::PlainCES;
    else if (sigma_zero)
        tag = SpecialCaseTag::SigmaZero;
    else if (sigma_one)
        tag = SpecialCaseTag::SigmaOne;
    else if (delta_zero)
        tag = SpecialCaseTag::DeltaZero;
    else if (delta_one)
        tag = SpecialCaseTag::DeltaOne;
    return SpecialCaseForm{tag, tol};
}

namespace {

void require(bool ok, const char* constraint, const SpecialCaseForm& form) {
    if (!ok)
        throw FormMismatch(std::string("parameters violate the ") + to_string(form.tag) +
                           " constraint (" + constraint + ") beyond tolerance " +
                           format_double(form.tolerance_used));
}

double positive_bracket_pow(double bracket, double exponent_p, double A) {
    if (!(bracket > 0.0))
        throw NonPositiveBracket("reduced-form bracket = " + format_double(bracket) +
                                     " is not positive",
                                 bracket);
    return A * std::pow(bracket, -1.0 / exponent_p);
}

}  // namespace

double reduced_eval(const Parameters& params, const InputPoint& x, const SpecialCaseForm& form) {
    validate_parameters(params);
    validate_input(x);
    const double tol = form.tolerance_used;
    const double A = params.A;
    const double sigma = params.sigma;
    const double delta = params.delta;
    const double p = params.p;
    const double q = params.q;
    const double K = x.K;
    const double L = x.L;

    switch (form.tag) {
        case SpecialCaseTag::GeneralNested:
            return eval_v(params, x).v;

        case SpecialCaseTag::SigmaZero:
            // [(K/L)^-p]^(-1/p) = K/L
            require(std::fabs(sigma) <= tol, "sigma = 0", form);
            return A * K / L;

        case SpecialCaseTag::SigmaOne: {
            // [h^(-p/q)]^(-1/p) = h^(1/q)
            require(std::fabs(sigma - 1.0) <= tol, "sigma = 1", form);
            const double h = delta * std::pow(K, -q) + (1.0 - delta) * std::pow(L, -q);
            if (!(h > 0.0))
                throw NonPositiveBracket("inner aggregate h = " + format_double(h) +
                                             " is not positive",
                                         h);
            return A * std::pow(h, 1.0 / q);
        }

        case SpecialCaseTag::DeltaZero: {
            // h = L^-q, so h^(-p/q) = L^p
            require(std::fabs(delta) <= tol, "delta = 0", form);
            const double bracket = sigma * std::pow(L, p) + (1.0 - sigma) * std::pow(K / L, -p);
            return positive_bracket_pow(bracket, p, A);
        }

        case SpecialCaseTag::DeltaOne: {
            // h = K^-q, so h^(-p/q) = K^p
            require(std::fabs(delta - 1.0) <= tol, "delta = 1", form);
            const double bracket = sigma * std::pow(K, p) + (1.0 - sigma) * std::pow(K / L, -p);
            return positive_bracket_pow(bracket, p, A);
        }

        case SpecialCaseTag::PureCapitalIntensive:
            // h = K^-q and sigma = 1: V = A * (K^-q)^(1/q) = A / K
            require(std::fabs(delta - 1.0) <= tol && std::fabs(sigma - 1.0) <= tol,
                    "delta = 1 and sigma = 1", form);
            return A / K;

        case SpecialCaseTag::PureLaborIntensive:
            // sigma = 0 kills the h term: V = A * K / L
            require(std::fabs(delta - 1.0) <= tol && std::fabs(sigma) <= tol,
                    "delta = 1 and sigma = 0", form);
            return A * K / L;

        case SpecialCaseTag::PlainCES: {
            // p = q collapses h^(-p/q) to 1/h
            require(std::fabs(p - q) <= tol, "p = q", form);
            double weighted_h = 0.0;
            if (sigma != 0.0) {
                const double h = delta * std::pow(K, -q) + (1.0 - delta) * std::pow(L, -q);
                if (!(h > 0.0))
                    throw NonPositiveBracket("inner aggregate h = " + format_double(h) +
                                                 " is not positive",
                                             h);
                weighted_h = sigma / h;
            }
            const double bracket = weighted_h + (1.0 - sigma) * std::pow(K / L, -q);
            return positive_bracket_pow(bracket, q, A);
        }
    }
    throw FormMismatch("unknown special-case form");
}

}  // namespace nestfn
