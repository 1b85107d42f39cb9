#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nestfn/model.hpp"

namespace nestfn {

/// Region and budget for the property scans.
struct ScanConfig {
    Interval k_range{0.5, 10.0};
    Interval l_range{0.5, 10.0};
    int grid = 8;                           // points per axis, >= 2
    long long samples = 10000;              // random draws for stochastic scans, >= 1
    std::uint64_t seed = 0;
    bool log_spacing = true;
    long long max_budget = 10'000'000;      // grid*grid + samples must not exceed this
};

void validate_scan_config(const ScanConfig& cfg);

struct PositivitySection {
    long long checked = 0;
    long long violations = 0;  // v <= 0 or domain errors
    std::optional<InputPoint> first_violation;
};

struct HomogeneitySection {
    double degree_min = 0.0;
    double degree_max = 0.0;
    bool is_homogeneous = false;      // degree_max - degree_min <= 1e-6
    bool claimed_degree_one = false;  // is_homogeneous and |degree - 1| <= 1e-6
};

struct ConcavitySection {
    long long points_checked = 0;
    long long negative_semidefinite_count = 0;
    long long breakdown_count = 0;  // FD stencil left the domain (recorded, not fatal)
    double max_eig_over_region = 0.0;
    // Audit channel: the quoted closed-form eigenvalue expressions evaluated at
    // the unit point (1, 1), recorded alongside the measured values there.
    double closed_form_eig1_at_unit = 0.0;
    double closed_form_eig2_at_unit = 0.0;
    double measured_eig1_at_unit = 0.0;
    double measured_eig2_at_unit = 0.0;
};

struct MonotonicitySection {
    double share_dVdK_positive = 0.0;  // among evaluable grid points
    double share_dVdL_positive = 0.0;
    long long points_checked = 0;
    long long points_failed = 0;
};

struct DiagnosticsReport {
    PositivitySection positivity;
    HomogeneitySection homogeneity;
    ConcavitySection concavity;
    MonotonicitySection monotonicity;
    double euler_identity_max_abs_err = 0.0;
};

// Measured ray log-derivative d ln V(lambda*K, lambda*L) / d ln lambda at
// lambda = 1, by central difference with step 1e-4 in ln lambda. Equals
// elasticity_k + elasticity_l within 1e-8 on smooth interior points.
double homogeneity_degree(const Parameters& params, const InputPoint& x);

HomogeneitySection homogeneity_scan(const Parameters& params, const ScanConfig& cfg);
PositivitySection positivity_scan(const Parameters& params, const ScanConfig& cfg);
ConcavitySection concavity_scan(const Parameters& params, const ScanConfig& cfg);
MonotonicitySection monotonicity_scan(const Parameters& params, const ScanConfig& cfg);

DiagnosticsReport run_all(const Parameters& params, const ScanConfig& cfg);

// Fixed row-major grid enumeration shared by all scans (K outer, L inner);
// geometric spacing when log_spacing is set.
std::vector<InputPoint> scan_grid(const ScanConfig& cfg);

}  // namespace nestfn
