#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nestfn/model.hpp"

namespace nestfn {

/// One (industry, year, K, L, V) row.
struct Observation {
    std::string industry_code;
    int year = 2010;  // in [1900, 2200]
    double K = 1.0;
    double L = 1.0;
    double V = 1.0;
};

/// Ordered collection of observations; order is preserved from the source.
struct Panel {
    std::vector<Observation> observations;
    std::string source_label;

    std::size_t size() const { return observations.size(); }
    bool empty() const { return observations.empty(); }
};

/// Recipe for a synthetic panel with known ground-truth parameters.
struct SynthSpec {
    Parameters true_params;
    long long n = 100;
    Interval k_range{0.5, 10.0};
    Interval l_range{0.5, 10.0};
    double noise_sd = 0.0;  // multiplicative lognormal sigma, >= 0
    std::uint64_t seed = 0;
};

}  // namespace nestfn
