#pragma once

// Optimal age threshold of the Lagrangian (age + beta * energy) problem.

#include <cstdint>

#include "aoi/model.hpp"

namespace aoi {

struct ThresholdResult {
    Age k_star = 1;
    double cost_star = 0.0;
    std::int64_t evaluations = 0;  // closed-form cost evaluations performed
};

/// Default search horizon past the last breakpoint for the exhaustive search.
inline constexpr Age kBruteForceMargin = 100'000;

/**
 * Scans thresholds 1..delta_L-1 with the closed-form cost and compares them
 * against the analytic optimum of the unbounded last interval. Ties go to
 * the smallest threshold. Uses at most delta_L cost evaluations.
 */
ThresholdResult optimal_threshold(const SystemParams& params, double beta);

/// Exhaustive argmin over k in [1, k_max]; smallest k wins ties.
ThresholdResult brute_force_threshold(const SystemParams& params, double beta, Age k_max);

/// brute_force_threshold with k_max = delta_L + kBruteForceMargin.
ThresholdResult brute_force_threshold(const SystemParams& params, double beta);

}  // namespace aoi
