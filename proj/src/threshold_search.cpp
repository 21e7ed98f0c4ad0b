#include "aoi/threshold_search.hpp"

#include <limits>

#include "aoi/closed_form.hpp"

namespace aoi {

namespace {

void require_beta(double beta) {
    if (!(beta >= 0.0)) throw Error(ErrorCode::validation, "beta must be nonnegative");
}

}  // namespace

ThresholdResult optimal_threshold(const SystemParams& params, double beta) {
    require_beta(beta);
    const CoefficientSet coeffs(params, beta);
    const Age last = params.distortion().last_breakpoint();

    ThresholdResult best;
    best.cost_star = std::numeric_limits<double>::infinity();
    for (Age k = 1; k < last; ++k) {
        const double cost = evaluate_threshold(params, coeffs, k).lagrangian_cost();
        ++best.evaluations;
        if (cost < best.cost_star) {
            best.cost_star = cost;
            best.k_star = k;
        }
    }

    const Age tail_k = k_ub(params, coeffs);
    const double tail_cost = evaluate_threshold(params, coeffs, tail_k).lagrangian_cost();
    ++best.evaluations;
    if (tail_cost < best.cost_star) {
        best.cost_star = tail_cost;
        best.k_star = tail_k;
    }
    return best;
}

ThresholdResult brute_force_threshold(const SystemParams& params, double beta, Age k_max) {
    require_beta(beta);
    if (k_max < 1) throw Error(ErrorCode::validation, "k_max must be at least 1");
    const CoefficientSet coeffs(params, beta);

    ThresholdResult best;
    best.cost_star = std::numeric_limits<double>::infinity();
    for (Age k = 1; k <= k_max; ++k) {
        const double cost = evaluate_threshold(params, coeffs, k).lagrangian_cost();
        ++best.evaluations;
        if (cost < best.cost_star) {
            best.cost_star = cost;
            best.k_star = k;
        }
    }
    return best;
}

ThresholdResult brute_force_threshold(const SystemParams& params, double beta) {
    return brute_force_threshold(params, beta, params.distortion().last_breakpoint() + kBruteForceMargin);
}

}  // namespace aoi
