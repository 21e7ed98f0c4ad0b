#include "aoi/lagrange.hpp"

#include <algorithm>
#include <cmath>

#include "aoi/chain_oracle.hpp"
#include "aoi/closed_form.hpp"
#include "aoi/threshold_search.hpp"

namespace aoi {

namespace {

struct Evaluation {
    Age k;
    double energy;
};

Evaluation evaluate_beta(const SystemParams& params, double beta) {
    const Age k = optimal_threshold(params, beta).k_star;
    return {k, avg_energy(params, k)};
}

}  // namespace

BetaBracket bracket_beta(const SystemParams& params) {
    if (!(params.e_max() > 0.0)) throw Error(ErrorCode::no_bracket, "energy budget must be positive");
    BetaBracket bracket;
    bracket.beta_hi = 1.0;
    while (evaluate_beta(params, bracket.beta_hi).energy > params.e_max()) {
        if (++bracket.doublings > kMaxDoublings)
            throw Error(ErrorCode::no_bracket, "no multiplier meets the energy budget after 64 doublings");
        bracket.beta_hi *= 2.0;
    }
    return bracket;
}

double interpolation_factor(double e_max, double energy_low, double energy_high) {
    if (energy_low == energy_high) return 1.0;
    return (e_max - energy_high) / (energy_low - energy_high);
}

BisectionResult bisect(const SystemParams& params, double epsilon) {
    if (!(epsilon > 0.0)) throw Error(ErrorCode::validation, "epsilon must be positive");
    BisectionResult out;
    out.trace.epsilon = epsilon;

    const Evaluation free = evaluate_beta(params, 0.0);
    if (free.energy <= params.e_max()) {
        out.slack = true;
        out.policy = MixturePolicy{{free.k}, {free.k}, 1.0, 0.0, 0.0};
        out.energy_low = out.energy_high = free.energy;
        out.raw_mix_prob = 1.0;
        return out;
    }

    const BetaBracket bracket = bracket_beta(params);
    double lo = bracket.beta_lo;
    double hi = bracket.beta_hi;
    while (std::abs(hi - lo) > epsilon) {
        const double mid = 0.5 * (lo + hi);
        const Evaluation e = evaluate_beta(params, mid);
        out.trace.iterations.push_back({mid, e.k, e.energy});
        if (e.energy > params.e_max())
            lo = mid;
        else
            hi = mid;
    }
    out.trace.beta_minus = lo;
    out.trace.beta_plus = hi;

    const Evaluation low = evaluate_beta(params, lo);
    const Evaluation high = evaluate_beta(params, hi);
    out.energy_low = low.energy;
    out.energy_high = high.energy;
    out.raw_mix_prob = interpolation_factor(params.e_max(), low.energy, high.energy);
    out.clamp_diagnostic = out.raw_mix_prob < -1e-6 || out.raw_mix_prob > 1.0 + 1e-6;
    const double mu = std::clamp(out.raw_mix_prob, 0.0, 1.0);
    out.policy = MixturePolicy{{low.k}, {high.k}, mu, lo, hi};
    return out;
}

namespace {

struct MixtureMoments {
    double age = 0.0;
    double energy = 0.0;
};

// Renewal-reward over delivery cycles: each cycle follows the low policy with
// the per-delivery draw probability x, so long-run averages are ratios of the
// x-weighted per-cycle expectations.
MixtureMoments mixture_moments(const SystemParams& params, const MixturePolicy& policy) {
    const double x = chain::delivery_draw_probability(params, policy);
    const auto low = chain::renewal_cycle(params, policy.low_policy.threshold);
    const auto high = chain::renewal_cycle(params, policy.high_policy.threshold);
    const double length = x * low.length + (1.0 - x) * high.length;
    return {(x * low.age_sum + (1.0 - x) * high.age_sum) / length,
            (x * low.energy + (1.0 - x) * high.energy) / length};
}

}  // namespace

double mixture_energy(const SystemParams& params, const MixturePolicy& policy) {
    return mixture_moments(params, policy).energy;
}

double mixture_age(const SystemParams& params, const MixturePolicy& policy) {
    return mixture_moments(params, policy).age;
}

}  // namespace aoi
