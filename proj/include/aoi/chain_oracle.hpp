#pragma once

// Independent verification path for threshold policies: the stationary age
// distribution solved numerically from the balance recursions, and a
// slot-level Monte Carlo simulator (including the budget-tracking greedy
// baseline). Nothing here reuses the closed-form coefficient code.

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "aoi/closed_form.hpp"
#include "aoi/model.hpp"

namespace aoi::chain {

inline constexpr double kDefaultTailTol = 1e-12;
inline constexpr Age kMaxCap = 5'000'000;

/**
 * Stationary age distribution z[d-1] = P(age = d) for d = 1..cap().
 * Beyond cap() the distribution is geometric with ratio tail_ratio, and its
 * total mass is tail_mass; both enter the oracle sums analytically.
 */
struct SteadyState {
    std::vector<double> z;
    double tail_mass = 0.0;
    double tail_ratio = 0.0;
    Age threshold = 1;

    Age cap() const noexcept { return static_cast<Age>(z.size()); }
    /// Expected time between successful deliveries.
    double cycle_length() const { return 1.0 / z.front(); }
};

/// Extends the recursion until the residual tail mass drops below tail_tol
/// (or kMaxCap is reached; the tail stays exact either way).
SteadyState steady_state(const SystemParams& params, Age k, double tail_tol = kDefaultTailTol);

CostReport oracle_cost(const SystemParams& params, Age k, double beta, double tail_tol = kDefaultTailTol);

/// Expected length, energy and summed age of one delivery-to-delivery cycle.
struct RenewalCycle {
    double length = 0.0;
    double energy = 0.0;
    double age_sum = 0.0;
};

RenewalCycle renewal_cycle(const SystemParams& params, Age k);

/// Per-delivery probability of activating the low policy such that the
/// long-run share of time under it equals mixture.mix_prob.
double delivery_draw_probability(const SystemParams& params, const MixturePolicy& mixture);

// -----------------------------------------------------------------------------
// Simulation
// -----------------------------------------------------------------------------

struct SimWindow {
    double avg_age = 0.0;
    double avg_energy = 0.0;
};

struct SimResult {
    std::int64_t horizon = 0;
    std::uint64_t seed = 0;
    std::string rng_algorithm;
    double empirical_avg_age = 0.0;
    double empirical_avg_energy = 0.0;
    /// Batch-means standard errors over `windows`.
    double age_std_error = 0.0;
    double energy_std_error = 0.0;
    std::int64_t deliveries = 0;
    /// max over t > 1 of e_t - E_max (t-1), e_t = transmissions before slot t.
    double peak_budget_excess = 0.0;
    std::vector<SimWindow> windows;
};

using SimPolicy = std::variant<ThresholdPolicy, MixturePolicy>;

inline constexpr int kDefaultWindows = 100;

SimResult simulate(const SystemParams& params, const SimPolicy& policy, std::int64_t horizon,
                   std::uint64_t seed, int windows = kDefaultWindows);

/// Transmits whenever the requirement is met and the running energy rate
/// e_t/(t-1) is below E_max (the check passes at t = 1, and always when E_max = 1).
SimResult greedy_simulate(const SystemParams& params, std::int64_t horizon, std::uint64_t seed,
                          int windows = kDefaultWindows);

/// Horizon-weighted merge of independent runs; standard errors come from the
/// spread between runs when there are at least two, else from batch means.
struct SimSummary {
    std::int64_t total_slots = 0;
    std::size_t runs = 0;
    double avg_age = 0.0;
    double avg_energy = 0.0;
    double age_std_error = 0.0;
    double energy_std_error = 0.0;
};

SimSummary summarize(std::span<const SimResult> runs);

/// Runs the simulator on seeds base_seed, base_seed+1, ... in parallel.
std::vector<SimResult> simulate_seeds(const SystemParams& params, const SimPolicy& policy, std::int64_t horizon,
                                      std::uint64_t base_seed, int seeds, int threads);
std::vector<SimResult> greedy_seeds(const SystemParams& params, std::int64_t horizon, std::uint64_t base_seed,
                                    int seeds, int threads);

}  // namespace aoi::chain
