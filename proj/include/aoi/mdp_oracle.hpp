#pragma once

// Reference MDP solvers on an age-truncated state space. The "age + 1"
// transition saturates at the cap, which keeps the chain stochastic; this is
// the only difference from the unbounded model.

#include <cstdint>
#include <optional>
#include <vector>

#include "aoi/model.hpp"

namespace aoi::mdp {

class TruncatedMdp {
public:
    /// age_cap defaults to 8 * delta_L; must be at least 4 * delta_L.
    TruncatedMdp(SystemParams params, double beta, std::optional<Age> age_cap = std::nullopt);

    const SystemParams& params() const noexcept { return params_; }
    double beta() const noexcept { return beta_; }
    Age age_cap() const noexcept { return age_cap_; }
    int sensor_count() const noexcept { return params_.sensor_count(); }

    std::size_t state_count() const noexcept;
    std::size_t index(Age age, int samples) const noexcept;
    Age successor_age(Age age) const noexcept { return age < age_cap_ ? age + 1 : age_cap_; }

private:
    SystemParams params_;
    double beta_;
    Age age_cap_;
};

/// Table over (age, samples), age in 1..cap, samples in 0..M, row-major by age.
struct StateTable {
    Age age_cap = 0;
    int sensor_count = 0;
    std::vector<double> values;

    double at(Age age, int samples) const {
        return values[static_cast<std::size_t>(age - 1) * static_cast<std::size_t>(sensor_count + 1) +
                      static_cast<std::size_t>(samples)];
    }
};

struct ValueFunction {
    StateTable table;
    std::optional<double> discount;  // empty for average-cost bias tables
};

struct PolicyTable {
    Age age_cap = 0;
    int sensor_count = 0;
    std::vector<Action> actions;

    Action at(Age age, int samples) const {
        return actions[static_cast<std::size_t>(age - 1) * static_cast<std::size_t>(sensor_count + 1) +
                       static_cast<std::size_t>(samples)];
    }
};

struct DiscountedSolution {
    ValueFunction value;
    PolicyTable policy;
    StateTable q_suspend;
    StateTable q_transmit;  // +inf where transmission is inadmissible
    std::int64_t iterations = 0;
};

inline constexpr std::int64_t kDefaultMaxIterations = 5'000'000;

/// Value iteration from V_0 = 0, stopped when the sup-norm step is at most
/// tol * (1 - alpha) / (2 alpha). Greedy ties go to suspension.
DiscountedSolution discounted_vi(const TruncatedMdp& mdp, double alpha, double tol,
                                 std::int64_t max_iterations = kDefaultMaxIterations);

struct RviSolution {
    double average_cost = 0.0;
    ValueFunction bias;
    PolicyTable policy;
    std::int64_t iterations = 0;
};

/// Relative value iteration with reference state (1, M) on the aperiodic
/// transform P' = (1 - tau) I + tau P (tau = 1/2). Stops when the span of
/// the Bellman residual is at most tol; throws Error(non_convergence) after
/// max_iterations.
RviSolution rvi(const TruncatedMdp& mdp, double tol, std::int64_t max_iterations = kDefaultMaxIterations);

struct ThresholdExtraction {
    bool structured = false;
    Age threshold = 0;  // age_cap + 1 when the policy never transmits
    std::optional<State> violation;   // state whose action breaks the rule
    std::optional<State> reference;   // state fixing the common threshold
};

/// Checks that the admissible transmit set is {age >= k} for one common k
/// across all sample counts.
ThresholdExtraction extract_threshold(const PolicyTable& policy, const DistortionSpec& spec);

}  // namespace aoi::mdp
