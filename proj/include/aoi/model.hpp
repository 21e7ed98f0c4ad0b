#pragma once

// System model shared by every solver: the age-dependent distortion
// requirement, the distribution of the per-slot sample count, and the
// policy types produced by the threshold and multiplier searches.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aoi {

using Age = std::int64_t;

enum class ErrorCode {
    validation,
    unreachable_level,
    no_bracket,
    non_convergence,
    config,
    io,
};

/// Stable upper-case identifier printed by the CLI, e.g. "UNREACHABLE_LEVEL".
std::string_view error_code_name(ErrorCode code);

/// Process exit status associated with an error code (always nonzero).
int error_exit_status(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// -----------------------------------------------------------------------------
// Distortion requirement
// -----------------------------------------------------------------------------

/**
 * Piecewise-constant map from the current age to the minimum number of
 * received measurements an update must carry.
 *
 * Interval l (0-based here) covers ages [breakpoints[l], breakpoints[l+1]);
 * the last interval is unbounded. The first breakpoint is always 1.
 */
class DistortionSpec {
public:
    DistortionSpec(std::vector<Age> breakpoints, std::vector<int> levels, int sensor_count);

    /// Single-interval requirement D(age) = level for every age.
    static DistortionSpec constant(int level, int sensor_count);

    std::size_t interval_count() const noexcept { return breakpoints_.size(); }
    int sensor_count() const noexcept { return sensor_count_; }

    std::span<const Age> breakpoints() const noexcept { return breakpoints_; }
    std::span<const int> levels() const noexcept { return levels_; }

    Age breakpoint(std::size_t interval) const { return breakpoints_.at(interval); }
    int level(std::size_t interval) const { return levels_.at(interval); }

    /// Left edge of the last (unbounded) interval.
    Age last_breakpoint() const noexcept { return breakpoints_.back(); }

    /// 0-based index of the interval containing `age`.
    std::size_t interval_of(Age age) const;

    /// Minimum sample count required at `age` (age >= 1).
    int at(Age age) const { return levels_[interval_of(age)]; }

private:
    std::vector<Age> breakpoints_;
    std::vector<int> levels_;
    int sensor_count_;
};

inline int distortion_at(const DistortionSpec& spec, Age age) { return spec.at(age); }

// -----------------------------------------------------------------------------
// States and policies
// -----------------------------------------------------------------------------

struct State {
    Age age = 1;
    int samples = 0;
};

enum class Action : std::uint8_t { suspend = 0, transmit = 1 };

/// Suspension is always admissible; transmission needs samples >= D(age).
bool is_admissible(const DistortionSpec& spec, const State& state, Action action);

struct ThresholdPolicy {
    Age threshold = 1;

    /// Decision of the threshold rule in `state`.
    bool transmits(const DistortionSpec& spec, const State& state) const {
        return state.age >= threshold && state.samples >= spec.at(state.age);
    }

    friend bool operator==(const ThresholdPolicy&, const ThresholdPolicy&) = default;
};

/**
 * Randomization between the optimal thresholds at the two ends of the final
 * multiplier bracket.
 *
 * `mix_prob` is the long-run share of time spent following `low_policy`
 * (the beta_minus policy). The active threshold is re-drawn after every
 * successful delivery; see chain::delivery_draw_probability for the
 * per-delivery probability that realizes this share.
 */
struct MixturePolicy {
    ThresholdPolicy low_policy;
    ThresholdPolicy high_policy;
    double mix_prob = 1.0;
    double beta_minus = 0.0;
    double beta_plus = 0.0;

    void validate() const;
};

// -----------------------------------------------------------------------------
// System parameters
// -----------------------------------------------------------------------------

/// Exact Poisson-binomial pmf of the number of delivered measurements when
/// sensor m is erased independently with probability erasures[m].
std::vector<double> pmf_from_erasures(std::span<const double> erasures);

class SystemParams {
public:
    /// Throws Error(validation) when any invariant is violated.
    SystemParams(double erasure, std::vector<double> pmf, DistortionSpec distortion, double e_max);

    double erasure() const noexcept { return erasure_; }
    std::span<const double> pmf() const noexcept { return pmf_; }
    const DistortionSpec& distortion() const noexcept { return distortion_; }
    double e_max() const noexcept { return e_max_; }
    int sensor_count() const noexcept { return distortion_.sensor_count(); }

    /// P(samples >= r); 1 for r <= 0, 0 for r > M.
    double tail_probability(int r) const;

    SystemParams with_erasure(double p) const;
    SystemParams with_pmf(std::vector<double> pmf) const;
    SystemParams with_e_max(double e_max) const;

private:
    double erasure_;
    std::vector<double> pmf_;
    DistortionSpec distortion_;
    double e_max_;
};

}  // namespace aoi
