#pragma once

// Closed-form long-run cost of threshold policies.
//
// Interval indices in this header follow the model's 0-based convention.
// l_index() is the exception: it returns the 1-based "next interval" index
// l_k in {2, ..., L+1} because that is the quantity callers reason about.

#include <string_view>
#include <vector>

#include "aoi/model.hpp"

namespace aoi {

enum class CostSource { closed_form, chain_oracle, simulation, rvi };

std::string_view cost_source_name(CostSource source);

struct CostReport {
    double lagrangian_cost = 0.0;
    double avg_energy = 0.0;
    double avg_age = 0.0;
    Age threshold = 1;
    double beta = 0.0;
    CostSource source = CostSource::closed_form;
};

/// l_k = min{ l <= L+1 : delta_l > k } (1-based, delta_{L+1} = infinity).
std::size_t l_index(const DistortionSpec& spec, Age k);

/**
 * Per-(params, beta) coefficient family of the threshold cost formula.
 *
 * Vectors are indexed by 0-based interval. For an interval n >= 1 the
 * offsets describe the contribution of intervals n..L-1 when the threshold
 * lies in interval n-1; entry 0 of each offset vector is unused.
 */
class CoefficientSet {
public:
    /// Throws Error(unreachable_level) if some level has zero tail mass.
    CoefficientSet(const SystemParams& params, double beta);

    double beta() const noexcept { return beta_; }

    /// P(samples >= r) for r = 0..M.
    double tail(int r) const { return tail_.at(static_cast<std::size_t>(r)); }
    /// P(samples >= h_l): the per-slot chance the requirement of interval l is met.
    double level_tail(std::size_t l) const { return level_tail_[l]; }
    /// Per-slot probability that the age is not reset while in interval l (ages >= threshold).
    double no_reset(std::size_t l) const { return no_reset_[l]; }
    /// Probability of crossing interval l (l < L-1) entirely without a reset.
    double crossing(std::size_t l) const { return crossing_[l]; }
    /// Probability of crossing intervals i..j-1 without a reset (1 when i >= j).
    double chain_weight(std::size_t i, std::size_t j) const;

    double age_offset(std::size_t n) const { return age_offset_[n]; }
    double mass_offset(std::size_t n) const { return mass_offset_[n]; }
    double energy_offset(std::size_t n) const { return energy_offset_[n]; }
    /// Head term for a threshold whose next interval is n (n = 1..L).
    double head_offset(std::size_t n) const { return head_offset_[n]; }

private:
    double beta_;
    std::vector<double> tail_;
    std::vector<double> level_tail_;
    std::vector<double> no_reset_;
    std::vector<double> crossing_;
    std::vector<double> age_offset_;
    std::vector<double> mass_offset_;
    std::vector<double> energy_offset_;
    std::vector<double> head_offset_;
};

/// Threshold cost terms evaluated against a precomputed coefficient set.
struct ThresholdCost {
    double numerator = 0.0;
    double denominator = 0.0;   // expected renewal-cycle length
    double energy_numerator = 0.0;

    double lagrangian_cost() const { return numerator / denominator; }
    double avg_energy() const { return energy_numerator / denominator; }
};

ThresholdCost evaluate_threshold(const SystemParams& params, const CoefficientSet& coeffs, Age k);

/// Full report for threshold k; avg_age is derived as cost - beta * energy.
CostReport make_report(const ThresholdCost& cost, Age k, double beta);

CostReport avg_lagrangian_cost(const SystemParams& params, Age k, double beta);
double avg_energy(const SystemParams& params, Age k);

/// Best threshold restricted to ages >= last breakpoint.
Age k_ub(const SystemParams& params, double beta);
Age k_ub(const SystemParams& params, const CoefficientSet& coeffs);

/// Optimal threshold under a constant requirement whose per-slot success
/// probability is W and whose link erasure probability is p.
Age constant_threshold(double beta, double W, double p);

enum class ProbeAxis { p, W, beta };

/// constant_threshold evaluated along `grid` on one axis, the other two
/// arguments held fixed.
std::vector<Age> monotonicity_probe(double beta, double W, double p, ProbeAxis axis,
                                    const std::vector<double>& grid);

}  // namespace aoi
