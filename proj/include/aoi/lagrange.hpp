#pragma once

// Multiplier bisection for the energy-constrained problem and assembly of the
// randomized two-threshold policy.

#include <vector>

#include "aoi/model.hpp"

namespace aoi {

inline constexpr double kDefaultEpsilon = 1e-6;
inline constexpr int kMaxDoublings = 64;

struct BisectionStep {
    double beta = 0.0;
    Age k_star = 1;
    double energy = 0.0;
};

struct BisectionTrace {
    std::vector<BisectionStep> iterations;
    double beta_minus = 0.0;
    double beta_plus = 0.0;
    double epsilon = kDefaultEpsilon;
};

struct BetaBracket {
    double beta_lo = 0.0;
    double beta_hi = 0.0;
    int doublings = 0;
};

/// beta_lo = 0; beta_hi doubles from 1 until the optimal threshold at beta_hi
/// meets the energy budget. Throws Error(no_bracket) after kMaxDoublings.
BetaBracket bracket_beta(const SystemParams& params);

struct BisectionResult {
    MixturePolicy policy;
    BisectionTrace trace;
    double energy_low = 0.0;    // energy of the beta_minus threshold
    double energy_high = 0.0;   // energy of the beta_plus threshold
    double raw_mix_prob = 1.0;  // interpolation factor before clamping
    bool slack = false;         // budget inactive at beta = 0
    bool clamp_diagnostic = false;  // raw factor left [0,1] by more than 1e-6
};

/// Linear interpolation factor mu = (E_max - E_high) / (E_low - E_high);
/// 1 when the two energies coincide. Not clamped.
double interpolation_factor(double e_max, double energy_low, double energy_high);

BisectionResult bisect(const SystemParams& params, double epsilon = kDefaultEpsilon);

/// Long-run energy and age of the mixture under delivery-renewal
/// re-randomization, assembled from the per-cycle moments of each policy.
double mixture_energy(const SystemParams& params, const MixturePolicy& policy);
double mixture_age(const SystemParams& params, const MixturePolicy& policy);

}  // namespace aoi
