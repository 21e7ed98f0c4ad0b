#include "aoi/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace aoi {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::validation: return "VALIDATION";
        case ErrorCode::unreachable_level: return "UNREACHABLE_LEVEL";
        case ErrorCode::no_bracket: return "NO_BRACKET";
        case ErrorCode::non_convergence: return "NON_CONVERGENCE";
        case ErrorCode::config: return "CONFIG";
        case ErrorCode::io: return "IO";
    }
    return "UNKNOWN";
}

int error_exit_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::validation: return 2;
        case ErrorCode::unreachable_level: return 3;
        case ErrorCode::no_bracket: return 4;
        case ErrorCode::non_convergence: return 5;
        case ErrorCode::config: return 6;
        case ErrorCode::io: return 7;
    }
    return 1;
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::validation, what); }

}  // namespace

DistortionSpec::DistortionSpec(std::vector<Age> breakpoints, std::vector<int> levels, int sensor_count)
    : breakpoints_(std::move(breakpoints)), levels_(std::move(levels)), sensor_count_(sensor_count) {
    if (sensor_count_ < 1) invalid("sensor count M must be positive");
    if (breakpoints_.empty()) invalid("distortion needs at least one interval");
    if (breakpoints_.size() != levels_.size())
        invalid("distortion breakpoints and levels must have equal length");
    if (breakpoints_.front() != 1) invalid("first distortion breakpoint must be 1");
    for (std::size_t l = 1; l < breakpoints_.size(); ++l) {
        if (breakpoints_[l] <= breakpoints_[l - 1])
            invalid("distortion breakpoints must be strictly increasing");
        if (levels_[l] <= levels_[l - 1]) invalid("distortion levels must be strictly increasing");
    }
    if (levels_.front() < 1) invalid("distortion levels must be at least 1");
    if (levels_.back() > sensor_count_) invalid("distortion levels must not exceed M");
}

DistortionSpec DistortionSpec::constant(int level, int sensor_count) {
    return DistortionSpec({1}, {level}, sensor_count);
}

std::size_t DistortionSpec::interval_of(Age age) const {
    // upper_bound gives the first breakpoint strictly greater than age
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), age);
    if (it == breakpoints_.begin()) invalid("age must be at least 1");
    return static_cast<std::size_t>(std::distance(breakpoints_.begin(), it) - 1);
}

bool is_admissible(const DistortionSpec& spec, const State& state, Action action) {
    if (action == Action::suspend) return true;
    return state.samples >= spec.at(state.age);
}

void MixturePolicy::validate() const {
    if (!(mix_prob >= 0.0 && mix_prob <= 1.0)) invalid("mixture probability must lie in [0,1]");
    if (beta_minus > beta_plus) invalid("beta_minus must not exceed beta_plus");
    if (low_policy.threshold < 1 || high_policy.threshold < 1) invalid("thresholds must be >= 1");
}

std::vector<double> pmf_from_erasures(std::span<const double> erasures) {
    std::vector<double> pmf{1.0};
    pmf.reserve(erasures.size() + 1);
    for (double q : erasures) {
        if (!(q >= 0.0 && q <= 1.0)) invalid("sensor erasure probabilities must lie in [0,1]");
        // one more sensor: count stays with prob q, moves up with prob 1-q
        pmf.push_back(0.0);
        for (std::size_t j = pmf.size() - 1; j > 0; --j) pmf[j] = pmf[j] * q + pmf[j - 1] * (1.0 - q);
        pmf[0] *= q;
    }
    return pmf;
}

SystemParams::SystemParams(double erasure, std::vector<double> pmf, DistortionSpec distortion, double e_max)
    : erasure_(erasure), pmf_(std::move(pmf)), distortion_(std::move(distortion)), e_max_(e_max) {
    if (!(erasure_ >= 0.0 && erasure_ < 1.0)) invalid("erasure probability p must lie in [0,1)");
    if (!(e_max_ > 0.0 && e_max_ <= 1.0)) invalid("energy budget e_max must lie in (0,1]");
    const auto m = static_cast<std::size_t>(distortion_.sensor_count());
    if (pmf_.size() != m + 1) {
        std::ostringstream os;
        os << "pmf length " << pmf_.size() << " does not equal M+1 = " << m + 1;
        invalid(os.str());
    }
    for (double v : pmf_)
        if (!(v >= 0.0) || !std::isfinite(v)) invalid("pmf entries must be finite and nonnegative");
    const double total = std::accumulate(pmf_.begin(), pmf_.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "pmf must sum to 1 (got " << total << ")";
        invalid(os.str());
    }
}

double SystemParams::tail_probability(int r) const {
    if (r <= 0) return 1.0;
    if (r > sensor_count()) return 0.0;
    double sum = 0.0;
    for (std::size_t j = pmf_.size(); j-- > static_cast<std::size_t>(r);) sum += pmf_[j];
    return sum;
}

SystemParams SystemParams::with_erasure(double p) const { return {p, pmf_, distortion_, e_max_}; }

SystemParams SystemParams::with_pmf(std::vector<double> pmf) const {
    return {erasure_, std::move(pmf), distortion_, e_max_};
}

SystemParams SystemParams::with_e_max(double e_max) const { return {erasure_, pmf_, distortion_, e_max}; }

}  // namespace aoi
