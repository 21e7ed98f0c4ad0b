#include "aoi/closed_form.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace aoi {

std::string_view cost_source_name(CostSource source) {
    switch (source) {
        case CostSource::closed_form: return "closed_form";
        case CostSource::chain_oracle: return "chain_oracle";
        case CostSource::simulation: return "simulation";
        case CostSource::rvi: return "rvi";
    }
    return "unknown";
}

std::size_t l_index(const DistortionSpec& spec, Age k) { return spec.interval_of(k) + 2; }

CoefficientSet::CoefficientSet(const SystemParams& params, double beta) : beta_(beta) {
    const auto& spec = params.distortion();
    const std::size_t L = spec.interval_count();
    const int M = params.sensor_count();
    const double p = params.erasure();

    tail_.resize(static_cast<std::size_t>(M) + 1);
    for (int r = 0; r <= M; ++r) tail_[static_cast<std::size_t>(r)] = params.tail_probability(r);

    level_tail_.resize(L);
    no_reset_.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
        level_tail_[l] = tail_[static_cast<std::size_t>(spec.level(l))];
        if (level_tail_[l] <= 0.0) {
            std::ostringstream os;
            os << "distortion level " << l + 1 << " (h=" << spec.level(l)
               << ") can never be met: P(samples >= " << spec.level(l) << ") = 0";
            throw Error(ErrorCode::unreachable_level, os.str());
        }
        no_reset_[l] = 1.0 - (1.0 - p) * level_tail_[l];
    }

    crossing_.assign(L, 0.0);
    for (std::size_t l = 0; l + 1 < L; ++l) {
        const auto width = static_cast<double>(spec.breakpoint(l + 1) - spec.breakpoint(l));
        crossing_[l] = std::pow(no_reset_[l], width);
    }

    // Suffix sums over intervals j = n..L-1 weighted by chain_weight(n, j),
    // built backwards with S(n) = X(n) + crossing(n) * S(n+1).
    age_offset_.assign(L, 0.0);
    mass_offset_.assign(L, 0.0);
    energy_offset_.assign(L, 0.0);
    double age_sum = 0.0;
    double mass_sum = 0.0;
    double energy_sum = 0.0;
    for (std::size_t j = L; j-- > 1;) {
        const bool bounded = j + 1 < L;
        const double b = no_reset_[j];
        const double inv = 1.0 / (1.0 - b);
        const double reward = beta * level_tail_[j];
        const auto start = static_cast<double>(spec.breakpoint(j));
        const double cross = bounded ? crossing_[j] : 0.0;
        const double end = bounded ? static_cast<double>(spec.breakpoint(j + 1)) : 0.0;

        const double age_term =
            (1.0 - cross * (1.0 + (end - 1.0 + reward) * (1.0 - b))) * inv * inv + (start - 1.0 + reward) * inv;
        const double mass_term = (1.0 - cross) * inv;

        age_sum = age_term + cross * age_sum;
        mass_sum = mass_term + cross * mass_sum;
        energy_sum = level_tail_[j] * mass_term + cross * energy_sum;

        const double prev_inv = 1.0 / (1.0 - no_reset_[j - 1]);
        const double prev_reward = beta * level_tail_[j - 1];
        age_offset_[j] = -prev_inv * prev_inv - (start - 1.0 + prev_reward) * prev_inv + age_sum;
        mass_offset_[j] = -prev_inv + mass_sum;
        energy_offset_[j] = -level_tail_[j - 1] * prev_inv + energy_sum;
    }

    head_offset_.assign(L + 1, 0.0);
    for (std::size_t n = 1; n <= L; ++n) {
        const double inv = 1.0 / (1.0 - no_reset_[n - 1]);
        head_offset_[n] = inv * inv + (-1.0 + beta * level_tail_[n - 1]) * inv;
    }
}

double CoefficientSet::chain_weight(std::size_t i, std::size_t j) const {
    double w = 1.0;
    for (std::size_t v = i; v < j; ++v) w *= crossing_.at(v);
    return w;
}

ThresholdCost evaluate_threshold(const SystemParams& params, const CoefficientSet& coeffs, Age k) {
    if (k < 1) throw Error(ErrorCode::validation, "threshold must be at least 1");
    const auto& spec = params.distortion();
    const std::size_t current = spec.interval_of(k);
    const std::size_t next = current + 1;
    const bool has_next = next < spec.interval_count();

    const double b = coeffs.no_reset(current);
    const double inv = 1.0 / (1.0 - b);
    const auto kd = static_cast<double>(k);
    const double decay = has_next ? std::pow(b, static_cast<double>(spec.breakpoint(next) - k)) : 0.0;

    ThresholdCost cost;
    cost.numerator = 0.5 * kd * kd - 0.5 * kd + kd * inv + coeffs.head_offset(next);
    cost.denominator = kd - 1.0 + inv;
    cost.energy_numerator = coeffs.level_tail(current) * inv;
    if (has_next) {
        cost.numerator += coeffs.age_offset(next) * decay;
        cost.denominator += coeffs.mass_offset(next) * decay;
        cost.energy_numerator += coeffs.energy_offset(next) * decay;
    }
    return cost;
}

CostReport make_report(const ThresholdCost& cost, Age k, double beta) {
    CostReport report;
    report.lagrangian_cost = cost.lagrangian_cost();
    report.avg_energy = cost.avg_energy();
    report.avg_age = report.lagrangian_cost - beta * report.avg_energy;
    report.threshold = k;
    report.beta = beta;
    report.source = CostSource::closed_form;
    return report;
}

CostReport avg_lagrangian_cost(const SystemParams& params, Age k, double beta) {
    const CoefficientSet coeffs(params, beta);
    return make_report(evaluate_threshold(params, coeffs, k), k, beta);
}

double avg_energy(const SystemParams& params, Age k) {
    const CoefficientSet coeffs(params, 0.0);
    return evaluate_threshold(params, coeffs, k).avg_energy();
}

namespace {

// Smallest integer y >= 0 with H(y) >= 0, where
//   H(k) = k^2/2 + (1/2 + b/(1-b)) k - beta*W/(1-b)
// is the sign of the forward difference of the cost on the unbounded last
// interval (no-reset probability b, per-slot success probability W).
Age tail_optimum(double no_reset, double level_tail, double beta) {
    const double inv = 1.0 / (1.0 - no_reset);
    const double linear = 0.5 + no_reset * inv;
    const double constant = beta * level_tail * inv;
    auto H = [&](double k) { return 0.5 * k * k + linear * k - constant; };

    if (constant <= 0.0) return 0;
    // positive root of H, written without the cancelling subtraction
    const double sigma = 2.0 * constant / (linear + std::sqrt(linear * linear + 2.0 * constant));
    if (!(sigma < 1e15)) throw Error(ErrorCode::validation, "optimal threshold overflows the age type");

    auto y = static_cast<Age>(std::ceil(sigma));
    while (y > 0 && H(static_cast<double>(y - 1)) >= 0.0) --y;
    while (H(static_cast<double>(y)) < 0.0) ++y;
    return y;
}

}  // namespace

Age k_ub(const SystemParams& params, const CoefficientSet& coeffs) {
    const auto& spec = params.distortion();
    const std::size_t last = spec.interval_count() - 1;
    const Age y = tail_optimum(coeffs.no_reset(last), coeffs.level_tail(last), coeffs.beta());
    return std::max(spec.last_breakpoint(), y);
}

Age k_ub(const SystemParams& params, double beta) { return k_ub(params, CoefficientSet(params, beta)); }

Age constant_threshold(double beta, double W, double p) {
    if (!(W > 0.0 && W <= 1.0)) throw Error(ErrorCode::validation, "W must lie in (0,1]");
    if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCode::validation, "p must lie in [0,1)");
    const double R = 1.0 - (1.0 - p) * W;
    return std::max<Age>(1, tail_optimum(R, W, beta));
}

std::vector<Age> monotonicity_probe(double beta, double W, double p, ProbeAxis axis,
                                    const std::vector<double>& grid) {
    std::vector<Age> out;
    out.reserve(grid.size());
    for (double v : grid) {
        switch (axis) {
            case ProbeAxis::p: out.push_back(constant_threshold(beta, W, v)); break;
            case ProbeAxis::W: out.push_back(constant_threshold(beta, v, p)); break;
            case ProbeAxis::beta: out.push_back(constant_threshold(v, W, p)); break;
        }
    }
    return out;
}

}  // namespace aoi
