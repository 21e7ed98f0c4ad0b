#include "aoi/chain_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "aoi/parallel.hpp"
#include "aoi/rng.hpp"

namespace aoi::chain {

namespace {

// Neumaier-compensated running sum.
class Accumulator {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            carry_ += (sum_ - t) + x;
        else
            carry_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

// P(samples >= h_l) for every interval, straight from the pmf.
std::vector<double> level_masses(const SystemParams& params) {
    const auto& spec = params.distortion();
    const auto pmf = params.pmf();
    std::vector<double> out(spec.interval_count());
    for (std::size_t l = 0; l < out.size(); ++l) {
        double mass = 0.0;
        for (auto j = static_cast<std::size_t>(spec.level(l)); j < pmf.size(); ++j) mass += pmf[j];
        if (mass <= 0.0) {
            std::ostringstream os;
            os << "distortion level " << l + 1 << " (h=" << spec.level(l) << ") can never be met";
            throw Error(ErrorCode::unreachable_level, os.str());
        }
        out[l] = mass;
    }
    return out;
}

// Transmission probability in one slot at `age` under threshold k.
double send_probability(const DistortionSpec& spec, const std::vector<double>& masses, Age k, Age age) {
    return age >= k ? masses[spec.interval_of(age)] : 0.0;
}

}  // namespace

SteadyState steady_state(const SystemParams& params, Age k, double tail_tol) {
    if (k < 1) throw Error(ErrorCode::validation, "threshold must be at least 1");
    if (!(tail_tol > 0.0)) throw Error(ErrorCode::validation, "tail tolerance must be positive");
    const auto& spec = params.distortion();
    const auto masses = level_masses(params);
    const double p = params.erasure();
    const double ratio = 1.0 - (1.0 - p) * masses.back();
    const Age settled = std::max(k, spec.last_breakpoint());

    // Balance recursion on the aggregated age marginal:
    //   z_{d+1} = z_d * (1 - (1-p) * P(send at d)),  z_1 = 1 before normalization.
    SteadyState st;
    st.threshold = k;
    st.tail_ratio = ratio;
    Accumulator total;
    double z = 1.0;
    for (Age age = 1;; ++age) {
        st.z.push_back(z);
        total.add(z);
        if (age >= settled) {
            const double tail = ratio < 1.0 ? z * ratio / (1.0 - ratio) : 0.0;
            if (tail <= tail_tol * total.value() || age >= kMaxCap) break;
        }
        z *= 1.0 - (1.0 - p) * send_probability(spec, masses, k, age);
    }

    const double tail = st.z.back() * ratio / (1.0 - ratio);
    const double norm = total.value() + tail;
    for (double& v : st.z) v /= norm;
    st.tail_mass = tail / norm;
    return st;
}

CostReport oracle_cost(const SystemParams& params, Age k, double beta, double tail_tol) {
    const auto st = steady_state(params, k, tail_tol);
    const auto& spec = params.distortion();
    const auto masses = level_masses(params);

    Accumulator age_sum;
    Accumulator energy_sum;
    for (Age age = 1; age <= st.cap(); ++age) {
        const double z = st.z[static_cast<std::size_t>(age - 1)];
        age_sum.add(static_cast<double>(age) * z);
        energy_sum.add(send_probability(spec, masses, k, age) * z);
    }
    // geometric tail beyond the cap: z_{cap+n} = z_cap * b^n, every slot sends w.p. F(h_L)
    const double b = st.tail_ratio;
    const double z_cap = st.z.back();
    const double cap = static_cast<double>(st.cap());
    if (b > 0.0) {
        const double r = b / (1.0 - b);
        age_sum.add(z_cap * (cap * r + r / (1.0 - b)));
        energy_sum.add(z_cap * masses.back() * r);
    }

    CostReport report;
    report.avg_age = age_sum.value();
    report.avg_energy = energy_sum.value();
    report.lagrangian_cost = report.avg_age + beta * report.avg_energy;
    report.threshold = k;
    report.beta = beta;
    report.source = CostSource::chain_oracle;
    return report;
}

RenewalCycle renewal_cycle(const SystemParams& params, Age k) {
    const auto st = steady_state(params, k);
    const auto cost = oracle_cost(params, k, 0.0);
    RenewalCycle cycle;
    cycle.length = st.cycle_length();
    cycle.energy = cost.avg_energy * cycle.length;
    cycle.age_sum = cost.avg_age * cycle.length;
    return cycle;
}

double delivery_draw_probability(const SystemParams& params, const MixturePolicy& mixture) {
    mixture.validate();
    const double mu = mixture.mix_prob;
    if (mu <= 0.0) return 0.0;
    if (mu >= 1.0 || mixture.low_policy == mixture.high_policy) return mu;
    const double low_len = steady_state(params, mixture.low_policy.threshold).cycle_length();
    const double high_len = steady_state(params, mixture.high_policy.threshold).cycle_length();
    // time share of the low policy after drawing it w.p. x per cycle:
    //   x T_low / (x T_low + (1-x) T_high) = mu
    return mu * high_len / (mu * high_len + (1.0 - mu) * low_len);
}

// -----------------------------------------------------------------------------
// Simulation
// -----------------------------------------------------------------------------

namespace {

// Precomputed per-slot lookups shared by the simulators.
struct SlotModel {
    std::vector<double> cdf;        // cdf[j] = P(samples <= j)
    std::vector<int> requirement;   // D(age) for age = 1..last breakpoint
    int last_level = 0;
    double erasure = 0.0;

    explicit SlotModel(const SystemParams& params) : erasure(params.erasure()) {
        const auto pmf = params.pmf();
        cdf.resize(pmf.size());
        std::partial_sum(pmf.begin(), pmf.end(), cdf.begin());
        const auto& spec = params.distortion();
        requirement.resize(static_cast<std::size_t>(spec.last_breakpoint()));
        for (Age a = 1; a <= spec.last_breakpoint(); ++a)
            requirement[static_cast<std::size_t>(a - 1)] = spec.at(a);
        last_level = spec.levels().back();
    }

    int required(Age age) const {
        return age <= static_cast<Age>(requirement.size()) ? requirement[static_cast<std::size_t>(age - 1)]
                                                           : last_level;
    }

    int draw_samples(Rng& rng) const {
        const double u = rng.uniform();
        const int last = static_cast<int>(cdf.size()) - 1;
        int j = 0;
        while (j < last && u >= cdf[static_cast<std::size_t>(j)]) ++j;
        return j;
    }
};

// Accumulates the time series and final statistics of one run.
class RunRecorder {
public:
    RunRecorder(std::int64_t horizon, std::uint64_t seed, int windows) : horizon_(horizon) {
        result_.horizon = horizon;
        result_.seed = seed;
        result_.rng_algorithm = std::string(Rng::algorithm);
        const auto count = std::clamp<std::int64_t>(windows, 1, horizon);
        window_len_ = horizon / count;
        windows_ = count;
    }

    void record(Age age, bool transmitted) {
        window_age_ += age;
        window_energy_ += transmitted ? 1 : 0;
        ++in_window_;
        if (in_window_ == window_len_ && static_cast<std::int64_t>(result_.windows.size()) + 1 < windows_) flush();
    }

    SimResult finish(std::int64_t deliveries, double peak_excess) {
        if (in_window_ > 0) flush();
        result_.deliveries = deliveries;
        result_.peak_budget_excess = peak_excess;
        result_.empirical_avg_age = static_cast<double>(total_age_) / static_cast<double>(horizon_);
        result_.empirical_avg_energy = static_cast<double>(total_energy_) / static_cast<double>(horizon_);
        const auto n = result_.windows.size();
        if (n >= 2) {
            double va = 0.0;
            double ve = 0.0;
            for (const auto& w : result_.windows) {
                va += (w.avg_age - result_.empirical_avg_age) * (w.avg_age - result_.empirical_avg_age);
                ve += (w.avg_energy - result_.empirical_avg_energy) * (w.avg_energy - result_.empirical_avg_energy);
            }
            const double dn = static_cast<double>(n);
            result_.age_std_error = std::sqrt(va / (dn - 1.0) / dn);
            result_.energy_std_error = std::sqrt(ve / (dn - 1.0) / dn);
        }
        return std::move(result_);
    }

private:
    void flush() {
        const auto len = static_cast<double>(in_window_);
        result_.windows.push_back({static_cast<double>(window_age_) / len, static_cast<double>(window_energy_) / len});
        total_age_ += window_age_;
        total_energy_ += window_energy_;
        window_age_ = 0;
        window_energy_ = 0;
        in_window_ = 0;
    }

    std::int64_t horizon_;
    std::int64_t window_len_ = 1;
    std::int64_t windows_ = 1;
    std::int64_t in_window_ = 0;
    std::int64_t window_age_ = 0;
    std::int64_t window_energy_ = 0;
    std::int64_t total_age_ = 0;
    std::int64_t total_energy_ = 0;
    SimResult result_;
};

// Shared slot loop. `decide(age, samples, t, transmissions)` returns whether to
// transmit; `on_delivery()` runs after every successful delivery.
template <typename Decide, typename OnDelivery>
SimResult run_slots(const SystemParams& params, std::int64_t horizon, std::uint64_t seed, int windows,
                    Rng& rng, Decide&& decide, OnDelivery&& on_delivery) {
    if (horizon < 1) throw Error(ErrorCode::validation, "horizon must be at least 1");
    const SlotModel slots(params);
    RunRecorder recorder(horizon, seed, windows);
    const double success = 1.0 - slots.erasure;
    const double e_max = params.e_max();

    Age age = 1;
    std::int64_t transmissions = 0;
    std::int64_t deliveries = 0;
    double peak_excess = -std::numeric_limits<double>::infinity();
    for (std::int64_t t = 1; t <= horizon; ++t) {
        if (t > 1) peak_excess = std::max(peak_excess, static_cast<double>(transmissions) - e_max * double(t - 1));
        const int samples = slots.draw_samples(rng);
        const bool send = samples >= slots.required(age) && decide(age, t, transmissions);
        recorder.record(age, send);
        if (send) {
            ++transmissions;
            if (rng.uniform() < success) {
                ++deliveries;
                age = 1;
                on_delivery();
                continue;
            }
        }
        ++age;
    }
    if (horizon == 1) peak_excess = 0.0;
    return recorder.finish(deliveries, peak_excess);
}

}  // namespace

SimResult simulate(const SystemParams& params, const SimPolicy& policy, std::int64_t horizon, std::uint64_t seed,
                   int windows) {
    Rng rng(seed);
    if (const auto* single = std::get_if<ThresholdPolicy>(&policy)) {
        const Age k = single->threshold;
        return run_slots(
            params, horizon, seed, windows, rng, [k](Age age, std::int64_t, std::int64_t) { return age >= k; },
            [] {});
    }

    const auto& mixture = std::get<MixturePolicy>(policy);
    const double draw = delivery_draw_probability(params, mixture);
    const Age low = mixture.low_policy.threshold;
    const Age high = mixture.high_policy.threshold;
    // the policy draw uses its own stream so the slot stream is unchanged
    Rng draw_rng = rng.split(1);
    Age active = draw_rng.uniform() < draw ? low : high;
    return run_slots(
        params, horizon, seed, windows, rng, [&active](Age age, std::int64_t, std::int64_t) { return age >= active; },
        [&] { active = draw_rng.uniform() < draw ? low : high; });
}

SimResult greedy_simulate(const SystemParams& params, std::int64_t horizon, std::uint64_t seed, int windows) {
    Rng rng(seed);
    const double e_max = params.e_max();
    return run_slots(
        params, horizon, seed, windows, rng,
        [e_max](Age, std::int64_t t, std::int64_t transmissions) {
            // e_t/(t-1) < E_max, with the first slot treated as within budget;
            // E_max = 1 can never bind since e_t <= t-1
            return t == 1 || e_max >= 1.0 || static_cast<double>(transmissions) < e_max * static_cast<double>(t - 1);
        },
        [] {});
}

SimSummary summarize(std::span<const SimResult> runs) {
    SimSummary s;
    s.runs = runs.size();
    if (runs.empty()) return s;
    double age = 0.0;
    double energy = 0.0;
    for (const auto& r : runs) {
        s.total_slots += r.horizon;
        age += r.empirical_avg_age * static_cast<double>(r.horizon);
        energy += r.empirical_avg_energy * static_cast<double>(r.horizon);
    }
    const auto total = static_cast<double>(s.total_slots);
    s.avg_age = age / total;
    s.avg_energy = energy / total;
    if (runs.size() >= 2) {
        double va = 0.0;
        double ve = 0.0;
        for (const auto& r : runs) {
            va += (r.empirical_avg_age - s.avg_age) * (r.empirical_avg_age - s.avg_age);
            ve += (r.empirical_avg_energy - s.avg_energy) * (r.empirical_avg_energy - s.avg_energy);
        }
        const auto n = static_cast<double>(runs.size());
        s.age_std_error = std::sqrt(va / (n - 1.0) / n);
        s.energy_std_error = std::sqrt(ve / (n - 1.0) / n);
    } else {
        s.age_std_error = runs.front().age_std_error;
        s.energy_std_error = runs.front().energy_std_error;
    }
    return s;
}

std::vector<SimResult> simulate_seeds(const SystemParams& params, const SimPolicy& policy, std::int64_t horizon,
                                      std::uint64_t base_seed, int seeds, int threads) {
    std::vector<SimResult> out(static_cast<std::size_t>(std::max(0, seeds)));
    parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = simulate(params, policy, horizon, base_seed + i); });
    return out;
}

std::vector<SimResult> greedy_seeds(const SystemParams& params, std::int64_t horizon, std::uint64_t base_seed,
                                    int seeds, int threads) {
    std::vector<SimResult> out(static_cast<std::size_t>(std::max(0, seeds)));
    parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = greedy_simulate(params, horizon, base_seed + i); });
    return out;
}

}  // namespace aoi::chain
