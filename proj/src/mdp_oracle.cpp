#include "aoi/mdp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace aoi::mdp {

TruncatedMdp::TruncatedMdp(SystemParams params, double beta, std::optional<Age> age_cap)
    : params_(std::move(params)), beta_(beta) {
    const Age last = params_.distortion().last_breakpoint();
    age_cap_ = age_cap.value_or(8 * last);
    if (age_cap_ < 4 * last) {
        std::ostringstream os;
        os << "age cap " << age_cap_ << " is below the minimum 4 * delta_L = " << 4 * last;
        throw Error(ErrorCode::validation, os.str());
    }
    if (!(beta_ >= 0.0)) throw Error(ErrorCode::validation, "beta must be nonnegative");
}

std::size_t TruncatedMdp::state_count() const noexcept {
    return static_cast<std::size_t>(age_cap_) * static_cast<std::size_t>(sensor_count() + 1);
}

std::size_t TruncatedMdp::index(Age age, int samples) const noexcept {
    return static_cast<std::size_t>(age - 1) * static_cast<std::size_t>(sensor_count() + 1) +
           static_cast<std::size_t>(samples);
}

namespace {

// One Bellman evaluation of both actions for every state from a value table.
// `discount` is 1 for the average-cost operator.
struct Sweep {
    std::vector<double> expected;    // E_samples V(age, .) for age = 1..cap
    std::vector<int> requirement;    // D(age)

    explicit Sweep(const TruncatedMdp& mdp) {
        const Age cap = mdp.age_cap();
        expected.resize(static_cast<std::size_t>(cap));
        requirement.resize(static_cast<std::size_t>(cap));
        for (Age a = 1; a <= cap; ++a) requirement[static_cast<std::size_t>(a - 1)] = mdp.params().distortion().at(a);
    }

    void update_expectations(const TruncatedMdp& mdp, const std::vector<double>& v) {
        const auto pmf = mdp.params().pmf();
        const std::size_t width = pmf.size();
        for (std::size_t a = 0; a < expected.size(); ++a) {
            double s = 0.0;
            for (std::size_t j = 0; j < width; ++j) s += pmf[j] * v[a * width + j];
            expected[a] = s;
        }
    }

    double q_suspend(const TruncatedMdp& mdp, Age age, double discount) const {
        return static_cast<double>(age) + discount * expected[static_cast<std::size_t>(mdp.successor_age(age) - 1)];
    }

    double q_transmit(const TruncatedMdp& mdp, Age age, double discount) const {
        const double p = mdp.params().erasure();
        return static_cast<double>(age) + mdp.beta() +
               discount * (p * expected[static_cast<std::size_t>(mdp.successor_age(age) - 1)] +
                           (1.0 - p) * expected[0]);
    }

    bool admissible(Age age, int samples) const { return samples >= requirement[static_cast<std::size_t>(age - 1)]; }
};

StateTable make_table(const TruncatedMdp& mdp, std::vector<double> values) {
    return StateTable{mdp.age_cap(), mdp.sensor_count(), std::move(values)};
}

// Greedy policy and Q tables from the current expectations; ties suspend.
void greedy(const TruncatedMdp& mdp, const Sweep& sweep, double discount, PolicyTable& policy,
            std::vector<double>* q0_out, std::vector<double>* q1_out) {
    const int M = mdp.sensor_count();
    policy = PolicyTable{mdp.age_cap(), M, std::vector<Action>(mdp.state_count(), Action::suspend)};
    if (q0_out) q0_out->assign(mdp.state_count(), 0.0);
    if (q1_out) q1_out->assign(mdp.state_count(), std::numeric_limits<double>::infinity());
    for (Age a = 1; a <= mdp.age_cap(); ++a) {
        const double q0 = sweep.q_suspend(mdp, a, discount);
        const double q1 = sweep.q_transmit(mdp, a, discount);
        for (int s = 0; s <= M; ++s) {
            const auto i = mdp.index(a, s);
            const bool ok = sweep.admissible(a, s);
            if (q0_out) (*q0_out)[i] = q0;
            if (q1_out && ok) (*q1_out)[i] = q1;
            if (ok && q1 < q0) policy.actions[i] = Action::transmit;
        }
    }
}

}  // namespace

DiscountedSolution discounted_vi(const TruncatedMdp& mdp, double alpha, double tol, std::int64_t max_iterations) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::validation, "discount must lie in (0,1)");
    if (!(tol > 0.0)) throw Error(ErrorCode::validation, "tolerance must be positive");
    const int M = mdp.sensor_count();
    const double stop = tol * (1.0 - alpha) / (2.0 * alpha);

    Sweep sweep(mdp);
    std::vector<double> v(mdp.state_count(), 0.0);
    std::vector<double> next(v.size());
    DiscountedSolution out;
    for (;;) {
        if (out.iterations >= max_iterations)
            throw Error(ErrorCode::non_convergence, "discounted value iteration hit the iteration cap");
        sweep.update_expectations(mdp, v);
        double diff = 0.0;
        for (Age a = 1; a <= mdp.age_cap(); ++a) {
            const double q0 = sweep.q_suspend(mdp, a, alpha);
            const double q1 = sweep.q_transmit(mdp, a, alpha);
            for (int s = 0; s <= M; ++s) {
                const auto i = mdp.index(a, s);
                next[i] = sweep.admissible(a, s) ? std::min(q0, q1) : q0;
                diff = std::max(diff, std::abs(next[i] - v[i]));
            }
        }
        v.swap(next);
        ++out.iterations;
        if (diff <= stop) break;
    }

    sweep.update_expectations(mdp, v);
    std::vector<double> q0;
    std::vector<double> q1;
    greedy(mdp, sweep, alpha, out.policy, &q0, &q1);
    out.value = ValueFunction{make_table(mdp, std::move(v)), alpha};
    out.q_suspend = make_table(mdp, std::move(q0));
    out.q_transmit = make_table(mdp, std::move(q1));
    return out;
}

RviSolution rvi(const TruncatedMdp& mdp, double tol, std::int64_t max_iterations) {
    if (!(tol > 0.0)) throw Error(ErrorCode::validation, "tolerance must be positive");
    constexpr double tau = 0.5;
    const int M = mdp.sensor_count();
    const std::size_t ref = mdp.index(1, M);

    Sweep sweep(mdp);
    std::vector<double> h(mdp.state_count(), 0.0);
    std::vector<double> next(h.size());
    RviSolution out;
    for (;;) {
        if (out.iterations >= max_iterations)
            throw Error(ErrorCode::non_convergence,
                        "relative value iteration did not converge; increase the age cap or iteration limit");
        sweep.update_expectations(mdp, h);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (Age a = 1; a <= mdp.age_cap(); ++a) {
            const double q0 = sweep.q_suspend(mdp, a, 1.0);
            const double q1 = sweep.q_transmit(mdp, a, 1.0);
            for (int s = 0; s <= M; ++s) {
                const auto i = mdp.index(a, s);
                const double th = sweep.admissible(a, s) ? std::min(q0, q1) : q0;
                lo = std::min(lo, th - h[i]);
                hi = std::max(hi, th - h[i]);
                next[i] = (1.0 - tau) * h[i] + tau * th;
            }
        }
        ++out.iterations;
        const double offset = next[ref];
        for (double& x : next) x -= offset;
        h.swap(next);
        if (hi - lo <= tol) {
            out.average_cost = 0.5 * (lo + hi);
            break;
        }
    }

    sweep.update_expectations(mdp, h);
    greedy(mdp, sweep, 1.0, out.policy, nullptr, nullptr);
    out.bias = ValueFunction{make_table(mdp, std::move(h)), std::nullopt};
    return out;
}

ThresholdExtraction extract_threshold(const PolicyTable& policy, const DistortionSpec& spec) {
    ThresholdExtraction out;
    const int M = policy.sensor_count;
    out.threshold = policy.age_cap + 1;
    for (Age a = 1; a <= policy.age_cap; ++a) {
        if (policy.at(a, M) == Action::transmit) {
            out.threshold = a;
            break;
        }
    }
    out.reference = State{std::min(out.threshold, policy.age_cap), M};

    for (Age a = 1; a <= policy.age_cap; ++a) {
        for (int s = 0; s <= M; ++s) {
            const bool sends = policy.at(a, s) == Action::transmit;
            const bool admissible = s >= spec.at(a);
            const bool expected = admissible && a >= out.threshold;
            if (sends != expected) {
                out.violation = State{a, s};
                out.structured = false;
                return out;
            }
        }
    }
    out.structured = true;
    return out;
}

}  // namespace aoi::mdp
