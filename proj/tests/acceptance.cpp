// Acceptance suite: one PASS/FAIL line per criterion.
//
//   aoi_acceptance            run everything
//   aoi_acceptance 3 8        run only the listed criteria

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "aoi/chain_oracle.hpp"
#include "aoi/closed_form.hpp"
#include "aoi/lagrange.hpp"
#include "aoi/mdp_oracle.hpp"
#include "aoi/parallel.hpp"
#include "aoi/sweep.hpp"
#include "aoi/threshold_search.hpp"
#include "support/instances.hpp"

using namespace aoi;
using testing::uniform;
using testing::uniform_int;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

std::string num(double v) { return format_number(v); }

// ---------------------------------------------------------------------------

Verdict closed_form_vs_oracle() {
    std::mt19937_64 g(101);
    double worst_cost = 0.0;
    double worst_energy = 0.0;
    int failures = 0;
    for (int i = 0; i < 200; ++i) {
        const auto params = testing::random_instance(g);
        const double beta = uniform(g, 0.0, 50.0);
        const Age k = uniform_int(g, 1, static_cast<int>(2 * params.distortion().last_breakpoint()));
        const auto c = avg_lagrangian_cost(params, k, beta);
        const double e = avg_energy(params, k);
        const auto o = chain::oracle_cost(params, k, beta);
        const double ec = testing::relative_error(c.lagrangian_cost, o.lagrangian_cost);
        const double ee = testing::relative_error(e, o.avg_energy);
        worst_cost = std::max(worst_cost, ec);
        worst_energy = std::max(worst_energy, ee);
        if (ec > 1e-8 || ee > 1e-8) ++failures;
    }
    return {failures == 0, "200 instances, max rel err cost " + num(worst_cost) + " energy " + num(worst_energy) +
                               ", failures " + std::to_string(failures)};
}

// argmin over [first, last] with the smallest index winning ties
Age restricted_argmin(const SystemParams& params, const CoefficientSet& coeffs, Age first, Age last) {
    Age best = first;
    double best_cost = std::numeric_limits<double>::infinity();
    for (Age k = first; k <= last; ++k) {
        const double c = evaluate_threshold(params, coeffs, k).lagrangian_cost();
        if (c < best_cost) {
            best_cost = c;
            best = k;
        }
    }
    return best;
}

Verdict tail_optimum_exact() {
    std::mt19937_64 g(202);
    int mismatches = 0;
    std::string first;
    for (int i = 0; i < 100; ++i) {
        const auto params = testing::random_instance(g);
        const double beta = uniform(g, 0.0, 50.0);
        const CoefficientSet coeffs(params, beta);
        const Age last = params.distortion().last_breakpoint();
        const Age fast = k_ub(params, coeffs);
        const Age slow = restricted_argmin(params, coeffs, last, last + kBruteForceMargin);
        if (fast != slow) {
            if (mismatches++ == 0) first = " first: instance " + std::to_string(i) + " k_ub " +
                                           std::to_string(fast) + " brute " + std::to_string(slow);
        }
    }
    return {mismatches == 0, "100 instances, mismatches " + std::to_string(mismatches) + first};
}

Verdict search_optimality() {
    std::mt19937_64 g(303);
    std::vector<SystemParams> instances;
    std::vector<double> betas;
    for (int i = 0; i < 500; ++i) {
        instances.push_back(testing::random_instance(g));
        betas.push_back(uniform(g, 0.0, 50.0));
    }
    std::vector<int> mismatch(instances.size(), 0);
    std::vector<int> over_budget(instances.size(), 0);
    parallel_for(instances.size(), worker_count(), [&](std::size_t i) {
        const auto fast = optimal_threshold(instances[i], betas[i]);
        const auto slow = brute_force_threshold(instances[i], betas[i]);
        mismatch[i] = fast.k_star != slow.k_star;
        over_budget[i] = fast.evaluations > instances[i].distortion().last_breakpoint();
    });
    const int m = std::accumulate(mismatch.begin(), mismatch.end(), 0);
    const int o = std::accumulate(over_budget.begin(), over_budget.end(), 0);
    return {m == 0 && o == 0, "500 instances, mismatches " + std::to_string(m) + ", over evaluation budget " +
                                  std::to_string(o)};
}

Verdict constant_requirement() {
    std::mt19937_64 g(404);
    int mismatches = 0;
    int low_price = 0;
    int low_price_wrong = 0;
    for (int i = 0; i < 100; ++i) {
        const double W = uniform(g, 0.01, 1.0);
        const double p = uniform(g, 0.0, 0.9);
        const double beta = uniform(g, 0.0, 50.0);
        const Age k = constant_threshold(beta, W, p);
        const Age brute = brute_force_threshold(testing::constant_instance(W, p), beta).k_star;
        if (k != brute) ++mismatches;
        if (beta < 1.0 / W) {
            ++low_price;
            if (k != 1 || brute != 1) ++low_price_wrong;
        }
    }
    // extra draws below the 1/W line, which uniform beta rarely reaches
    for (int i = 0; i < 100; ++i) {
        const double W = uniform(g, 0.01, 1.0);
        const double p = uniform(g, 0.0, 0.9);
        const double beta = uniform(g, 0.0, 1.0 / W);
        if (!(beta < 1.0 / W)) continue;
        ++low_price;
        const Age brute = brute_force_threshold(testing::constant_instance(W, p), beta).k_star;
        if (constant_threshold(beta, W, p) != 1 || brute != 1) ++low_price_wrong;
    }
    return {mismatches == 0 && low_price_wrong == 0,
            "100 instances, mismatches " + std::to_string(mismatches) + ", beta<1/W cases " +
                std::to_string(low_price) + " with k!=1: " + std::to_string(low_price_wrong)};
}

bool non_decreasing(const std::vector<Age>& v) { return std::is_sorted(v.begin(), v.end()); }

Verdict monotonicity() {
    std::mt19937_64 g(505);
    std::vector<double> p_grid;
    for (int i = 0; i <= 90; ++i) p_grid.push_back(0.01 * i);
    std::vector<double> w_grid;
    for (int i = 1; i <= 100; ++i) w_grid.push_back(0.01 * i);

    int rising_p = 0;
    int ones = 0;
    int rising_w = 0;
    for (int i = 0; i < 50; ++i) {
        // beta > 1/W
        const double W = uniform(g, 0.05, 1.0);
        const double beta = 1.0 / W * uniform(g, 1.01, 20.0);
        if (!non_decreasing(monotonicity_probe(beta, W, 0.0, ProbeAxis::p, p_grid))) ++rising_p;
    }
    for (int i = 0; i < 50; ++i) {
        const double W = uniform(g, 0.01, 1.0);
        const double beta = 1.0 / W * uniform(g, 0.0, 0.99);
        for (Age k : monotonicity_probe(beta, W, 0.0, ProbeAxis::p, p_grid))
            if (k != 1) {
                ++ones;
                break;
            }
    }
    for (int i = 0; i < 50; ++i) {
        const double p = uniform(g, 0.0, 0.9);
        const double beta = uniform(g, 0.0, 100.0);
        if (!non_decreasing(monotonicity_probe(beta, 0.0, p, ProbeAxis::W, w_grid))) ++rising_w;
    }
    return {rising_p + ones + rising_w == 0, "violations: p grid (beta>1/W) " + std::to_string(rising_p) +
                                                 ", not all ones (beta<1/W) " + std::to_string(ones) + ", W grid " +
                                                 std::to_string(rising_w)};
}

// Small instances whose truncation leaves negligible mass beyond the cap.
SystemParams mdp_instance(std::mt19937_64& g) {
    for (;;) {
        const int M = uniform_int(g, 2, 5);
        const int L = uniform_int(g, 2, std::min(3, M));
        std::vector<int> pool;
        for (int h = 1; h <= M; ++h) pool.push_back(h);
        std::shuffle(pool.begin(), pool.end(), g);
        std::vector<int> levels(pool.begin(), pool.begin() + L);
        std::sort(levels.begin(), levels.end());
        std::vector<Age> breakpoints{1};
        const Age last = uniform_int(g, 10, 30);
        for (int l = 1; l < L; ++l) {
            const Age room = last - breakpoints.back() - (L - 1 - l);
            breakpoints.push_back(l == L - 1 ? last : breakpoints.back() + uniform_int(g, 1, static_cast<int>(room)));
        }
        std::vector<double> q(static_cast<std::size_t>(M));
        for (double& x : q) x = uniform(g, 0.0, 0.5);
        SystemParams params(uniform(g, 0.0, 0.6), pmf_from_erasures(q),
                            DistortionSpec(breakpoints, levels, M), 1.0);
        const double tail = params.tail_probability(levels.back());
        const double B = 1.0 - (1.0 - params.erasure()) * tail;
        const Age X = 10 * last;
        if (std::pow(B, static_cast<double>(X - last)) < 1e-9) return params;
    }
}

Verdict mdp_structure() {
    std::mt19937_64 g(606);
    int monotone_bad = 0;
    int structure_bad = 0;
    int rvi_bad = 0;
    int skipped = 0;
    std::string first;
    for (int i = 0; i < 20;) {
        const auto params = mdp_instance(g);
        const double beta = uniform(g, 0.0, 30.0);
        const Age last = params.distortion().last_breakpoint();
        const Age X = 10 * last;
        const Age k_star = optimal_threshold(params, beta).k_star;
        const double B = 1.0 - (1.0 - params.erasure()) * params.tail_probability(params.distortion().levels().back());
        if (k_star > X / 2 || std::pow(B, static_cast<double>(X - std::max(k_star, last))) > 1e-9) {
            ++skipped;
            continue;
        }
        const mdp::TruncatedMdp model(params, beta, X);
        for (double alpha : {0.9, 0.99}) {
            const auto sol = mdp::discounted_vi(model, alpha, 1e-9);
            const auto& v = sol.value.table;
            for (Age a = 1; a <= X; ++a)
                for (int s = 0; s <= params.sensor_count(); ++s) {
                    if (a > 1 && v.at(a, s) < v.at(a - 1, s) - 1e-7) ++monotone_bad;
                    if (s > 0 && v.at(a, s) > v.at(a, s - 1) + 1e-7) ++monotone_bad;
                }
            if (!mdp::extract_threshold(sol.policy, params.distortion()).structured) ++structure_bad;
        }
        const auto avg = mdp::rvi(model, 1e-10);
        const auto shape = mdp::extract_threshold(avg.policy, params.distortion());
        if (!shape.structured) ++structure_bad;
        if (shape.threshold != k_star) {
            if (rvi_bad++ == 0)
                first = " first: rvi " + std::to_string(shape.threshold) + " vs " + std::to_string(k_star);
        }
        ++i;
    }
    return {monotone_bad + structure_bad + rvi_bad == 0,
            "20 instances x alpha {0.9,0.99}: monotonicity violations " + std::to_string(monotone_bad) +
                ", unstructured policies " + std::to_string(structure_bad) + ", rvi mismatches " +
                std::to_string(rvi_bad) + first + " (rejected " + std::to_string(skipped) + " draws)"};
}

ConfigDoc homogeneous_doc(int M, std::vector<Age> breakpoints, std::vector<int> levels) {
    ConfigDoc doc;
    doc.sensor_count = M;
    doc.erasures = std::vector<double>(static_cast<std::size_t>(M), 0.5);
    doc.breakpoints = std::move(breakpoints);
    doc.levels = std::move(levels);
    return doc;
}

std::vector<Age> thresholds(const std::vector<SweepRow>& rows, int& errors) {
    std::vector<Age> out;
    for (const auto& r : rows) {
        if (!r.error.empty() || !r.k_star) {
            ++errors;
            out.push_back(0);
        } else {
            out.push_back(*r.k_star);
        }
    }
    return out;
}

Verdict reference_trends() {
    const int threads = worker_count();
    int errors = 0;
    int bad = 0;
    std::string notes;

    // constant requirement h = 5 of M = 10; q = 0.8, 0.6, 0.4 are the three W values
    ExperimentSpec spec;
    spec.base = homogeneous_doc(10, {1}, {5});
    spec.base.p = 0.5;
    spec.axis = SweepAxis::q;
    spec.grid = {0.8, 0.6, 0.4};
    const double expected_w[] = {0.03, 0.36, 0.83};
    for (int i = 0; i < 3; ++i) {
        const double w = params_at(spec, spec.grid[static_cast<std::size_t>(i)]).tail_probability(5);
        // the reference W values are truncated to two decimals
        if (std::floor(w * 100.0) != std::round(expected_w[i] * 100.0)) {
            ++bad;
            notes += " W(q) mismatch;";
        }
    }
    for (double beta : {5.0, 10.0, 20.0}) {
        spec.beta = beta;
        if (!non_decreasing(thresholds(run_sweep(spec, threads), errors))) {
            ++bad;
            notes += " not rising in W at beta " + num(beta) + ";";
        }
    }

    spec.axis = SweepAxis::p;
    spec.beta = 10.0;
    spec.grid.clear();
    for (int i = 1; i <= 9; ++i) spec.grid.push_back(0.1 * i);
    std::string row_shapes;
    for (double q : {0.8, 0.6, 0.4}) {
        spec.base.erasures = std::vector<double>(10, q);
        const double W = spec.base.to_params().tail_probability(5);
        const auto ks = thresholds(run_sweep(spec, threads), errors);
        row_shapes += " W=" + num(std::round(W * 100) / 100) + ":[" + std::to_string(ks.front()) + ".." +
                      std::to_string(ks.back()) + "]";
        if (spec.beta > 1.0 / W) {
            if (!non_decreasing(ks)) {
                ++bad;
                notes += " not rising in p at W " + num(W) + ";";
            }
        } else if (std::any_of(ks.begin(), ks.end(), [](Age k) { return k != 1; })) {
            ++bad;
            notes += " threshold != 1 with beta < 1/W;";
        }
    }

    // three-level requirement over the (p, q) grid
    ExperimentSpec grid;
    grid.base = homogeneous_doc(8, {1, 25, 50}, {2, 5, 7});
    grid.axis = SweepAxis::q;
    for (int i = 1; i <= 9; ++i) grid.grid.push_back(0.1 * i);
    std::vector<std::vector<Age>> by_beta;
    for (double beta : {5.0, 25.0, 45.0}) {
        grid.beta = beta;
        std::vector<Age> all;
        for (int i = 1; i <= 9; ++i) {
            grid.base.p = 0.1 * i;
            auto ks = thresholds(run_sweep(grid, threads), errors);
            if (!std::is_sorted(ks.rbegin(), ks.rend())) {
                ++bad;
                notes += " not falling in q at beta " + num(beta) + " p " + num(grid.base.p) + ";";
            }
            all.insert(all.end(), ks.begin(), ks.end());
        }
        by_beta.push_back(std::move(all));
    }
    for (std::size_t j = 0; j < by_beta[0].size(); ++j)
        if (!(by_beta[0][j] <= by_beta[1][j] && by_beta[1][j] <= by_beta[2][j])) {
            ++bad;
            notes += " not rising in beta at cell " + std::to_string(j) + ";";
        }
    return {bad == 0 && errors == 0, "checks failed " + std::to_string(bad) + ", point errors " +
                                         std::to_string(errors) + ";" + row_shapes + notes};
}

Verdict greedy_comparison() {
    const int threads = worker_count();
    const std::int64_t horizon = 10'000'000;
    const int seeds = 10;
    bool dominance = true;
    bool band = true;
    std::string rows;
    for (double e_max : {0.04, 0.08, 0.12, 0.16, 0.20}) {
        const auto params = testing::three_level_instance(0.5, 0.5, e_max);
        const auto mixture = bisect(params).policy;
        const auto mix = chain::summarize(chain::simulate_seeds(params, mixture, horizon, 1, seeds, threads));
        const auto greedy = chain::summarize(chain::greedy_seeds(params, horizon, 1, seeds, threads));
        const double reduction = (greedy.avg_age - mix.avg_age) / greedy.avg_age;
        dominance = dominance && mix.avg_age < greedy.avg_age;
        band = band && reduction >= 0.2 && reduction <= 0.8;
        rows += " E=" + num(e_max) + ": " + num(std::round(mix.avg_age * 100) / 100) + " vs " +
                num(std::round(greedy.avg_age * 100) / 100) + " (" + num(std::round(reduction * 1000) / 10) + "%)";
    }
    return {dominance && band, std::string("mixture vs greedy age;") + rows};
}

// Pooled batch-means standard error over every window of every run.
double pooled_std_error(const std::vector<chain::SimResult>& runs, double mean, bool energy) {
    double ss = 0.0;
    std::size_t n = 0;
    for (const auto& r : runs)
        for (const auto& w : r.windows) {
            const double x = energy ? w.avg_energy : w.avg_age;
            ss += (x - mean) * (x - mean);
            ++n;
        }
    return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

Verdict constraint_satisfaction() {
    std::mt19937_64 g(909);
    const int threads = worker_count();
    const std::int64_t horizon = 2'000'000;
    const int seeds = 10;
    int energy_bad = 0;
    int age_bad = 0;
    double worst_energy = 0.0;
    double worst_z = 0.0;

    int binding = 0;
    while (binding < 20) {
        testing::InstanceShape shape;
        shape.min_level_tail = 0.01;
        auto params = testing::random_instance(g, shape);
        const double free_energy = avg_energy(params, 1);
        params = params.with_e_max(std::max(0.02, free_energy * uniform(g, 0.1, 0.8)));
        const auto solved = bisect(params);
        if (solved.slack) continue;
        ++binding;
        const auto& m = solved.policy;
        const auto runs = chain::simulate_seeds(params, m, horizon, 1000 + static_cast<std::uint64_t>(binding) * 100,
                                                seeds, threads);
        const auto s = chain::summarize(runs);
        const double rel = std::abs(s.avg_energy - params.e_max()) / params.e_max();
        worst_energy = std::max(worst_energy, rel);
        if (rel > 0.01) ++energy_bad;
        const double predicted = m.mix_prob * avg_lagrangian_cost(params, m.low_policy.threshold, 0.0).avg_age +
                                 (1.0 - m.mix_prob) * avg_lagrangian_cost(params, m.high_policy.threshold, 0.0).avg_age;
        const double se = pooled_std_error(runs, s.avg_age, false);
        const double z = std::abs(s.avg_age - predicted) / se;
        worst_z = std::max(worst_z, z);
        if (z > 3.0) ++age_bad;
    }

    // slack budgets: the emitted single policy's prediction is the closed form
    int slack_bad = 0;
    double worst_slack = 0.0;
    for (int found = 0; found < 5;) {
        auto params = testing::random_instance(g).with_e_max(1.0);
        const auto solved = bisect(params);
        if (!solved.slack) continue;
        ++found;
        const Age k = solved.policy.low_policy.threshold;
        const auto cf = avg_lagrangian_cost(params, k, 0.0);
        const double err = std::max(testing::relative_error(mixture_age(params, solved.policy), cf.avg_age),
                                    testing::relative_error(mixture_energy(params, solved.policy), cf.avg_energy));
        worst_slack = std::max(worst_slack, err);
        if (err > 1e-8) ++slack_bad;
    }
    return {energy_bad + age_bad + slack_bad == 0,
            "20 binding: max energy rel dev " + num(worst_energy) + ", max age |z| " + num(worst_z) +
                ", energy failures " + std::to_string(energy_bad) + ", age failures " + std::to_string(age_bad) +
                "; 5 slack: max rel err " + num(worst_slack)};
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "closed form matches steady-state oracle", 10, closed_form_vs_oracle},
        {2, "tail optimum equals exhaustive tail search", 30, tail_optimum_exact},
        {3, "threshold search equals exhaustive search", 60, search_optimality},
        {4, "constant-requirement threshold", 5, constant_requirement},
        {5, "constant-requirement monotonicity", 5, monotonicity},
        {6, "MDP value monotonicity and threshold structure", 300, mdp_structure},
        {7, "reference settings reproduce threshold trends", 120, reference_trends},
        {8, "mixture beats greedy under every budget", 600, greedy_comparison},
        {9, "mixture meets the energy budget", 600, constraint_satisfaction},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool slow = secs > c.budget_seconds;
        const bool pass = v.pass && !slow;
        if (!pass) ++failed;
        std::printf("[%s] criterion %d: %s -- %s; %.1fs (budget %.0fs)%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    v.detail.c_str(), secs, c.budget_seconds, slow ? " over time budget" : "");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
