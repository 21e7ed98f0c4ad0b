#include "aoi/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "aoi/chain_oracle.hpp"
#include "aoi/closed_form.hpp"
#include "aoi/config.hpp"
#include "aoi/lagrange.hpp"
#include "aoi/mdp_oracle.hpp"
#include "aoi/parallel.hpp"
#include "aoi/sweep.hpp"
#include "aoi/threshold_search.hpp"

namespace aoi {
namespace {

struct Options {
    std::string config;
    std::optional<double> beta;
    std::optional<double> e_max;
    double epsilon = kDefaultEpsilon;
    std::uint64_t seed = 1;
    std::uint64_t horizon = 10'000'000;
    std::optional<std::uint64_t> cap;
    std::string out;

    // sweep
    std::string axis = "beta";
    std::string values;
    std::string solver = "closed_form";
    int seeds = 1;

    // simulate
    std::string policy = "mixture";
    std::optional<Age> k;
    std::string policy_file;

    // oracle
    std::string mode = "rvi";
    std::optional<double> alpha;
    double tol = 1e-9;
};

std::string fmt(double v) { return format_number(v); }

// Config first, then flag overrides.
ConfigDoc load_doc(const Options& opt) {
    if (opt.config.empty()) throw Error(ErrorCode::config, "--config is required");
    ConfigDoc doc = load_config(opt.config);
    if (opt.e_max) doc.e_max = *opt.e_max;
    return doc;
}

double require_beta(const Options& opt) {
    if (!opt.beta) throw Error(ErrorCode::validation, "--beta is required");
    return *opt.beta;
}

std::optional<Age> cap_of(const Options& opt) {
    if (!opt.cap) return std::nullopt;
    return static_cast<Age>(*opt.cap);
}

int cmd_validate(const Options& opt, std::ostream& out) {
    const ConfigDoc doc = load_doc(opt);
    const SystemParams params = doc.to_params();
    const CoefficientSet coeffs(params, 0.0);
    const auto& spec = params.distortion();
    out << "status=ok\n";
    out << "M=" << params.sensor_count() << "\n";
    out << "L=" << spec.interval_count() << "\n";
    out << "p=" << fmt(params.erasure()) << "\n";
    out << "e_max=" << fmt(params.e_max()) << "\n";
    for (std::size_t l = 0; l < spec.interval_count(); ++l)
        out << "level " << l + 1 << ": delta=" << spec.breakpoint(l) << " h=" << spec.level(l)
            << " F=" << fmt(coeffs.level_tail(l)) << " B=" << fmt(coeffs.no_reset(l)) << "\n";
    return 0;
}

int cmd_threshold(const Options& opt, std::ostream& out) {
    const SystemParams params = load_doc(opt).to_params();
    const double beta = require_beta(opt);
    const auto best = optimal_threshold(params, beta);
    const auto report = avg_lagrangian_cost(params, best.k_star, beta);
    out << "k_star=" << best.k_star << "\n";
    out << "lagrangian_cost=" << fmt(report.lagrangian_cost) << "\n";
    out << "avg_energy=" << fmt(report.avg_energy) << "\n";
    out << "avg_age=" << fmt(report.avg_age) << "\n";
    out << "evaluations=" << best.evaluations << "\n";
    return 0;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::io, "cannot open output file " + path);
    f << text;
    if (!f) throw Error(ErrorCode::io, "failed writing " + path);
}

int cmd_solve(const Options& opt, std::ostream& out) {
    const SystemParams params = load_doc(opt).to_params();
    const auto result = bisect(params, opt.epsilon);
    const auto& m = result.policy;
    out << "beta_minus=" << fmt(m.beta_minus) << "\n";
    out << "beta_plus=" << fmt(m.beta_plus) << "\n";
    out << "k_minus=" << m.low_policy.threshold << "\n";
    out << "k_plus=" << m.high_policy.threshold << "\n";
    out << "mu=" << fmt(m.mix_prob) << "\n";
    out << "energy_minus=" << fmt(result.energy_low) << "\n";
    out << "energy_plus=" << fmt(result.energy_high) << "\n";
    out << "avg_energy=" << fmt(mixture_energy(params, m)) << "\n";
    out << "avg_age=" << fmt(mixture_age(params, m)) << "\n";
    out << "slack=" << (result.slack ? "true" : "false") << "\n";
    out << "iterations=" << result.trace.iterations.size() << "\n";
    if (result.clamp_diagnostic) out << "warning: interpolation factor " << fmt(result.raw_mix_prob) << " clamped\n";
    if (!opt.out.empty()) write_file(opt.out, to_json(m).dump(2) + "\n");
    return 0;
}

int cmd_sweep(const Options& opt, std::ostream& out) {
    ExperimentSpec spec;
    spec.base = load_doc(opt);
    spec.axis = parse_axis(opt.axis);
    if (opt.values.empty()) throw Error(ErrorCode::validation, "--values is required");
    spec.grid = parse_grid(opt.values);
    spec.solver = parse_solver(opt.solver);
    if (spec.axis != SweepAxis::beta && (spec.solver == SweepSolver::closed_form || spec.solver == SweepSolver::rvi))
        spec.beta = require_beta(opt);
    spec.epsilon = opt.epsilon;
    spec.horizon = static_cast<std::int64_t>(opt.horizon);
    spec.seed = opt.seed;
    spec.seeds = opt.seeds;
    spec.cap = cap_of(opt);

    const auto rows = run_sweep(spec, worker_count());
    std::ostringstream csv;
    write_csv(csv, rows);
    if (opt.out.empty())
        out << csv.str();
    else
        write_file(opt.out, csv.str());
    return 0;
}

int cmd_simulate(const Options& opt, std::ostream& out) {
    const SystemParams params = load_doc(opt).to_params();
    const auto horizon = static_cast<std::int64_t>(opt.horizon);
    if (horizon < 1) throw Error(ErrorCode::validation, "--horizon must be positive");
    if (opt.seeds < 1) throw Error(ErrorCode::validation, "--seeds must be positive");
    const int threads = worker_count();

    std::vector<chain::SimResult> runs;
    if (opt.policy == "greedy") {
        runs = chain::greedy_seeds(params, horizon, opt.seed, opt.seeds, threads);
    } else if (opt.policy == "threshold") {
        if (!opt.k) throw Error(ErrorCode::validation, "--k is required for --policy threshold");
        if (*opt.k < 1) throw Error(ErrorCode::validation, "--k must be at least 1");
        runs = chain::simulate_seeds(params, ThresholdPolicy{*opt.k}, horizon, opt.seed, opt.seeds, threads);
    } else if (opt.policy == "mixture") {
        MixturePolicy m;
        if (!opt.policy_file.empty()) {
            std::ifstream f(opt.policy_file);
            if (!f) throw Error(ErrorCode::io, "cannot open policy file " + opt.policy_file);
            nlohmann::json j;
            try {
                f >> j;
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorCode::config, std::string("policy file: ") + e.what());
            }
            m = mixture_from_json(j);
        } else {
            m = bisect(params, opt.epsilon).policy;
        }
        runs = chain::simulate_seeds(params, m, horizon, opt.seed, opt.seeds, threads);
    } else {
        throw Error(ErrorCode::validation, "unknown policy '" + opt.policy + "'");
    }

    const auto s = chain::summarize(runs);
    out << "policy=" << opt.policy << "\n";
    out << "rng=" << runs.front().rng_algorithm << "\n";
    out << "seed=" << opt.seed << "\n";
    out << "seeds=" << s.runs << "\n";
    out << "horizon=" << horizon << "\n";
    out << "avg_age=" << fmt(s.avg_age) << "\n";
    out << "avg_energy=" << fmt(s.avg_energy) << "\n";
    out << "age_std_error=" << fmt(s.age_std_error) << "\n";
    out << "energy_std_error=" << fmt(s.energy_std_error) << "\n";
    return 0;
}

int cmd_oracle(const Options& opt, std::ostream& out) {
    const SystemParams params = load_doc(opt).to_params();
    const double beta = require_beta(opt);
    const mdp::TruncatedMdp model(params, beta, cap_of(opt));

    mdp::PolicyTable policy;
    out << "mode=" << opt.mode << "\n";
    out << "cap=" << model.age_cap() << "\n";
    if (opt.mode == "rvi") {
        const auto sol = mdp::rvi(model, opt.tol);
        out << "average_cost=" << fmt(sol.average_cost) << "\n";
        out << "iterations=" << sol.iterations << "\n";
        policy = sol.policy;
    } else if (opt.mode == "vi") {
        if (!opt.alpha) throw Error(ErrorCode::validation, "--alpha is required for --mode vi");
        const auto sol = mdp::discounted_vi(model, *opt.alpha, opt.tol);
        out << "value_1_M=" << fmt(sol.value.table.at(1, params.sensor_count())) << "\n";
        out << "iterations=" << sol.iterations << "\n";
        policy = sol.policy;
    } else {
        throw Error(ErrorCode::validation, "unknown oracle mode '" + opt.mode + "'");
    }

    const auto shape = mdp::extract_threshold(policy, params.distortion());
    out << "threshold=" << shape.threshold << "\n";
    if (shape.structured) {
        out << "structure=threshold\n";
    } else {
        out << "structure=violation age=" << shape.violation->age << " samples=" << shape.violation->samples << "\n";
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Age-of-information transmission scheduling under energy and distortion constraints", "aoi-sched"};
    app.require_subcommand(1);
    Options opt;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON configuration file")->required();
        sub->add_option("--e-max", opt.e_max, "energy budget (overrides the config)");
    };

    auto* validate = app.add_subcommand("validate", "check a configuration file");
    common(validate);

    auto* threshold = app.add_subcommand("threshold", "optimal threshold for a fixed energy price");
    common(threshold);
    threshold->add_option("--beta", opt.beta, "energy price")->required();

    auto* solve = app.add_subcommand("solve", "randomized policy meeting the energy budget");
    common(solve);
    solve->add_option("--epsilon", opt.epsilon, "bisection tolerance on beta")->capture_default_str();
    solve->add_option("--out", opt.out, "write the mixture policy JSON here");

    auto* sweep = app.add_subcommand("sweep", "one-dimensional parameter sweep to CSV");
    common(sweep);
    sweep->add_option("--axis", opt.axis, "beta | p | q | W | e_max")->capture_default_str();
    sweep->add_option("--values,--range", opt.values, "grid as a,b,c or start:stop:step")->required();
    sweep->add_option("--solver", opt.solver, "closed_form | solve | rvi | simulate | greedy")->capture_default_str();
    sweep->add_option("--beta", opt.beta, "energy price for closed_form and rvi");
    sweep->add_option("--epsilon", opt.epsilon, "bisection tolerance on beta")->capture_default_str();
    sweep->add_option("--seed", opt.seed, "base seed")->capture_default_str();
    sweep->add_option("--seeds", opt.seeds, "independent runs per point")->capture_default_str();
    sweep->add_option("--horizon", opt.horizon, "slots per run")->capture_default_str();
    sweep->add_option("--cap", opt.cap, "age truncation for rvi");
    sweep->add_option("--out", opt.out, "CSV path (stdout when omitted)");

    auto* simulate = app.add_subcommand("simulate", "slot-level Monte Carlo run");
    common(simulate);
    simulate->add_option("--policy", opt.policy, "threshold | mixture | greedy")->capture_default_str();
    simulate->add_option("--k", opt.k, "threshold for --policy threshold");
    simulate->add_option("--policy-file", opt.policy_file, "mixture JSON written by solve");
    simulate->add_option("--epsilon", opt.epsilon, "bisection tolerance on beta")->capture_default_str();
    simulate->add_option("--seed", opt.seed, "base seed")->capture_default_str();
    simulate->add_option("--seeds", opt.seeds, "independent runs")->capture_default_str();
    simulate->add_option("--horizon", opt.horizon, "slots per run")->capture_default_str();

    auto* oracle = app.add_subcommand("oracle", "truncated MDP solution by value iteration");
    common(oracle);
    oracle->add_option("--beta", opt.beta, "energy price")->required();
    oracle->add_option("--mode", opt.mode, "vi | rvi")->capture_default_str();
    oracle->add_option("--alpha", opt.alpha, "discount factor for vi");
    oracle->add_option("--cap", opt.cap, "age truncation (default 8 * last breakpoint)");
    oracle->add_option("--tol", opt.tol, "stopping tolerance")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: code=" << error_code_name(ErrorCode::validation) << " message=" << e.what() << "\n";
        return error_exit_status(ErrorCode::validation);
    }

    try {
        if (*validate) return cmd_validate(opt, out);
        if (*threshold) return cmd_threshold(opt, out);
        if (*solve) return cmd_solve(opt, out);
        if (*sweep) return cmd_sweep(opt, out);
        if (*simulate) return cmd_simulate(opt, out);
        if (*oracle) return cmd_oracle(opt, out);
    } catch (const Error& e) {
        err << "error: code=" << error_code_name(e.code()) << " message=" << e.what() << "\n";
        return error_exit_status(e.code());
    } catch (const std::exception& e) {
        err << "error: code=INTERNAL message=" << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace aoi
