#include "aoi/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <type_traits>

#include "aoi/chain_oracle.hpp"
#include "aoi/closed_form.hpp"
#include "aoi/mdp_oracle.hpp"
#include "aoi/parallel.hpp"
#include "aoi/threshold_search.hpp"

namespace aoi {

SweepAxis parse_axis(std::string_view name) {
    if (name == "beta") return SweepAxis::beta;
    if (name == "p") return SweepAxis::p;
    if (name == "q") return SweepAxis::q;
    if (name == "W") return SweepAxis::W;
    if (name == "e_max") return SweepAxis::e_max;
    throw Error(ErrorCode::validation, "unknown sweep axis '" + std::string(name) + "'");
}

SweepSolver parse_solver(std::string_view name) {
    if (name == "closed_form") return SweepSolver::closed_form;
    if (name == "solve") return SweepSolver::solve;
    if (name == "rvi") return SweepSolver::rvi;
    if (name == "simulate") return SweepSolver::simulate;
    if (name == "greedy") return SweepSolver::greedy;
    throw Error(ErrorCode::validation, "unknown solver '" + std::string(name) + "'");
}

std::string_view axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::beta: return "beta";
        case SweepAxis::p: return "p";
        case SweepAxis::q: return "q";
        case SweepAxis::W: return "W";
        case SweepAxis::e_max: return "e_max";
    }
    return "?";
}

std::string_view solver_name(SweepSolver solver) {
    switch (solver) {
        case SweepSolver::closed_form: return "closed_form";
        case SweepSolver::solve: return "solve";
        case SweepSolver::rvi: return "rvi";
        case SweepSolver::simulate: return "simulate";
        case SweepSolver::greedy: return "greedy";
    }
    return "?";
}

void ExperimentSpec::validate() const {
    if (grid.empty()) throw Error(ErrorCode::validation, "sweep grid must not be empty");
    for (double v : grid) {
        const bool ok = [&] {
            switch (axis) {
                case SweepAxis::beta: return v >= 0.0;
                case SweepAxis::p: return v >= 0.0 && v < 1.0;
                case SweepAxis::q: return v >= 0.0 && v <= 1.0;
                case SweepAxis::W: return v > 0.0 && v <= 1.0;
                case SweepAxis::e_max: return v > 0.0 && v <= 1.0;
            }
            return false;
        }();
        if (!ok)
            throw Error(ErrorCode::validation,
                        "grid value " + format_number(v) + " is outside the domain of axis " +
                            std::string(axis_name(axis)));
    }
    if (axis == SweepAxis::W && base.levels.size() != 1)
        throw Error(ErrorCode::validation, "the W axis requires a single-interval distortion");
    if (seeds < 1) throw Error(ErrorCode::validation, "seed count must be positive");
    if (horizon < 1) throw Error(ErrorCode::validation, "horizon must be positive");
}

SystemParams params_at(const ExperimentSpec& spec, double value) {
    ConfigDoc doc = spec.base;
    switch (spec.axis) {
        case SweepAxis::beta: break;
        case SweepAxis::p: doc.p = value; break;
        case SweepAxis::e_max: doc.e_max = value; break;
        case SweepAxis::q:
            doc.pmf.reset();
            doc.erasures = std::vector<double>(static_cast<std::size_t>(doc.sensor_count), value);
            break;
        case SweepAxis::W: {
            std::vector<double> pmf(static_cast<std::size_t>(doc.sensor_count) + 1, 0.0);
            pmf.front() = 1.0 - value;
            pmf.back() += value;
            doc.erasures.reset();
            doc.pmf = std::move(pmf);
            break;
        }
    }
    return doc.to_params();
}

SweepRow evaluate_point(const ExperimentSpec& spec, double value) {
    SweepRow row;
    row.axis_value = value;
    row.solver = std::string(solver_name(spec.solver));
    try {
        const SystemParams params = params_at(spec, value);
        const double beta = spec.axis == SweepAxis::beta ? value : spec.beta;
        switch (spec.solver) {
            case SweepSolver::closed_form: {
                const auto best = optimal_threshold(params, beta);
                const auto report = avg_lagrangian_cost(params, best.k_star, beta);
                row.k_star = best.k_star;
                row.lagrangian_cost = report.lagrangian_cost;
                row.avg_age = report.avg_age;
                row.avg_energy = report.avg_energy;
                break;
            }
            case SweepSolver::rvi: {
                const mdp::TruncatedMdp model(params, beta, spec.cap);
                const auto sol = mdp::rvi(model, 1e-9);
                const auto shape = mdp::extract_threshold(sol.policy, params.distortion());
                if (!shape.structured) throw Error(ErrorCode::non_convergence, "RVI policy is not threshold-structured");
                row.k_star = shape.threshold;
                row.lagrangian_cost = sol.average_cost;
                break;
            }
            case SweepSolver::solve:
            case SweepSolver::simulate: {
                const auto solved = bisect(params, spec.epsilon);
                const auto& m = solved.policy;
                row.k_star = m.low_policy.threshold;
                row.k_plus = m.high_policy.threshold;
                row.mu = m.mix_prob;
                row.beta_minus = m.beta_minus;
                row.beta_plus = m.beta_plus;
                if (spec.solver == SweepSolver::solve) {
                    row.avg_age = mixture_age(params, m);
                    row.avg_energy = mixture_energy(params, m);
                } else {
                    const auto runs = chain::simulate_seeds(params, m, spec.horizon, spec.seed, spec.seeds, 1);
                    const auto s = chain::summarize(runs);
                    row.avg_age = s.avg_age;
                    row.avg_energy = s.avg_energy;
                }
                break;
            }
            case SweepSolver::greedy: {
                const auto runs = chain::greedy_seeds(params, spec.horizon, spec.seed, spec.seeds, 1);
                const auto s = chain::summarize(runs);
                row.avg_age = s.avg_age;
                row.avg_energy = s.avg_energy;
                break;
            }
        }
    } catch (const Error& e) {
        row.error = std::string(error_code_name(e.code())) + ": " + e.what();
    }
    return row;
}

std::vector<SweepRow> run_sweep(const ExperimentSpec& spec, int threads) {
    spec.validate();
    std::vector<SweepRow> rows(spec.grid.size());
    parallel_for(rows.size(), threads, [&](std::size_t i) { rows[i] = evaluate_point(spec, spec.grid[i]); });
    return rows;
}

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

template <typename T>
std::string opt(const std::optional<T>& v) {
    if (!v) return {};
    if constexpr (std::is_integral_v<T>)
        return std::to_string(*v);
    else
        return format_number(*v);
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << kSweepHeader << '\n';
    for (const auto& r : rows) {
        out << format_number(r.axis_value) << ',' << opt(r.k_star) << ',' << opt(r.k_plus) << ',' << opt(r.mu) << ','
            << opt(r.beta_minus) << ',' << opt(r.beta_plus) << ',' << opt(r.lagrangian_cost) << ','
            << opt(r.avg_age) << ',' << opt(r.avg_energy) << ',' << r.solver << ',' << csv_field(r.error) << '\n';
    }
}

std::vector<double> parse_grid(std::string_view text) {
    auto to_double = [](std::string_view s) {
        try {
            std::size_t used = 0;
            const std::string str(s);
            const double v = std::stod(str, &used);
            if (used != str.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw Error(ErrorCode::validation, "bad grid number '" + std::string(s) + "'");
        }
    };
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        std::vector<double> parts;
        std::size_t start = 0;
        while (start <= text.size()) {
            const auto end = text.find(':', start);
            parts.push_back(to_double(text.substr(start, end - start)));
            if (end == std::string_view::npos) break;
            start = end + 1;
        }
        if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
            throw Error(ErrorCode::validation, "range grid must be start:stop:step with step > 0 and stop >= start");
        const auto n = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 0.5));
        for (long i = 0; i <= n; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find(',', start);
        out.push_back(to_double(text.substr(start, end - start)));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

}  // namespace aoi
