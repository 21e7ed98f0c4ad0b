#pragma once

// One-dimensional parameter sweeps with CSV output.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aoi/config.hpp"
#include "aoi/lagrange.hpp"

namespace aoi {

enum class SweepAxis { beta, p, q, W, e_max };
enum class SweepSolver { closed_form, solve, rvi, simulate, greedy };

SweepAxis parse_axis(std::string_view name);
SweepSolver parse_solver(std::string_view name);
std::string_view axis_name(SweepAxis axis);
std::string_view solver_name(SweepSolver solver);

struct ExperimentSpec {
    ConfigDoc base;
    SweepAxis axis = SweepAxis::beta;
    std::vector<double> grid;
    SweepSolver solver = SweepSolver::closed_form;
    double beta = 0.0;                  // used by closed_form / rvi unless the axis is beta
    double epsilon = kDefaultEpsilon;   // solve / simulate
    std::int64_t horizon = 10'000'000;  // simulate / greedy
    std::uint64_t seed = 1;
    int seeds = 1;
    std::optional<Age> cap;             // rvi truncation

    void validate() const;
};

struct SweepRow {
    double axis_value = 0.0;
    std::optional<Age> k_star;
    std::optional<Age> k_plus;
    std::optional<double> mu;
    std::optional<double> beta_minus;
    std::optional<double> beta_plus;
    std::optional<double> lagrangian_cost;
    std::optional<double> avg_age;
    std::optional<double> avg_energy;
    std::string solver;
    std::string error;
};

/// Parameters of the base configuration with the axis set to `value`.
/// W replaces the pmf by {1-W at 0, W at M} and requires a single interval.
SystemParams params_at(const ExperimentSpec& spec, double value);

SweepRow evaluate_point(const ExperimentSpec& spec, double value);

/// Rows in grid order; per-point failures are reported in the error column.
std::vector<SweepRow> run_sweep(const ExperimentSpec& spec, int threads);

inline constexpr std::string_view kSweepHeader =
    "axis_value,k_star,k_plus,mu,beta_minus,beta_plus,lagrangian_cost,avg_age,avg_energy,solver,error";

/// 12 significant digits, LF line endings, header first.
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// "%.12g" formatting used throughout the CLI.
std::string format_number(double value);

/// Grid from "a,b,c" or "start:stop:step" (inclusive within half a step).
std::vector<double> parse_grid(std::string_view text);

}  // namespace aoi
