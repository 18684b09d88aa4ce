#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shorsim/csv.hpp"
#include "shorsim/experiment.hpp"
#include "shorsim/ipr.hpp"

namespace shorsim {

enum class Command { order, run, sweep, epsc, fit, validate };

/// Exit statuses of the command-line front end.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int usage = 2;
inline constexpr int trivial_factor = 3;
inline constexpr int not_bracketed = 4;
inline constexpr int cap_reached = 5;
inline constexpr int validation_failed = 6;
}  // namespace exit_code

struct RunConfig {
  Command command = Command::order;
  u64 N = 0;
  u64 x = 0;
  std::string model = "generic";  // generic, correlated or both
  std::vector<double> eps;        // explicit eps values; empty selects the geometric grid
  double eps_min = 0.002;
  double eps_max = 0.2;
  int per_decade = 12;
  int realizations = 10;
  double rel_tol = 0.02;
  u64 seed = 0;
  std::optional<int> substeps;  // forces the split propagator
  std::string propagator = "chebyshev";
  u64 samples = 1000;
  u64 batch = 1000;
  u64 max_samples = 4'000'000;
  int stride = 3;
  double min_log2N = 5.5;
  std::string preset;  // epsc: "reduced" or "table1"
  bool exact = false;  // run: fill W_exact from the full-register simulation
  std::string out;
  std::string sweep_out;  // epsc: also write the evaluated sweep points
  std::vector<std::string> inputs;
};

std::string_view to_string(Command command);

/// Canonical command line reproducing the configuration.
std::string describe(const RunConfig& cfg);

/// Checks the invariants (rel_tol > 0, odd composite N, gcd(x, N) = 1, ...).
/// Throws std::invalid_argument or TrivialFactor.
void validate_config(const RunConfig& cfg);

SweepOptions sweep_options(const RunConfig& cfg);

/// Runs the selected pipeline. Diagnostics go to `err`; the return value is an exit_code.
int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv with CLI11 and dispatches.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::vector<CsvRow> histogram_rows(const ClashHistogram& h, const std::vector<double>* W_exact);
CsvRow sweep_row(const ProblemInstance& inst, DisorderModel model, const SweepPoint& p, u64 seed);
CsvRow epsc_row(const ProblemInstance& inst, DisorderModel model, double eps_c, u64 seed);

/// (log2N, eps_c) per model read from epsc CSV files.
std::vector<std::pair<double, double>> epsc_points(const CsvTable& table, DisorderModel model);

}  // namespace shorsim
