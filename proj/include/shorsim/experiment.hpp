#pragma once

#include <utility>
#include <vector>

#include "shorsim/imperfect.hpp"
#include "shorsim/ipr.hpp"
#include "shorsim/numtheory.hpp"

namespace shorsim {

struct SweepOptions {
  int realizations = 10;  // N_R
  AdaptiveOptions adaptive;
  u64 seed = 0;
  PropagationOptions propagation;
  unsigned workers = 0;  // 0: SHORSIM_WORKERS or hardware concurrency
};

struct SweepPoint {
  double epsilon = 0.0;
  double xi = 1.0;      // extrapolated IPR of the pooled histogram
  double xi_err = 0.0;  // sqrt(Var(1/xi_R)) xi^2
  u64 R_total = 0;
  int N_R = 0;
  bool cap_reached = false;
  std::vector<double> realization_xi;  // per-realization xi_inf (NaN when too few samples)
};

/// Worker threads to use: SHORSIM_WORKERS if set, else hardware concurrency.
unsigned worker_count();

/// Realization `index` of the disorder for (model, eps); the unit-scale draws
/// depend only on (seed, index), so both models and every eps share them.
DisorderRealization realization(const ProblemInstance& inst, DisorderModel model, double epsilon,
                                u64 seed, int index);

/// W(c) of the ideal algorithm. Exact for Q <= 2^26; above that only cells
/// within 4096 of each peak are summed (the omitted tail changes sum W^2 by < 1e-12).
std::vector<double> ideal_clash_distribution(const ProblemInstance& inst);
double ideal_ipr(const ProblemInstance& inst);

/// IPR at one eps, pooling adaptive samples over N_R realizations round-robin.
/// eps = 0 is evaluated exactly.
SweepPoint measure_point(const ProblemInstance& inst, DisorderModel model, double epsilon,
                         const SweepOptions& options);

std::vector<SweepPoint> epsilon_sweep(const ProblemInstance& inst, DisorderModel model,
                                      const std::vector<double>& grid, const SweepOptions& options);

/// Geometric grid with `per_decade` points per decade from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, int per_decade);
std::vector<double> default_epsilon_grid();

/// Crossing of xi(eps) with factor * xi0, interpolated linearly in (log eps, log xi).
/// Points must be sorted by eps; eps <= 0 points are ignored. Throws NotBracketed.
double find_epsilon_c(const std::vector<SweepPoint>& points, double xi0, double factor = 10.0);

struct BorderResult {
  double xi0 = 1.0;
  double epsilon_c = 0.0;
  std::vector<SweepPoint> points;  // evaluated points, sorted by eps
};

/// Scans the grid upward every `stride` points until xi passes 10 xi0, then
/// fills in the skipped points of the bracketing interval.
/// Throws NotBracketed if the grid does not straddle the threshold.
BorderResult locate_epsilon_c(const ProblemInstance& inst, DisorderModel model,
                              const std::vector<double>& grid, const SweepOptions& options,
                              int stride = 3);

struct PowerLawFit {
  double B = 0.0;
  double beta = 0.0;
  double B_err = 0.0;
  double beta_err = 0.0;
  std::vector<std::pair<double, double>> points;  // (log2 N, eps_c) used in the fit

  double predict(double log2N) const;
};

/// Least squares of ln eps_c on ln log2N over points with log2N >= min_log2N.
/// Throws std::invalid_argument with fewer than 3 usable points.
PowerLawFit power_law_fit(const std::vector<std::pair<double, double>>& points, double min_log2N = 5.5);

/// (N, x) pairs of the large-N campaign.
std::vector<std::pair<u64, u64>> table1_instances();
/// Desk-scale instances with 5.5 <= log2 N <= 10.
std::vector<std::pair<u64, u64>> reduced_scaling_instances();

}  // namespace shorsim
