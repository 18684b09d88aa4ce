#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "shorsim/numtheory.hpp"

namespace shorsim {

/// Geometry of the clash folding: s = round(Q / r) cells, c in [-floor(s/2), s - floor(s/2)).
struct FoldGeometry {
  u64 Q = 0;
  u64 r = 0;
  i64 s = 0;

  FoldGeometry(u64 Q, u64 r);
  i64 lowest() const noexcept { return -(s / 2); }
  std::size_t index(i64 c) const noexcept { return static_cast<std::size_t>(c - lowest()); }
  i64 cell(std::size_t index) const noexcept { return static_cast<i64>(index) + lowest(); }
};

/// Offset of a from its nearest peak m Q / r, folded into the cell range.
i64 clash_fold(u64 a, const FoldGeometry& geometry);
i64 clash_fold(u64 a, u64 Q, u64 r);

/// Sample counts over the folded cells. Sparse, since s reaches 10^7 for large N.
class ClashHistogram {
 public:
  explicit ClashHistogram(i64 s);

  i64 cells() const noexcept { return s_; }
  std::uint64_t total() const noexcept { return total_; }
  const std::map<i64, std::uint64_t>& counts() const noexcept { return counts_; }

  void add(i64 c, std::uint64_t count = 1);
  void merge(const ClashHistogram& other);
  std::vector<std::uint64_t> dense() const;

  /// sum_c p_R(c)^2 and sum_c p_R(c)^3.
  double sum_p2() const;
  double sum_p3() const;

 private:
  i64 s_;
  std::uint64_t total_ = 0;
  std::map<i64, std::uint64_t> counts_;
};

/// W(c) = sum_a P(a) [clash_fold(a) = c], indexed by FoldGeometry::index.
std::vector<double> exact_clash_distribution(std::span<const double> P, u64 Q, u64 r);

/// 1 / sum W^2.
double exact_ipr(std::span<const double> W);
/// 1 / sum W^3.
double exact_second_order_ipr(std::span<const double> W);

struct IprEstimate {
  double xi_R = 0.0;         // histogram IPR
  double xi_inf = 0.0;       // bias-corrected IPR
  double inv_xi2 = 0.0;      // estimated 1 / xi_2 (clamped at (1/xi_inf)^2)
  double var_inv_xiR = 0.0;  // variance of 1 / xi_R
  double rho = 0.0;          // 1 / R
  std::uint64_t R = 0;

  /// sqrt(Var(1/xi_R)) / (1/xi_R)
  double relative_error() const;
  /// Error of xi_inf propagated from Var(1/xi_R).
  double xi_error() const;
};

/// <1/xi_R> = rho + (1 - rho)/xi
double expected_inv_xiR(double rho, double inv_xi);
/// <sum p_R^3> = rho^2 + 3 rho (1 - rho)/xi + (1 - rho)(1 - 2 rho)/xi_2
double expected_sum_p3(double rho, double inv_xi, double inv_xi2);
/// Var(1/xi_R) = 2 rho^2 (1-rho)(1/xi - 1/xi^2) + 4 rho (1-rho)(1-2rho)(1/xi_2 - 1/xi^2)
double variance_inv_xiR(double rho, double inv_xi, double inv_xi2);

/// Bias-corrected estimate from a histogram. Throws InsufficientSamples when
/// R < 3 or xi_R >= R.
IprEstimate ipr_from_samples(const ClashHistogram& h);

struct AdaptiveOptions {
  double rel_tol = 0.02;
  std::uint64_t batch = 1000;
  std::uint64_t min_samples = 100;
  double floor_factor = 100.0;  // also require R >= floor_factor * xi_inf
  std::uint64_t max_samples = 10'000'000;
};

enum class AdaptiveStatus { converged, cap_reached };

struct AdaptiveResult {
  IprEstimate estimate;
  AdaptiveStatus status = AdaptiveStatus::converged;
  ClashHistogram histogram;
};

/// Adds `count` samples to the histogram.
using BatchSampler = std::function<void(std::uint64_t count, ClashHistogram& h)>;
/// Produces one folded sample per call.
using Sampler = std::function<i64()>;

/// Samples in batches until the relative error of 1/xi_R is at most rel_tol and
/// R >= floor_factor * xi_inf, or until max_samples (status cap_reached).
AdaptiveResult adaptive_estimate(const BatchSampler& sampler, i64 cells, const AdaptiveOptions& options);
AdaptiveResult adaptive_estimate(const Sampler& sampler, i64 cells, const AdaptiveOptions& options);

}  // namespace shorsim
