#include "shorsim/ipr.hpp"

#include <cmath>
#include <stdexcept>

#include "shorsim/errors.hpp"

namespace shorsim {

FoldGeometry::FoldGeometry(u64 Q_, u64 r_) : Q(Q_), r(r_) {
  if (r < 1 || Q < r) throw std::invalid_argument("FoldGeometry: need 1 <= r <= Q");
  s = static_cast<i64>((2 * Q + r) / (2 * r));  // round(Q / r)
}

i64 clash_fold(u64 a, const FoldGeometry& g) {
  using u128 = unsigned __int128;
  // nearest peak index m = round(a r / Q), peak position round(m Q / r)
  const u64 m = static_cast<u64>((2 * static_cast<u128>(a) * g.r + g.Q) / (2 * static_cast<u128>(g.Q)));
  const u64 peak = static_cast<u64>((2 * static_cast<u128>(m) * g.Q + g.r) / (2 * static_cast<u128>(g.r)));
  i64 c = static_cast<i64>(a) - static_cast<i64>(peak);
  const i64 lo = g.lowest();
  while (c < lo) c += g.s;
  while (c >= lo + g.s) c -= g.s;
  return c;
}

i64 clash_fold(u64 a, u64 Q, u64 r) { return clash_fold(a, FoldGeometry(Q, r)); }

ClashHistogram::ClashHistogram(i64 s) : s_(s) {
  if (s < 1) throw std::invalid_argument("ClashHistogram: need at least one cell");
}

void ClashHistogram::add(i64 c, std::uint64_t count) {
  if (c < -(s_ / 2) || c >= s_ - s_ / 2) throw std::out_of_range("ClashHistogram: cell out of range");
  if (count == 0) return;
  counts_[c] += count;
  total_ += count;
}

void ClashHistogram::merge(const ClashHistogram& other) {
  if (other.s_ != s_) throw std::invalid_argument("ClashHistogram: merging different geometries");
  for (const auto& [c, n] : other.counts_) counts_[c] += n;
  total_ += other.total_;
}

std::vector<std::uint64_t> ClashHistogram::dense() const {
  std::vector<std::uint64_t> out(static_cast<std::size_t>(s_), 0);
  for (const auto& [c, n] : counts_) out[static_cast<std::size_t>(c + s_ / 2)] = n;
  return out;
}

double ClashHistogram::sum_p2() const {
  if (total_ == 0) return 0.0;
  long double acc = 0.0L;
  for (const auto& [c, n] : counts_) acc += static_cast<long double>(n) * static_cast<long double>(n);
  const long double R = static_cast<long double>(total_);
  return static_cast<double>(acc / (R * R));
}

double ClashHistogram::sum_p3() const {
  if (total_ == 0) return 0.0;
  long double acc = 0.0L;
  const long double R = static_cast<long double>(total_);
  for (const auto& [c, n] : counts_) {
    const long double p = static_cast<long double>(n) / R;
    acc += p * p * p;
  }
  return static_cast<double>(acc);
}

std::vector<double> exact_clash_distribution(std::span<const double> P, u64 Q, u64 r) {
  if (P.size() != Q) throw std::invalid_argument("exact_clash_distribution: P must have Q entries");
  const FoldGeometry g(Q, r);
  std::vector<double> W(static_cast<std::size_t>(g.s), 0.0);
  for (u64 a = 0; a < Q; ++a) W[g.index(clash_fold(a, g))] += P[a];
  return W;
}

double exact_ipr(std::span<const double> W) {
  double acc = 0.0;
  for (const double w : W) acc += w * w;
  return 1.0 / acc;
}

double exact_second_order_ipr(std::span<const double> W) {
  double acc = 0.0;
  for (const double w : W) acc += w * w * w;
  return 1.0 / acc;
}

double IprEstimate::relative_error() const { return std::sqrt(var_inv_xiR) * xi_R; }

double IprEstimate::xi_error() const { return std::sqrt(var_inv_xiR) * xi_inf * xi_inf; }

double expected_inv_xiR(double rho, double inv_xi) { return rho + (1.0 - rho) * inv_xi; }

double expected_sum_p3(double rho, double inv_xi, double inv_xi2) {
  return rho * rho + 3.0 * rho * (1.0 - rho) * inv_xi + (1.0 - rho) * (1.0 - 2.0 * rho) * inv_xi2;
}

double variance_inv_xiR(double rho, double inv_xi, double inv_xi2) {
  const double inv_xi_sq = inv_xi * inv_xi;
  return 2.0 * rho * rho * (1.0 - rho) * (inv_xi - inv_xi_sq) +
         4.0 * rho * (1.0 - rho) * (1.0 - 2.0 * rho) * (inv_xi2 - inv_xi_sq);
}

IprEstimate ipr_from_samples(const ClashHistogram& h) {
  const std::uint64_t R = h.total();
  if (R < 3) throw InsufficientSamples("ipr_from_samples: need at least 3 samples");
  IprEstimate est;
  est.R = R;
  est.rho = 1.0 / static_cast<double>(R);
  const double rho = est.rho;
  // xi_R = R exactly when no cell holds two samples; test on the counts, not in floating point.
  if (h.counts().size() == R)
    throw InsufficientSamples("ipr_from_samples: every sample fell in a distinct cell");
  est.xi_R = 1.0 / h.sum_p2();
  est.xi_inf = est.xi_R * (1.0 - rho) / (1.0 - rho * est.xi_R);
  const double inv_xi = 1.0 / est.xi_inf;
  const double inv_xi2 =
      (h.sum_p3() - rho * rho - 3.0 * rho * (1.0 - rho) * inv_xi) / ((1.0 - rho) * (1.0 - 2.0 * rho));
  est.inv_xi2 = std::max(inv_xi2, inv_xi * inv_xi);
  est.var_inv_xiR = std::max(0.0, variance_inv_xiR(rho, inv_xi, est.inv_xi2));
  return est;
}

AdaptiveResult adaptive_estimate(const BatchSampler& sampler, i64 cells, const AdaptiveOptions& options) {
  if (!(options.rel_tol > 0.0)) throw std::invalid_argument("adaptive_estimate: rel_tol must be > 0");
  if (options.batch < 1) throw std::invalid_argument("adaptive_estimate: batch must be >= 1");
  AdaptiveResult result{{}, AdaptiveStatus::converged, ClashHistogram(cells)};
  ClashHistogram& h = result.histogram;
  bool have_estimate = false;
  while (true) {
    const std::uint64_t room = options.max_samples - h.total();
    sampler(std::min(options.batch, room), h);
    if (h.total() >= 3) {
      try {
        result.estimate = ipr_from_samples(h);
        have_estimate = true;
      } catch (const InsufficientSamples&) {
        have_estimate = false;
      }
    }
    if (have_estimate && h.total() >= options.min_samples &&
        static_cast<double>(h.total()) >= options.floor_factor * result.estimate.xi_inf &&
        result.estimate.relative_error() <= options.rel_tol)
      return result;
    if (h.total() >= options.max_samples) {
      if (!have_estimate)
        throw InsufficientSamples("adaptive_estimate: sample cap reached before any estimate");
      result.status = AdaptiveStatus::cap_reached;
      return result;
    }
  }
}

AdaptiveResult adaptive_estimate(const Sampler& sampler, i64 cells, const AdaptiveOptions& options) {
  const BatchSampler batch = [&sampler](std::uint64_t count, ClashHistogram& h) {
    for (std::uint64_t k = 0; k < count; ++k) h.add(sampler());
  };
  return adaptive_estimate(batch, cells, options);
}

}  // namespace shorsim
