#include "shorsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>

#include "shorsim/errors.hpp"
#include "shorsim/rng.hpp"
#include "shorsim/shor_full.hpp"
#include "shorsim/shor_single.hpp"

namespace shorsim {

unsigned worker_count() {
  if (const char* env = std::getenv("SHORSIM_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

DisorderRealization realization(const ProblemInstance& inst, DisorderModel model, double epsilon,
                                u64 seed, int index) {
  Rng rng = make_stream(seed, StreamTag::disorder, {static_cast<u64>(index)});
  return sample_disorder(inst.n_q, inst.n_l, epsilon, model, rng);
}

std::vector<double> ideal_clash_distribution(const ProblemInstance& inst) {
  const AnalyticPeakModel model = AnalyticPeakModel::make(inst.r, inst.Q);
  const FoldGeometry g(inst.Q, inst.r);
  std::vector<double> W(static_cast<std::size_t>(g.s), 0.0);
  if (inst.Q <= (u64{1} << 26)) {
    for (u64 a = 0; a < inst.Q; ++a) W[g.index(clash_fold(a, g))] += analytic_P(a, model);
    return W;
  }
  const i64 window = std::min<i64>(4096, g.s / 2);
  for (u64 m = 0; m < inst.r; ++m) {
    const i64 peak = static_cast<i64>((2 * static_cast<unsigned __int128>(m) * inst.Q + inst.r) / (2 * inst.r));
    for (i64 off = -window; off < window; ++off) {
      const i64 a = (peak + off + static_cast<i64>(inst.Q)) % static_cast<i64>(inst.Q);
      W[g.index(clash_fold(static_cast<u64>(a), g))] += analytic_P(static_cast<u64>(a), model);
    }
  }
  return W;
}

double ideal_ipr(const ProblemInstance& inst) { return exact_ipr(ideal_clash_distribution(inst)); }

SweepPoint measure_point(const ProblemInstance& inst, DisorderModel model, double epsilon,
                         const SweepOptions& options) {
  SweepPoint point;
  point.epsilon = epsilon;
  if (epsilon == 0.0) {
    point.xi = ideal_ipr(inst);
    return point;
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("measure_point: epsilon must be >= 0");
  const int n_r = options.realizations;
  if (n_r < 1) throw std::invalid_argument("measure_point: need at least one realization");

  const FoldGeometry geometry(inst.Q, inst.r);
  const auto schedule = std::make_shared<const ModMultSchedule>(inst);
  std::vector<SingleControlShor> shors;
  std::vector<Rng> streams;
  std::vector<ClashHistogram> per_realization;
  shors.reserve(static_cast<std::size_t>(n_r));
  for (int k = 0; k < n_r; ++k) {
    shors.emplace_back(inst, schedule, realization(inst, model, epsilon, options.seed, k), options.propagation);
    streams.push_back(make_stream(options.seed, StreamTag::measurement,
                                  {static_cast<u64>(model), static_cast<u64>(k), bits_of(epsilon)}));
    per_realization.emplace_back(geometry.s);
  }

  const unsigned workers = std::min<unsigned>(options.workers ? options.workers : worker_count(),
                                              static_cast<unsigned>(n_r));
  std::size_t cursor = 0;
  const BatchSampler sampler = [&](std::uint64_t count, ClashHistogram& pooled) {
    // Round-robin share of this batch per realization.
    std::vector<std::uint64_t> share(static_cast<std::size_t>(n_r), count / static_cast<u64>(n_r));
    for (std::uint64_t e = 0; e < count % static_cast<u64>(n_r); ++e) ++share[(cursor + e) % n_r];
    cursor = (cursor + count % static_cast<u64>(n_r)) % static_cast<std::size_t>(n_r);

    std::vector<ClashHistogram> fresh(static_cast<std::size_t>(n_r), ClashHistogram(geometry.s));
    const auto work = [&](unsigned worker) {
      for (std::size_t k = worker; k < static_cast<std::size_t>(n_r); k += workers)
        for (std::uint64_t t = 0; t < share[k]; ++t)
          fresh[k].add(clash_fold(shors[k].sample(streams[k]), geometry));
    };
    if (workers <= 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    // Merge in realization order so results do not depend on scheduling.
    for (std::size_t k = 0; k < fresh.size(); ++k) {
      per_realization[k].merge(fresh[k]);
      pooled.merge(fresh[k]);
    }
  };

  const AdaptiveResult result = adaptive_estimate(sampler, geometry.s, options.adaptive);
  point.xi = result.estimate.xi_inf;
  point.xi_err = result.estimate.xi_error();
  point.R_total = result.estimate.R;
  point.N_R = n_r;
  point.cap_reached = result.status == AdaptiveStatus::cap_reached;
  for (const auto& h : per_realization) {
    try {
      point.realization_xi.push_back(ipr_from_samples(h).xi_inf);
    } catch (const InsufficientSamples&) {
      point.realization_xi.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return point;
}

std::vector<SweepPoint> epsilon_sweep(const ProblemInstance& inst, DisorderModel model,
                                      const std::vector<double>& grid, const SweepOptions& options) {
  std::vector<SweepPoint> out;
  out.reserve(grid.size());
  for (const double eps : grid) out.push_back(measure_point(inst, model, eps, options));
  return out;
}

std::vector<double> geometric_grid(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi >= lo) || per_decade < 1)
    throw std::invalid_argument("geometric_grid: need 0 < lo <= hi and per_decade >= 1");
  std::vector<double> grid;
  const double step = 1.0 / per_decade;
  const double span = std::log10(hi / lo);
  const int count = static_cast<int>(std::floor(span / step + 1e-9));
  for (int k = 0; k <= count; ++k) grid.push_back(lo * std::pow(10.0, k * step));
  if (hi / grid.back() > 1.0 + 1e-9) grid.push_back(hi);
  return grid;
}

std::vector<double> default_epsilon_grid() { return geometric_grid(0.002, 0.2, 12); }

double find_epsilon_c(const std::vector<SweepPoint>& points, double xi0, double factor) {
  const double threshold = factor * xi0;
  const SweepPoint* prev = nullptr;
  for (const auto& p : points) {
    if (p.epsilon <= 0.0) continue;
    if (prev && prev->epsilon >= p.epsilon)
      throw std::invalid_argument("find_epsilon_c: points must be sorted by epsilon");
    if (prev && prev->xi < threshold && p.xi >= threshold) {
      const double t = (std::log(threshold) - std::log(prev->xi)) / (std::log(p.xi) - std::log(prev->xi));
      return std::exp(std::log(prev->epsilon) + t * (std::log(p.epsilon) - std::log(prev->epsilon)));
    }
    prev = &p;
  }
  throw NotBracketed("find_epsilon_c: no pair of points straddles xi = " + std::to_string(threshold));
}

BorderResult locate_epsilon_c(const ProblemInstance& inst, DisorderModel model,
                              const std::vector<double>& grid, const SweepOptions& options, int stride) {
  if (grid.empty()) throw std::invalid_argument("locate_epsilon_c: empty grid");
  if (!std::is_sorted(grid.begin(), grid.end()) || grid.front() <= 0.0)
    throw std::invalid_argument("locate_epsilon_c: grid must be positive and ascending");
  stride = std::max(stride, 1);
  BorderResult out;
  out.xi0 = ideal_ipr(inst);
  const double threshold = 10.0 * out.xi0;

  const int last = static_cast<int>(grid.size()) - 1;
  int below = -1, above = -1;
  for (int idx = 0;; idx = std::min(idx + stride, last)) {
    out.points.push_back(measure_point(inst, model, grid[static_cast<std::size_t>(idx)], options));
    if (out.points.back().xi >= threshold) {
      above = idx;
      break;
    }
    below = idx;
    if (idx == last) break;
  }
  const auto by_eps = [](const SweepPoint& a, const SweepPoint& b) { return a.epsilon < b.epsilon; };
  if (above < 0 || below < 0) {
    std::sort(out.points.begin(), out.points.end(), by_eps);
    throw NotBracketed(above < 0 ? "locate_epsilon_c: xi stays below 10 xi0 on the whole grid"
                                 : "locate_epsilon_c: xi exceeds 10 xi0 at the first grid point");
  }
  for (int idx = below + 1; idx < above; ++idx) {
    out.points.push_back(measure_point(inst, model, grid[static_cast<std::size_t>(idx)], options));
    if (out.points.back().xi >= threshold) break;
  }
  std::sort(out.points.begin(), out.points.end(), by_eps);
  out.epsilon_c = find_epsilon_c(out.points, out.xi0);
  return out;
}

double PowerLawFit::predict(double log2N) const { return B / std::pow(log2N, beta); }

PowerLawFit power_law_fit(const std::vector<std::pair<double, double>>& points, double min_log2N) {
  PowerLawFit fit;
  for (const auto& p : points)
    if (p.first >= min_log2N) fit.points.push_back(p);
  const std::size_t n = fit.points.size();
  if (n < 3) throw std::invalid_argument("power_law_fit: need at least 3 points in the fit window");
  double mx = 0.0, my = 0.0;
  for (const auto& [log2N, eps_c] : fit.points) {
    if (!(log2N > 1.0) || !(eps_c > 0.0)) throw std::invalid_argument("power_law_fit: need log2N > 1, eps_c > 0");
    mx += std::log(log2N);
    my += std::log(eps_c);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [log2N, eps_c] : fit.points) {
    const double dx = std::log(log2N) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(eps_c) - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("power_law_fit: all points share one log2N");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0.0;
  for (const auto& [log2N, eps_c] : fit.points) {
    const double res = std::log(eps_c) - (intercept + slope * std::log(log2N));
    ssr += res * res;
  }
  const double sigma2 = ssr / static_cast<double>(n - 2);
  fit.beta = -slope;
  fit.B = std::exp(intercept);
  fit.beta_err = std::sqrt(sigma2 / sxx);
  fit.B_err = fit.B * std::sqrt(sigma2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
  return fit;
}

std::vector<std::pair<u64, u64>> table1_instances() {
  return {{1007, 4},  {1517, 2},   {1517, 3},   {1927, 2},   {1927, 3},   {2773, 2},   {2773, 3},
          {4087, 2},  {4087, 4},   {5609, 2},   {5609, 3},   {8051, 2},   {8051, 4},   {10403, 2},
          {14351, 2}, {14351, 3},  {16631, 2},  {16631, 3},  {31313, 2},  {47053, 2},  {95477, 2},
          {104927, 2}, {141367, 2}, {141367, 4}, {205193, 2}, {205193, 4}};
}

std::vector<std::pair<u64, u64>> reduced_scaling_instances() {
  return {{55, 2}, {77, 2}, {91, 2}, {143, 2}, {221, 2}, {323, 2}, {493, 2}, {667, 2}, {899, 2}, {1007, 4}};
}

}  // namespace shorsim
