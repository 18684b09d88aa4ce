#include "shorsim/shor_full.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include "shorsim/shor_single.hpp"

namespace shorsim {

FullRegisterState::FullRegisterState(int n_l, int n_q) : n_l_(n_l), n_q_(n_q) {
  if (n_l < 1 || n_q < 1 || n_l + n_q > kMaxFullRegisterQubits)
    throw std::invalid_argument("FullRegisterState: " + std::to_string(n_l + n_q) +
                                " qubits exceed the full-register limit of " +
                                std::to_string(kMaxFullRegisterQubits));
  amp_.assign(std::size_t{1} << (n_l + n_q), cplx{0.0, 0.0});
  amp_[1] = 1.0;
}

double FullRegisterState::norm_squared() const noexcept {
  double acc = 0.0;
  for (const auto& a : amp_) acc += std::norm(a);
  return acc;
}

void FullRegisterState::hadamard(int j) {
  const double s = std::numbers::sqrt2 / 2.0;
  const std::size_t bit = std::size_t{1} << j;
  const std::size_t dim = register_dim();
  for (std::size_t c = 0; c < control_dim(); ++c) {
    if (c & bit) continue;
    cplx* lo = amp_.data() + (c << n_q_);
    cplx* hi = amp_.data() + ((c | bit) << n_q_);
    for (std::size_t y = 0; y < dim; ++y) {
      const cplx a = lo[y], b = hi[y];
      lo[y] = s * (a + b);
      hi[y] = s * (a - b);
    }
  }
}

void FullRegisterState::controlled_phase(int j, int k, double angle) {
  const std::size_t mask = (std::size_t{1} << j) | (std::size_t{1} << k);
  const cplx w = std::polar(1.0, angle);
  for (std::size_t c = 0; c < control_dim(); ++c) {
    if ((c & mask) != mask) continue;
    for (auto& a : slice(c)) a *= w;
  }
}

void FullRegisterState::reverse_control() {
  const std::size_t dim = register_dim();
  for (std::size_t c = 0; c < control_dim(); ++c) {
    std::size_t rev = 0;
    for (int b = 0; b < n_l_; ++b)
      if ((c >> b) & 1U) rev |= std::size_t{1} << (n_l_ - 1 - b);
    if (rev <= c) continue;
    std::swap_ranges(amp_.begin() + static_cast<std::ptrdiff_t>(c * dim),
                     amp_.begin() + static_cast<std::ptrdiff_t>((c + 1) * dim),
                     amp_.begin() + static_cast<std::ptrdiff_t>(rev * dim));
  }
}

std::vector<double> FullRegisterState::control_distribution() const {
  std::vector<double> P(control_dim(), 0.0);
  const std::size_t dim = register_dim();
  for (std::size_t c = 0; c < P.size(); ++c) {
    double acc = 0.0;
    for (std::size_t y = 0; y < dim; ++y) acc += std::norm(amp_[c * dim + y]);
    P[c] = acc;
  }
  return P;
}

void qft(FullRegisterState& state) {
  const int n_l = state.control_qubits();
  // Rightmost factor first: j = n_l - 1 down to 0, phases before the Hadamard.
  for (int j = n_l - 1; j >= 0; --j) {
    for (int k = j + 1; k < n_l; ++k) state.controlled_phase(j, k, std::numbers::pi * std::ldexp(1.0, j - k));
    state.hadamard(j);
  }
  state.reverse_control();
}

std::vector<double> run_full_shor(const ProblemInstance& inst, const DisorderRealization& disorder,
                                  PropagationOptions options) {
  if (disorder.n_q != inst.n_q || disorder.n_l != inst.n_l)
    throw std::invalid_argument("run_full_shor: disorder shape does not match the instance");
  FullRegisterState state(inst.n_l, inst.n_q);
  for (int j = 0; j < inst.n_l; ++j) state.hadamard(j);

  const ModMultSchedule schedule(inst);
  std::vector<cplx> scratch(state.register_dim());
  for (int j = inst.n_l - 1; j >= 0; --j) {
    const ModMultTable& table = schedule.step(j);
    const StepErrorOperator error(inst.n_q, disorder.delta_row(j), disorder.J_row(j), options);
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t c = 0; c < state.control_dim(); ++c) {
      auto slice = state.slice(c);
      if (c & bit) {
        table.apply(slice, scratch);
        std::copy(scratch.begin(), scratch.end(), slice.begin());
      }
      error.apply(slice);
    }
  }
  qft(state);
  return state.control_distribution();
}

AnalyticPeakModel AnalyticPeakModel::make(u64 r, u64 Q) {
  if (r < 1 || Q < 1) throw std::invalid_argument("AnalyticPeakModel: need r, Q >= 1");
  AnalyticPeakModel model{r, Q, {}, {}};
  model.M.resize(r);
  std::map<u64, u64> counts;
  for (u64 k = 0; k < r; ++k) {
    model.M[k] = k < Q ? (Q - k - 1) / r + 1 : 0;
    ++counts[model.M[k]];
  }
  model.groups.assign(counts.begin(), counts.end());
  return model;
}

double analytic_P(u64 a, const AnalyticPeakModel& model) {
  const u64 Q = model.Q;
  if (a >= Q) throw std::invalid_argument("analytic_P: a out of range");
  const double q2 = static_cast<double>(Q) * static_cast<double>(Q);
  // Phases reduced exactly in integers: theta = pi (a r mod Q) / Q.
  const u64 residue = static_cast<u64>((static_cast<unsigned __int128>(a) * model.r) % Q);
  double acc = 0.0;
  if (residue == 0) {
    for (const auto& [m, count] : model.groups)
      acc += static_cast<double>(count) * static_cast<double>(m) * static_cast<double>(m);
    return acc / q2;
  }
  // sin^2(pi t / Q) is symmetric under t -> Q - t; fold for accuracy near t = Q.
  const auto sin_pi_frac = [Q](u64 t) {
    return std::sin(std::numbers::pi * static_cast<double>(std::min(t, Q - t)) / static_cast<double>(Q));
  };
  const double denom = sin_pi_frac(residue);
  for (const auto& [m, count] : model.groups) {
    const u64 arg = static_cast<u64>((static_cast<unsigned __int128>(m) * residue) % Q);
    const double num = sin_pi_frac(arg);
    acc += static_cast<double>(count) * num * num;
  }
  return acc / (denom * denom * q2);
}

std::vector<double> analytic_distribution(const ProblemInstance& inst) {
  const AnalyticPeakModel model = AnalyticPeakModel::make(inst.r, inst.Q);
  std::vector<double> P(inst.Q);
  for (u64 a = 0; a < inst.Q; ++a) P[a] = analytic_P(a, model);
  return P;
}

}  // namespace shorsim
