#include "shorsim/shor_single.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace shorsim {

u64 reconstruct_coordinate(std::span<const int> alphas) {
  u64 a = 0;
  for (std::size_t g = 0; g < alphas.size(); ++g)
    if (alphas[g]) a |= u64{1} << g;
  return a;
}

double feedback_phase(std::span<const int> history, int j, int n_l) {
  if (history.size() != static_cast<std::size_t>(n_l - 1 - j))
    throw std::invalid_argument("feedback_phase: history length must be n_l - 1 - j");
  // F_j = sum_{k>j} alpha_k 2^{j-k}, built from the oldest bit: F_j = (F_{j+1} + alpha_{j+1}) / 2.
  double fraction = 0.0;
  for (const int bit : history) fraction = 0.5 * (fraction + bit);
  return std::numbers::pi * fraction;
}

IterationState IterationState::initial(const ProblemInstance& inst) {
  return IterationState{StateVector::basis(inst.n_q, 1), inst.n_l - 1, 0};
}

ModMultSchedule::ModMultSchedule(const ProblemInstance& inst) {
  tables_.reserve(static_cast<std::size_t>(inst.n_l));
  u64 m = inst.x % inst.N;  // x^{2^j} mod N
  for (int j = 0; j < inst.n_l; ++j) {
    tables_.emplace_back(inst.n_q, m, inst.N);
    m = mod_mul(m, m, inst.N);
  }
}

SingleControlShor::SingleControlShor(const ProblemInstance& inst, const DisorderRealization& disorder,
                                     PropagationOptions options)
    : SingleControlShor(inst, std::make_shared<const ModMultSchedule>(inst), disorder, options) {}

SingleControlShor::SingleControlShor(const ProblemInstance& inst,
                                     std::shared_ptr<const ModMultSchedule> schedule,
                                     const DisorderRealization& disorder, PropagationOptions options)
    : inst_(inst), schedule_(std::move(schedule)), phi_(inst.n_q), branch0_(inst.n_q),
      branch1_(inst.n_q), permuted_(std::size_t{1} << inst.n_q) {
  if (disorder.n_q != inst.n_q || disorder.n_l != inst.n_l)
    throw std::invalid_argument("SingleControlShor: disorder shape does not match the instance");
  errors_.reserve(static_cast<std::size_t>(inst.n_l));
  for (int j = 0; j < inst.n_l; ++j)
    errors_.emplace_back(inst.n_q, disorder.delta_row(j), disorder.J_row(j), options);
}

// Control enters as (|0> + |1>)/sqrt2 (x) phi (the sign fix guarantees it). With
// U the permutation, E the error operator and w = e^{i theta}, the control
// branches after the final Hadamard are E(phi + w U phi)/2 and E(phi - w U phi)/2.
// E is unitary and linear, so the outcome probabilities do not depend on it and
// it is applied once, to the surviving branch.
int SingleControlShor::step(StateVector& phi, int j, double theta, double u) {
  schedule_->step(j).apply(phi.amplitudes(), permuted_);
  const cplx w = std::polar(0.5, theta);
  auto b0 = branch0_.amplitudes();
  auto b1 = branch1_.amplitudes();
  for (std::size_t y = 0; y < permuted_.size(); ++y) {
    const cplx half_phi = 0.5 * phi[y];
    const cplx rotated = w * permuted_[y];
    b0[y] = half_phi + rotated;
    b1[y] = half_phi - rotated;
  }
  const int bit = collapse(branch0_, branch1_, u);
  errors_[static_cast<std::size_t>(j)].apply(branch0_);
  std::swap(phi, branch0_);
  return bit;
}

int SingleControlShor::iterate_step(IterationState& st, std::span<const int> history, Rng& rng) {
  if (st.j < 0) throw std::invalid_argument("iterate_step: recursion already finished");
  const double theta = feedback_phase(history, st.j, inst_.n_l);
  const int bit = step(st.phi, st.j, theta, uniform01(rng));
  st.alpha_next = bit;
  --st.j;
  return bit;
}

double SingleControlShor::probability_zero(const IterationState& st, std::span<const int> history) {
  const double theta = feedback_phase(history, st.j, inst_.n_l);
  schedule_->step(st.j).apply(st.phi.amplitudes(), permuted_);
  const cplx w = std::polar(1.0, theta);
  double acc = 0.0;
  for (std::size_t y = 0; y < permuted_.size(); ++y) acc += std::norm(st.phi[y] + w * permuted_[y]);
  return 0.25 * acc;
}

u64 SingleControlShor::sample(Rng& rng) {
  auto amp = phi_.amplitudes();
  std::fill(amp.begin(), amp.end(), cplx{0.0, 0.0});
  amp[1] = 1.0;
  u64 a = 0;
  double fraction = 0.0;
  for (int g = 0; g < inst_.n_l; ++g) {
    const int j = inst_.n_l - 1 - g;
    const int bit = step(phi_, j, std::numbers::pi * fraction, uniform01(rng));
    if (bit) a |= u64{1} << g;
    fraction = 0.5 * (fraction + bit);
  }
  return a;
}

MeasurementRecord SingleControlShor::run(Rng& rng) {
  MeasurementRecord rec;
  rec.alphas.reserve(static_cast<std::size_t>(inst_.n_l));
  IterationState st = IterationState::initial(inst_);
  while (st.j >= 0) rec.alphas.push_back(iterate_step(st, rec.alphas, rng));
  rec.a = reconstruct_coordinate(rec.alphas);
  return rec;
}

MeasurementRecord run_measurement_series(const ProblemInstance& inst,
                                         const DisorderRealization& disorder, Rng& rng,
                                         PropagationOptions options) {
  SingleControlShor shor(inst, disorder, options);
  return shor.run(rng);
}

ControlRegister::ControlRegister(int alpha, const StateVector& phi) : zero_(phi), one_(phi) {
  auto& empty = alpha == 0 ? one_ : zero_;
  for (auto& a : empty.amplitudes()) a = 0.0;
}

void ControlRegister::hadamard() {
  const double s = std::numbers::sqrt2 / 2.0;
  auto z = zero_.amplitudes();
  auto o = one_.amplitudes();
  for (std::size_t y = 0; y < z.size(); ++y) {
    const cplx a = z[y], b = o[y];
    z[y] = s * (a + b);
    o[y] = s * (a - b);
  }
}

void ControlRegister::phase(double angle) {
  const cplx w = std::polar(1.0, angle);
  for (auto& a : one_.amplitudes()) a *= w;
}

void ControlRegister::controlled_modmult(const ModMultTable& table) {
  StateVector out(one_.qubits());
  table.apply(one_.amplitudes(), out.amplitudes());
  one_ = std::move(out);
}

void ControlRegister::error(const StepErrorOperator& op) {
  op.apply(zero_);
  op.apply(one_);
}

int ControlRegister::measure(double u, StateVector& out) {
  StateVector b0 = zero_, b1 = one_;
  const int bit = collapse(b0, b1, u);
  out = std::move(b0);
  return bit;
}

int iterate_step_gate_level(IterationState& st, std::span<const int> history,
                            const ProblemInstance& inst, std::span<const double> delta_row,
                            std::span<const double> J_row, Rng& rng, PropagationOptions options) {
  const int j = st.j;
  if (history.size() != static_cast<std::size_t>(inst.n_l - 1 - j))
    throw std::invalid_argument("iterate_step_gate_level: history length must be n_l - 1 - j");
  ControlRegister reg(st.alpha_next, st.phi);
  reg.hadamard();
  reg.phase(st.alpha_next * std::numbers::pi);  // sign fix
  reg.controlled_modmult(ModMultTable(inst.n_q, mod_pow(inst.x, u64{1} << j, inst.N), inst.N));
  reg.error(StepErrorOperator(inst.n_q, delta_row, J_row, options));
  // Classically controlled B^(1)(alpha_k pi 2^{j-k}) for k = j+1 .. n_l-1.
  for (std::size_t idx = 0; idx < history.size(); ++idx) {
    const int k = inst.n_l - 1 - static_cast<int>(idx);
    if (history[idx]) reg.phase(std::numbers::pi * std::ldexp(1.0, j - k));
  }
  reg.hadamard();
  const int bit = reg.measure(uniform01(rng), st.phi);
  st.alpha_next = bit;
  --st.j;
  return bit;
}

}  // namespace shorsim
