#pragma once

#include <memory>
#include <span>
#include <vector>

#include "shorsim/imperfect.hpp"
#include "shorsim/numtheory.hpp"
#include "shorsim/rng.hpp"
#include "shorsim/statevec.hpp"

namespace shorsim {

/// Bits of one measurement series in generation order (alpha_{n_l-1} first)
/// and the reconstructed control coordinate.
struct MeasurementRecord {
  std::vector<int> alphas;
  u64 a = 0;
};

/// a = sum_g alphas[g] 2^g for bits listed in generation order.
u64 reconstruct_coordinate(std::span<const int> alphas);

/// Accumulated semiclassical QFT phase for step j:
/// pi * sum_{k=j+1}^{n_l-1} alpha_k 2^{j-k}, with history in generation order
/// (history[0] = alpha_{n_l-1}).
double feedback_phase(std::span<const int> history, int j, int n_l);

/// Register state between steps; the control qubit has been measured.
struct IterationState {
  StateVector phi;     // computational register, unit norm
  int j = 0;           // next step index
  int alpha_next = 0;  // alpha_{j+1}, the last measured bit

  /// |1>_{n_q}, j = n_l - 1, alpha_{n_l} = 0
  static IterationState initial(const ProblemInstance& inst);
};

/// The modular-multiplication permutations x^{2^j} mod N for j < n_l, shared
/// across disorder realizations of one instance.
class ModMultSchedule {
 public:
  explicit ModMultSchedule(const ProblemInstance& inst);
  const ModMultTable& step(int j) const { return tables_.at(static_cast<std::size_t>(j)); }

 private:
  std::vector<ModMultTable> tables_;
};

/// Single-control-qubit order finding for one (instance, disorder realization).
/// Precomputes the per-step operators; one object serves any number of
/// measurement series but is not safe to share between threads.
class SingleControlShor {
 public:
  SingleControlShor(const ProblemInstance& inst, const DisorderRealization& disorder,
                    PropagationOptions options = {});
  SingleControlShor(const ProblemInstance& inst, std::shared_ptr<const ModMultSchedule> schedule,
                    const DisorderRealization& disorder, PropagationOptions options = {});

  const ProblemInstance& instance() const noexcept { return inst_; }

  /// One step of the recursion. `history` holds alpha_{n_l-1} ... alpha_{st.j+1}.
  /// Returns alpha_j; st advances to j - 1 with the collapsed, error-evolved register.
  int iterate_step(IterationState& st, std::span<const int> history, Rng& rng);

  /// Probability of measuring 0 at the next step, without consuming randomness.
  double probability_zero(const IterationState& st, std::span<const int> history);

  MeasurementRecord run(Rng& rng);
  /// Same as run() but returns only the coordinate.
  u64 sample(Rng& rng);

 private:
  int step(StateVector& phi, int j, double theta, double u);

  ProblemInstance inst_;
  std::shared_ptr<const ModMultSchedule> schedule_;
  std::vector<StepErrorOperator> errors_;
  StateVector phi_, branch0_, branch1_;
  std::vector<cplx> permuted_;
};

MeasurementRecord run_measurement_series(const ProblemInstance& inst,
                                         const DisorderRealization& disorder, Rng& rng,
                                         PropagationOptions options = {});

/// Literal gate-by-gate simulation of the control qubit as two register branches
/// (|0> part, |1> part). Used to cross-check the fused step.
class ControlRegister {
 public:
  /// |alpha> (x) phi
  ControlRegister(int alpha, const StateVector& phi);

  void hadamard();
  /// B^(1)(angle): multiplies the |1> part by e^{i angle}.
  void phase(double angle);
  void controlled_modmult(const ModMultTable& table);
  void error(const StepErrorOperator& op);
  /// Measures the control qubit; returns the bit and the collapsed register.
  int measure(double u, StateVector& out);

  const StateVector& branch(int b) const { return b == 0 ? zero_ : one_; }

 private:
  StateVector zero_, one_;
};

/// Gate-level version of SingleControlShor::iterate_step (same randomness use).
int iterate_step_gate_level(IterationState& st, std::span<const int> history,
                            const ProblemInstance& inst, std::span<const double> delta_row,
                            std::span<const double> J_row, Rng& rng, PropagationOptions options = {});

}  // namespace shorsim
