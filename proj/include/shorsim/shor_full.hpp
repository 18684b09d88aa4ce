#pragma once

#include <utility>
#include <vector>

#include "shorsim/imperfect.hpp"
#include "shorsim/numtheory.hpp"
#include "shorsim/statevec.hpp"

namespace shorsim {

/// Memory guard for the joint register (2^26 amplitudes, 1 GiB).
inline constexpr int kMaxFullRegisterQubits = 26;

/// Joint state of n_l control qubits and the n_q-qubit computational register,
/// stored control-major: amplitude(c, y) at index c * 2^n_q + y.
class FullRegisterState {
 public:
  FullRegisterState(int n_l, int n_q);  // |0>_{n_l} |1>_{n_q}

  int control_qubits() const noexcept { return n_l_; }
  int register_qubits() const noexcept { return n_q_; }
  std::size_t register_dim() const noexcept { return std::size_t{1} << n_q_; }
  std::size_t control_dim() const noexcept { return std::size_t{1} << n_l_; }

  std::span<cplx> amplitudes() noexcept { return amp_; }
  std::span<const cplx> amplitudes() const noexcept { return amp_; }
  std::span<cplx> slice(std::size_t c) { return std::span<cplx>(amp_).subspan(c << n_q_, register_dim()); }

  double norm_squared() const noexcept;

  /// Hadamard on control qubit j.
  void hadamard(int j);
  /// Two-qubit controlled phase B^(2)_{jk}(angle) on control qubits j, k.
  void controlled_phase(int j, int k, double angle);
  /// R: reverses the order of the control qubits.
  void reverse_control();

  /// P(a) = sum_y |<a, y|psi>|^2.
  std::vector<double> control_distribution() const;

 private:
  int n_l_, n_q_;
  std::vector<cplx> amp_;
};

/// Quantum Fourier transform of the control register by its gate sequence:
/// Hadamards, controlled phases pi 2^{j-k}, and the final reversal.
void qft(FullRegisterState& state);

/// Exact P(a) of the n_l-control-qubit algorithm under the given disorder.
/// Throws std::invalid_argument beyond kMaxFullRegisterQubits.
std::vector<double> run_full_shor(const ProblemInstance& inst, const DisorderRealization& disorder,
                                  PropagationOptions options = {});

/// Ideal peak shape: M_k = floor((Q - k - 1) / r) + 1 for k < r.
struct AnalyticPeakModel {
  u64 r = 0;
  u64 Q = 0;
  std::vector<u64> M;
  /// Distinct M_k values with multiplicities (M_k takes at most two values).
  std::vector<std::pair<u64, u64>> groups;

  static AnalyticPeakModel make(u64 r, u64 Q);
};

/// Ideal P(a); the removable singularity at a r / Q integer contributes M_k^2.
double analytic_P(u64 a, const AnalyticPeakModel& model);

/// analytic_P over all a in [0, Q).
std::vector<double> analytic_distribution(const ProblemInstance& inst);

}  // namespace shorsim
