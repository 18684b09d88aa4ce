#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "shorsim/numtheory.hpp"

namespace shorsim {

using cplx = std::complex<double>;

/// Dense amplitude vector over the n_q-qubit computational register.
/// Bit i of the basis index is qubit i.
class StateVector {
 public:
  StateVector() = default;
  /// |0...0>
  explicit StateVector(int n_q);
  static StateVector basis(int n_q, u64 y);

  int qubits() const noexcept { return n_q_; }
  std::size_t size() const noexcept { return amp_.size(); }

  std::span<cplx> amplitudes() noexcept { return amp_; }
  std::span<const cplx> amplitudes() const noexcept { return amp_; }
  cplx& operator[](std::size_t y) { return amp_[y]; }
  const cplx& operator[](std::size_t y) const { return amp_[y]; }

  double norm_squared() const noexcept;
  /// Scales to unit norm; returns the norm before scaling.
  double normalize();

 private:
  int n_q_ = 0;
  std::vector<cplx> amp_;
};

/// Basis permutation y -> y*m mod N (y < N), identity for y >= N.
class ModMultTable {
 public:
  ModMultTable(int n_q, u64 multiplier, u64 N);
  u64 multiplier() const noexcept { return multiplier_; }
  /// out[pi(y)] = in[y]; out must not alias in.
  void apply(std::span<const cplx> in, std::span<cplx> out) const;

 private:
  u64 multiplier_;
  std::vector<std::uint32_t> target_;
};

/// Controlled-multiplication action on the register: |y> -> |y*x mod N>.
/// Throws TrivialFactor when gcd(x, N) != 1 and std::invalid_argument when N >= 2^n_q.
void apply_modmult(StateVector& state, u64 x, u64 N);

/// amp[y] *= exp(i t sum_i delta_i z_i(y)), z_i = +1 for bit i clear, -1 for bit i set.
void apply_diagonal_z(StateVector& state, std::span<const double> deltas, double t);

/// prod_i exp(i t 2 J_i X_i X_{i+1}); the factors commute.
void apply_xx_chain(StateVector& state, std::span<const double> Js, double t);

/// Single factor exp(i t 2 J X_bond X_{bond+1}); exposed for ordering tests.
void apply_xx_bond(StateVector& state, int bond, double J, double t);

/// Projective measurement of the control qubit given its two register branches.
/// Returns 0 when u < ||branch0||^2, else 1. The selected branch, renormalized,
/// is left in branch0 (swapped in when the outcome is 1).
/// Throws DegenerateState when both branches vanish and std::invalid_argument when
/// the branch norms do not sum to one.
int collapse(StateVector& branch0, StateVector& branch1, double u);

}  // namespace shorsim
