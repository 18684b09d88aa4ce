#pragma once

#include <Eigen/Dense>
#include <span>
#include <string_view>
#include <vector>

#include "shorsim/rng.hpp"
#include "shorsim/statevec.hpp"

namespace shorsim {

enum class DisorderModel { generic, correlated };

std::string_view to_string(DisorderModel model);
DisorderModel parse_model(std::string_view name);

/// Coefficients delta_i(j), J_i(j) of the static perturbation for every step j.
struct DisorderRealization {
  double epsilon = 0.0;
  DisorderModel model = DisorderModel::generic;
  int n_q = 0;
  int n_l = 0;
  std::vector<double> delta;  // n_l rows of n_q
  std::vector<double> J;      // n_l rows of n_q - 1

  std::span<const double> delta_row(int j) const;
  std::span<const double> J_row(int j) const;
};

/// Entries uniform on [-sqrt(3) eps, sqrt(3) eps]; the correlated model draws one
/// row and repeats it. Draws are taken as sqrt(3) eps (2u - 1), so one stream
/// yields the same realization shape at every eps.
DisorderRealization sample_disorder(int n_q, int n_l, double epsilon, DisorderModel model, Rng& rng);

/// Zero-strength realization (the ideal algorithm).
DisorderRealization ideal_disorder(int n_q, int n_l);

/// Substep count of the symmetric split. Smallest m for which the n_q = 6,
/// eps = 0.12 reference realization stays below 1e-6 (see test_imperfect.cpp).
inline constexpr int kDefaultSubsteps = 163;

/// [e^{iZ/2m} e^{iXX/m} e^{iZ/2m}]^m approximation of exp(i dH).
void apply_error_operator(StateVector& state, std::span<const double> delta_row,
                          std::span<const double> J_row, int substeps = kDefaultSubsteps);

/// Dense dH = sum_i delta_i Z_i + 2 sum_i J_i X_i X_{i+1}.
Eigen::MatrixXcd perturbation_hamiltonian(int n_q, std::span<const double> delta_row,
                                          std::span<const double> J_row);

/// exp(i dH) by Hermitian eigendecomposition. n_q <= 10.
Eigen::MatrixXcd exact_error_operator(int n_q, std::span<const double> delta_row,
                                      std::span<const double> J_row);

enum class Propagation {
  split,      // symmetric splitting with `substeps`
  chebyshev,  // Chebyshev expansion, converged to double precision
};

struct PropagationOptions {
  Propagation method = Propagation::chebyshev;
  int substeps = kDefaultSubsteps;
};

/// exp(i dH_j) for one step, with per-row tables precomputed so it can be
/// applied many times. Not thread-safe: holds scratch buffers.
class StepErrorOperator {
 public:
  StepErrorOperator(int n_q, std::span<const double> delta_row, std::span<const double> J_row,
                    PropagationOptions options = {});

  bool is_identity() const noexcept { return identity_; }
  void apply(StateVector& state) const;
  void apply(std::span<cplx> amplitudes) const;

  /// Number of Chebyshev terms kept (0 for the split method).
  int chebyshev_terms() const noexcept { return static_cast<int>(cheb_coef_.size()); }

 private:
  void apply_split(std::span<cplx> amp) const;
  void apply_chebyshev(std::span<cplx> amp) const;
  /// acc[y] += scale * (H/b) v[y], without the diagonal part.
  void add_bond_terms(std::span<const cplx> v, std::span<cplx> acc, double scale) const;

  int n_q_;
  PropagationOptions options_;
  bool identity_ = false;
  std::vector<double> delta_;
  std::vector<double> J_;
  // Diagonal energy e(y) = lo[y & lo_mask] + hi[y >> lo_bits].
  int lo_bits_ = 0;
  std::vector<double> energy_lo_;
  std::vector<double> energy_hi_;
  // Split tables.
  std::vector<cplx> half_phase_lo_, half_phase_hi_, full_phase_lo_, full_phase_hi_;
  std::vector<double> bond_cos_, bond_sin_;
  // Chebyshev data.
  double bound_ = 0.0;
  std::vector<cplx> cheb_coef_;
  mutable std::vector<cplx> w_prev_, w_cur_, acc_;
};

}  // namespace shorsim
