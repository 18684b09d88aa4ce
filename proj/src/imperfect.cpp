#include "shorsim/imperfect.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace shorsim {

namespace {

void check_rows(int n_q, std::span<const double> delta_row, std::span<const double> J_row) {
  if (delta_row.size() != static_cast<std::size_t>(n_q) ||
      J_row.size() != static_cast<std::size_t>(n_q - 1))
    throw std::invalid_argument("disorder row widths do not match n_q = " + std::to_string(n_q));
}

bool all_zero(std::span<const double> values) {
  for (const double v : values)
    if (v != 0.0) return false;
  return true;
}

}  // namespace

std::string_view to_string(DisorderModel model) {
  return model == DisorderModel::generic ? "generic" : "correlated";
}

DisorderModel parse_model(std::string_view name) {
  if (name == "generic") return DisorderModel::generic;
  if (name == "correlated") return DisorderModel::correlated;
  throw std::invalid_argument("unknown imperfection model '" + std::string(name) + "'");
}

std::span<const double> DisorderRealization::delta_row(int j) const {
  return std::span<const double>(delta).subspan(static_cast<std::size_t>(j) * n_q, n_q);
}

std::span<const double> DisorderRealization::J_row(int j) const {
  return std::span<const double>(J).subspan(static_cast<std::size_t>(j) * (n_q - 1), n_q - 1);
}

DisorderRealization sample_disorder(int n_q, int n_l, double epsilon, DisorderModel model, Rng& rng) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("sample_disorder: epsilon must be >= 0");
  if (n_q < 2 || n_l < 1) throw std::invalid_argument("sample_disorder: bad register sizes");
  DisorderRealization d{epsilon, model, n_q, n_l, {}, {}};
  d.delta.resize(static_cast<std::size_t>(n_l) * n_q);
  d.J.resize(static_cast<std::size_t>(n_l) * (n_q - 1));
  const double half_width = std::sqrt(3.0) * epsilon;
  const auto draw = [&] { return half_width * (2.0 * uniform01(rng) - 1.0); };
  const int distinct_rows = model == DisorderModel::generic ? n_l : 1;
  for (int j = 0; j < distinct_rows; ++j) {
    for (int i = 0; i < n_q; ++i) d.delta[static_cast<std::size_t>(j) * n_q + i] = draw();
    for (int i = 0; i + 1 < n_q; ++i) d.J[static_cast<std::size_t>(j) * (n_q - 1) + i] = draw();
  }
  for (int j = distinct_rows; j < n_l; ++j) {
    std::copy_n(d.delta.begin(), n_q, d.delta.begin() + static_cast<std::ptrdiff_t>(j) * n_q);
    std::copy_n(d.J.begin(), n_q - 1, d.J.begin() + static_cast<std::ptrdiff_t>(j) * (n_q - 1));
  }
  return d;
}

DisorderRealization ideal_disorder(int n_q, int n_l) {
  DisorderRealization d{0.0, DisorderModel::generic, n_q, n_l, {}, {}};
  d.delta.assign(static_cast<std::size_t>(n_l) * n_q, 0.0);
  d.J.assign(static_cast<std::size_t>(n_l) * (n_q - 1), 0.0);
  return d;
}

void apply_error_operator(StateVector& state, std::span<const double> delta_row,
                          std::span<const double> J_row, int substeps) {
  if (substeps < 1) throw std::invalid_argument("apply_error_operator: substeps must be >= 1");
  check_rows(state.qubits(), delta_row, J_row);
  const double dt = 1.0 / substeps;
  for (int k = 0; k < substeps; ++k) {
    apply_diagonal_z(state, delta_row, 0.5 * dt);
    apply_xx_chain(state, J_row, dt);
    apply_diagonal_z(state, delta_row, 0.5 * dt);
  }
}

Eigen::MatrixXcd perturbation_hamiltonian(int n_q, std::span<const double> delta_row,
                                          std::span<const double> J_row) {
  check_rows(n_q, delta_row, J_row);
  const Eigen::Index dim = Eigen::Index{1} << n_q;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index y = 0; y < dim; ++y) {
    double energy = 0.0;
    for (int i = 0; i < n_q; ++i) energy += ((y >> i) & 1) ? -delta_row[i] : delta_row[i];
    H(y, y) = energy;
    for (int i = 0; i + 1 < n_q; ++i) H(y ^ (Eigen::Index{3} << i), y) += 2.0 * J_row[i];
  }
  return H;
}

Eigen::MatrixXcd exact_error_operator(int n_q, std::span<const double> delta_row,
                                      std::span<const double> J_row) {
  if (n_q > 10) throw std::invalid_argument("exact_error_operator: n_q > 10 exceeds the dense limit");
  // dH is real symmetric in the computational basis.
  const Eigen::MatrixXd H = perturbation_hamiltonian(n_q, delta_row, J_row).real();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
  const Eigen::MatrixXcd V = eig.eigenvectors().cast<cplx>();
  const Eigen::VectorXcd phases =
      eig.eigenvalues().unaryExpr([](double e) { return std::polar(1.0, e); });
  return V * phases.asDiagonal() * V.transpose();
}

StepErrorOperator::StepErrorOperator(int n_q, std::span<const double> delta_row,
                                     std::span<const double> J_row, PropagationOptions options)
    : n_q_(n_q), options_(options), delta_(delta_row.begin(), delta_row.end()),
      J_(J_row.begin(), J_row.end()) {
  check_rows(n_q, delta_row, J_row);
  if (options.method == Propagation::split && options.substeps < 1)
    throw std::invalid_argument("StepErrorOperator: substeps must be >= 1");
  identity_ = all_zero(delta_row) && all_zero(J_row);
  if (identity_) return;

  lo_bits_ = n_q / 2;
  const int hi_bits = n_q - lo_bits_;
  energy_lo_.assign(std::size_t{1} << lo_bits_, 0.0);
  energy_hi_.assign(std::size_t{1} << hi_bits, 0.0);
  for (std::size_t l = 0; l < energy_lo_.size(); ++l)
    for (int i = 0; i < lo_bits_; ++i) energy_lo_[l] += ((l >> i) & 1U) ? -delta_[i] : delta_[i];
  for (std::size_t h = 0; h < energy_hi_.size(); ++h)
    for (int i = 0; i < hi_bits; ++i)
      energy_hi_[h] += ((h >> i) & 1U) ? -delta_[lo_bits_ + i] : delta_[lo_bits_ + i];

  if (options.method == Propagation::split) {
    const double dt = 1.0 / options.substeps;
    const auto phases = [](const std::vector<double>& e, double t) {
      std::vector<cplx> out(e.size());
      for (std::size_t k = 0; k < e.size(); ++k) out[k] = std::polar(1.0, t * e[k]);
      return out;
    };
    half_phase_lo_ = phases(energy_lo_, 0.5 * dt);
    half_phase_hi_ = phases(energy_hi_, 0.5 * dt);
    full_phase_lo_ = phases(energy_lo_, dt);
    full_phase_hi_ = phases(energy_hi_, dt);
    for (const double J : J_) {
      bond_cos_.push_back(std::cos(2.0 * J * dt));
      bond_sin_.push_back(std::sin(2.0 * J * dt));
    }
    return;
  }

  // exp(i b x) = J_0(b) + 2 sum_k i^k J_k(b) T_k(x) on x in [-1, 1], with b >= ||dH||.
  for (const double d : delta_) bound_ += std::abs(d);
  for (const double J : J_) bound_ += 2.0 * std::abs(J);
  const cplx i_unit{0.0, 1.0};
  cplx i_pow{1.0, 0.0};
  for (int k = 0;; ++k) {
    const double jk = std::cyl_bessel_j(static_cast<double>(k), bound_);
    cheb_coef_.push_back((k == 0 ? 1.0 : 2.0) * jk * i_pow);
    i_pow *= i_unit;
    if (k > bound_ && std::abs(jk) < 1e-17) break;
    if (k > 400) throw std::runtime_error("StepErrorOperator: Chebyshev series failed to converge");
  }
  const std::size_t dim = std::size_t{1} << n_q;
  w_prev_.resize(dim);
  w_cur_.resize(dim);
  acc_.resize(dim);
}

void StepErrorOperator::apply(StateVector& state) const {
  if (state.qubits() != n_q_) throw std::invalid_argument("StepErrorOperator: register size mismatch");
  apply(state.amplitudes());
}

void StepErrorOperator::apply(std::span<cplx> amp) const {
  if (identity_) return;
  if (options_.method == Propagation::split)
    apply_split(amp);
  else
    apply_chebyshev(amp);
}

void StepErrorOperator::apply_split(std::span<cplx> amp) const {
  const std::size_t lo_size = energy_lo_.size();
  const auto diagonal = [&](const std::vector<cplx>& lo, const std::vector<cplx>& hi) {
    for (std::size_t h = 0; h < hi.size(); ++h) {
      cplx* block = amp.data() + h * lo_size;
      const cplx ph = hi[h];
      for (std::size_t l = 0; l < lo_size; ++l) block[l] *= ph * lo[l];
    }
  };
  const auto xx_chain = [&] {
    for (int i = 0; i + 1 < n_q_; ++i) {
      const double c = bond_cos_[i];
      const double s = bond_sin_[i];
      const std::size_t low = std::size_t{1} << i;
      for (std::size_t base = 0; base < amp.size(); base += 4 * low) {
        cplx* A = amp.data() + base;
        cplx* B = A + low;
        cplx* C = B + low;
        cplx* D = C + low;
        for (std::size_t k = 0; k < low; ++k) {
          const cplx a = A[k], d = D[k], b = B[k], cc = C[k];
          A[k] = c * a + cplx{-s * d.imag(), s * d.real()};
          D[k] = c * d + cplx{-s * a.imag(), s * a.real()};
          B[k] = c * b + cplx{-s * cc.imag(), s * cc.real()};
          C[k] = c * cc + cplx{-s * b.imag(), s * b.real()};
        }
      }
    }
  };
  diagonal(half_phase_lo_, half_phase_hi_);
  for (int k = 0; k < options_.substeps; ++k) {
    xx_chain();
    if (k + 1 < options_.substeps) diagonal(full_phase_lo_, full_phase_hi_);
  }
  diagonal(half_phase_lo_, half_phase_hi_);
}

void StepErrorOperator::add_bond_terms(std::span<const cplx> v, std::span<cplx> acc,
                                       double scale) const {
  for (int i = 0; i + 1 < n_q_; ++i) {
    const double g = scale * 2.0 * J_[i] / bound_;
    if (g == 0.0) continue;
    const std::size_t low = std::size_t{1} << i;
    for (std::size_t base = 0; base < v.size(); base += 4 * low) {
      const cplx* vA = v.data() + base;
      const cplx* vB = vA + low;
      const cplx* vC = vB + low;
      const cplx* vD = vC + low;
      cplx* aA = acc.data() + base;
      cplx* aB = aA + low;
      cplx* aC = aB + low;
      cplx* aD = aC + low;
      for (std::size_t k = 0; k < low; ++k) {
        aA[k] += g * vD[k];
        aD[k] += g * vA[k];
        aB[k] += g * vC[k];
        aC[k] += g * vB[k];
      }
    }
  }
}

void StepErrorOperator::apply_chebyshev(std::span<cplx> amp) const {
  const std::size_t lo_size = energy_lo_.size();
  const std::size_t hi_size = energy_hi_.size();
  const double inv_b = 1.0 / bound_;

  // w_prev = v, w_cur = H~ v
  std::copy(amp.begin(), amp.end(), w_prev_.begin());
  for (std::size_t h = 0; h < hi_size; ++h) {
    const double eh = energy_hi_[h];
    const std::size_t off = h * lo_size;
    for (std::size_t l = 0; l < lo_size; ++l)
      w_cur_[off + l] = ((eh + energy_lo_[l]) * inv_b) * amp[off + l];
  }
  add_bond_terms(w_prev_, w_cur_, 1.0);
  const cplx c0 = cheb_coef_[0];
  const cplx c1 = cheb_coef_[1];
  for (std::size_t y = 0; y < amp.size(); ++y) acc_[y] = c0 * w_prev_[y] + c1 * w_cur_[y];

  for (std::size_t k = 2; k < cheb_coef_.size(); ++k) {
    // w_prev <- 2 H~ w_cur - w_prev
    for (std::size_t h = 0; h < hi_size; ++h) {
      const double eh = energy_hi_[h];
      const std::size_t off = h * lo_size;
      for (std::size_t l = 0; l < lo_size; ++l)
        w_prev_[off + l] = (2.0 * (eh + energy_lo_[l]) * inv_b) * w_cur_[off + l] - w_prev_[off + l];
    }
    add_bond_terms(w_cur_, w_prev_, 2.0);
    const cplx ck = cheb_coef_[k];
    for (std::size_t y = 0; y < amp.size(); ++y) acc_[y] += ck * w_prev_[y];
    std::swap(w_prev_, w_cur_);
  }
  std::copy(acc_.begin(), acc_.end(), amp.begin());
}

}  // namespace shorsim
