#include "shorsim/statevec.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "shorsim/errors.hpp"

namespace shorsim {

namespace {

void require_length(std::span<const double> values, std::size_t expected, const char* what) {
  if (values.size() != expected)
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(expected) +
                                " coefficients, got " + std::to_string(values.size()));
}

}  // namespace

StateVector::StateVector(int n_q) : n_q_(n_q) {
  if (n_q < 1 || n_q > kMaxComputationalQubits)
    throw std::invalid_argument("StateVector: qubit count out of range");
  amp_.assign(std::size_t{1} << n_q, cplx{0.0, 0.0});
  amp_[0] = 1.0;
}

StateVector StateVector::basis(int n_q, u64 y) {
  StateVector s(n_q);
  if (y >= s.size()) throw std::invalid_argument("StateVector::basis: index out of range");
  s.amp_[0] = 0.0;
  s.amp_[y] = 1.0;
  return s;
}

double StateVector::norm_squared() const noexcept {
  double acc = 0.0;
  for (const auto& a : amp_) acc += std::norm(a);
  return acc;
}

double StateVector::normalize() {
  const double n = std::sqrt(norm_squared());
  if (n > 0.0) {
    const double inv = 1.0 / n;
    for (auto& a : amp_) a *= inv;
  }
  return n;
}

ModMultTable::ModMultTable(int n_q, u64 multiplier, u64 N) : multiplier_(multiplier % N) {
  const u64 dim = u64{1} << n_q;
  if (N >= dim) throw std::invalid_argument("ModMultTable: N must be below 2^n_q");
  if (const u64 g = std::gcd(multiplier_, N); g != 1) throw TrivialFactor(N, multiplier, g);
  target_.resize(dim);
  for (u64 y = 0; y < dim; ++y)
    target_[y] = static_cast<std::uint32_t>(y < N ? mod_mul(y, multiplier_, N) : y);
}

void ModMultTable::apply(std::span<const cplx> in, std::span<cplx> out) const {
  const std::size_t dim = target_.size();
  for (std::size_t y = 0; y < dim; ++y) out[target_[y]] = in[y];
}

void apply_modmult(StateVector& state, u64 x, u64 N) {
  const ModMultTable table(state.qubits(), x, N);
  std::vector<cplx> scratch(state.size());
  table.apply(state.amplitudes(), scratch);
  std::copy(scratch.begin(), scratch.end(), state.amplitudes().begin());
}

void apply_diagonal_z(StateVector& state, std::span<const double> deltas, double t) {
  const int n_q = state.qubits();
  require_length(deltas, static_cast<std::size_t>(n_q), "apply_diagonal_z");
  if (t == 0.0) return;
  auto amp = state.amplitudes();
  for (std::size_t y = 0; y < amp.size(); ++y) {
    double energy = 0.0;
    for (int i = 0; i < n_q; ++i) energy += ((y >> i) & 1U) ? -deltas[i] : deltas[i];
    amp[y] *= std::polar(1.0, t * energy);
  }
}

void apply_xx_bond(StateVector& state, int bond, double J, double t) {
  if (bond < 0 || bond + 1 >= state.qubits())
    throw std::invalid_argument("apply_xx_bond: bond index out of range");
  const double c = std::cos(2.0 * J * t);
  const double s = std::sin(2.0 * J * t);
  const std::size_t low = std::size_t{1} << bond;
  const std::size_t mask = 3 * low;
  auto amp = state.amplitudes();
  for (std::size_t y = 0; y < amp.size(); ++y) {
    if (y & low) continue;  // visit each pair from its member with bit `bond` clear
    const std::size_t z = y ^ mask;
    const cplx a = amp[y];
    const cplx b = amp[z];
    amp[y] = c * a + cplx{-s * b.imag(), s * b.real()};
    amp[z] = c * b + cplx{-s * a.imag(), s * a.real()};
  }
}

void apply_xx_chain(StateVector& state, std::span<const double> Js, double t) {
  const int n_q = state.qubits();
  require_length(Js, static_cast<std::size_t>(n_q - 1), "apply_xx_chain");
  if (t == 0.0) return;
  for (int i = 0; i + 1 < n_q; ++i) apply_xx_bond(state, i, Js[i], t);
}

int collapse(StateVector& branch0, StateVector& branch1, double u) {
  if (branch0.size() != branch1.size())
    throw std::invalid_argument("collapse: branch dimensions differ");
  const double p0 = branch0.norm_squared();
  const double p1 = branch1.norm_squared();
  if (p0 < 1e-14 && p1 < 1e-14) throw DegenerateState("collapse: both branches vanish");
  if (std::abs(p0 + p1 - 1.0) > 1e-8)
    throw std::invalid_argument("collapse: branch probabilities sum to " + std::to_string(p0 + p1));
  const int bit = u < p0 ? 0 : 1;
  if (bit == 1) std::swap(branch0, branch1);
  branch0.normalize();
  return bit;
}

}  // namespace shorsim
