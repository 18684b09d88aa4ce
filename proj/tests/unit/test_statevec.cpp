#include <doctest.h>

#include "oracles.hpp"
#include "shorsim/errors.hpp"
#include "shorsim/statevec.hpp"

using namespace shorsim;

TEST_CASE("state construction") {
  StateVector s(3);
  CHECK(s.size() == 8);
  CHECK(s[0] == cplx{1.0, 0.0});
  CHECK(s.norm_squared() == 1.0);
  const auto b = StateVector::basis(4, 9);
  CHECK(b[9] == cplx{1.0, 0.0});
  CHECK(b[0] == cplx{0.0, 0.0});
  CHECK_THROWS_AS(StateVector::basis(2, 4), std::invalid_argument);
  CHECK_THROWS_AS(StateVector(0), std::invalid_argument);
  CHECK_THROWS_AS(StateVector(kMaxComputationalQubits + 1), std::invalid_argument);
}

TEST_CASE("modular multiplication permutes basis states") {
  for (u64 y = 0; y < 16; ++y) {
    auto s = StateVector::basis(4, y);
    apply_modmult(s, 7, 15);
    const u64 expect = y < 15 ? (7 * y) % 15 : y;
    CHECK(s[expect] == cplx{1.0, 0.0});
  }
  std::mt19937_64 rng(1);
  auto s = oracle::random_state(9, rng);
  const auto before = s.norm_squared();
  auto t = s;
  apply_modmult(t, 2, 493);
  CHECK(t.norm_squared() == doctest::Approx(before).epsilon(1e-14));
  // x^r = 1: r applications of x return the state
  for (u64 k = 1; k < 56; ++k) apply_modmult(t, 2, 493);
  for (std::size_t y = 0; y < s.size(); ++y) CHECK(t[y] == s[y]);
  CHECK_THROWS_AS(ModMultTable(4, 5, 15), TrivialFactor);
  CHECK_THROWS_AS(ModMultTable(4, 2, 17), std::invalid_argument);
}

TEST_CASE("diagonal and coupling kernels match dense exponentials") {
  std::mt19937_64 rng(2);
  const int n = 4;
  const auto delta = oracle::uniform_row(n, 0.7, rng);
  const auto J = oracle::uniform_row(n - 1, 0.7, rng);
  const std::vector<double> zero_d(n, 0.0), zero_J(n - 1, 0.0);
  const double t = 0.37;

  auto s = oracle::random_state(n, rng);
  const auto v = oracle::to_eigen(s);
  auto z = s;
  apply_diagonal_z(z, delta, t);
  CHECK(oracle::max_abs_diff(oracle::to_eigen(z), oracle::expi(oracle::hamiltonian(n, delta, zero_J), t) * v) <
        1e-13);

  for (int bond = 0; bond + 1 < n; ++bond) {
    auto b = s;
    apply_xx_bond(b, bond, J[bond], t);
    std::vector<double> one(n - 1, 0.0);
    one[bond] = J[bond];
    CHECK(oracle::max_abs_diff(oracle::to_eigen(b), oracle::expi(oracle::hamiltonian(n, zero_d, one), t) * v) <
          1e-13);
  }
  // the bonds commute with each other, so the chain is exact
  auto c = s;
  apply_xx_chain(c, J, t);
  CHECK(oracle::max_abs_diff(oracle::to_eigen(c), oracle::expi(oracle::hamiltonian(n, zero_d, J), t) * v) < 1e-13);
  CHECK_THROWS_AS(apply_xx_bond(c, n - 1, 0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(apply_diagonal_z(c, J, 1.0), std::invalid_argument);
}

TEST_CASE("sign convention of the z field") {
  StateVector s(1);
  const std::vector<double> d{0.3};
  apply_diagonal_z(s, d, 1.0);
  CHECK(std::abs(s[0] - std::polar(1.0, 0.3)) < 1e-15);
  auto one = StateVector::basis(1, 1);
  apply_diagonal_z(one, d, 1.0);
  CHECK(std::abs(one[1] - std::polar(1.0, -0.3)) < 1e-15);
}

TEST_CASE("collapse") {
  StateVector b0(2), b1(2);
  b0[0] = std::sqrt(0.3);
  b1[0] = 0.0;
  b1[3] = std::sqrt(0.7);
  auto c0 = b0, c1 = b1;
  CHECK(collapse(c0, c1, 0.29) == 0);
  CHECK(std::abs(c0[0] - 1.0) < 1e-12);
  c0 = b0;
  c1 = b1;
  CHECK(collapse(c0, c1, 0.31) == 1);
  CHECK(std::abs(c0[3] - 1.0) < 1e-12);
  CHECK(c0.norm_squared() == doctest::Approx(1.0));

  StateVector z0(2), z1(2);
  z0[0] = 0.0;
  z1[0] = 0.0;
  CHECK_THROWS_AS(collapse(z0, z1, 0.5), DegenerateState);
  StateVector w0(2), w1(2);
  CHECK_THROWS_AS(collapse(w0, w1, 0.5), std::invalid_argument);  // probabilities sum to 2
}
