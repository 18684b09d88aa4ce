#pragma once

#include <cstdint>
#include <optional>
#include <utility>

namespace shorsim {

using u64 = std::uint64_t;
using i64 = std::int64_t;

/// Largest computational register supported; keeps Q = 4^n_q and a*r inside 64 bits.
inline constexpr int kMaxComputationalQubits = 20;

/// An order-finding problem: factor N using the base x.
struct ProblemInstance {
  u64 N = 0;
  u64 x = 0;
  u64 r = 0;    // multiplicative order of x mod N
  int n_q = 0;  // smallest n with N < 2^n
  int n_l = 0;  // 2 * n_q control steps
  u64 Q = 0;    // 2^n_l

  /// Validates (N, x) and derives r, n_q, n_l, Q.
  /// Throws std::invalid_argument for even, prime or out-of-range N and
  /// TrivialFactor when gcd(x, N) != 1.
  static ProblemInstance make(u64 N, u64 x);

  double log2N() const;
};

u64 mod_mul(u64 a, u64 b, u64 modulus);
u64 mod_pow(u64 base, u64 exp, u64 modulus);
u64 mod_inverse(u64 x, u64 modulus);

/// Smallest r >= 1 with x^r = 1 (mod N). Throws TrivialFactor if gcd(x, N) != 1.
u64 multiplicative_order(u64 x, u64 N);

/// Continued-fraction post-processing of a measured coordinate a/Q.
/// Returns the largest convergent denominator below N, or nullopt.
std::optional<u64> period_from_measurement(u64 a, u64 Q, u64 N);

/// gcd(x^{r/2} -+ 1, N) when r is even and x^{r/2} != -1 (mod N).
/// The pair is ordered (smaller, larger).
std::optional<std::pair<u64, u64>> factor_from_period(u64 x, u64 r, u64 N);

bool is_prime(u64 n);

/// Number of qubits n with N < 2^n.
int register_qubits(u64 N);

}  // namespace shorsim
