#include "shorsim/numtheory.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <algorithm>

#include "shorsim/errors.hpp"

namespace shorsim {

u64 mod_mul(u64 a, u64 b, u64 modulus) {
  return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % modulus);
}

u64 mod_pow(u64 base, u64 exp, u64 modulus) {
  if (modulus < 2) throw std::invalid_argument("mod_pow: modulus must be >= 2");
  u64 result = 1;
  base %= modulus;
  while (exp > 0) {
    if (exp & 1U) result = mod_mul(result, base, modulus);
    base = mod_mul(base, base, modulus);
    exp >>= 1U;
  }
  return result;
}

u64 mod_inverse(u64 x, u64 modulus) {
  i64 t = 0, new_t = 1;
  i64 r = static_cast<i64>(modulus), new_r = static_cast<i64>(x % modulus);
  while (new_r != 0) {
    const i64 q = r / new_r;
    t = std::exchange(new_t, t - q * new_t);
    r = std::exchange(new_r, r - q * new_r);
  }
  if (r != 1) throw std::invalid_argument("mod_inverse: argument not invertible");
  if (t < 0) t += static_cast<i64>(modulus);
  return static_cast<u64>(t);
}

u64 multiplicative_order(u64 x, u64 N) {
  if (N < 3 || x < 2 || x >= N)
    throw std::invalid_argument("multiplicative_order: need 2 <= x < N");
  if (const u64 g = std::gcd(x, N); g != 1) throw TrivialFactor(N, x, g);
  u64 r = 1;
  u64 y = x;
  while (y != 1) {
    y = mod_mul(y, x, N);
    ++r;
  }
  return r;
}

std::optional<u64> period_from_measurement(u64 a, u64 Q, u64 N) {
  if (Q == 0 || a >= Q) throw std::invalid_argument("period_from_measurement: need 0 <= a < Q");
  if (a == 0) return std::nullopt;
  // Convergents p_k/q_k of a/Q via the standard recurrence.
  u64 num = a, den = Q;
  u64 q_prev = 1, q_cur = 0;  // q_{-2}, q_{-1}
  std::optional<u64> best;
  while (den != 0) {
    const u64 term = num / den;
    const unsigned __int128 q_next = static_cast<unsigned __int128>(term) * q_cur + q_prev;
    if (q_next >= N) break;
    q_prev = q_cur;
    q_cur = static_cast<u64>(q_next);
    best = q_cur;
    num = std::exchange(den, num % den);
  }
  // A denominator of 1 carries no period information.
  if (best && *best <= 1) return std::nullopt;
  return best;
}

std::optional<std::pair<u64, u64>> factor_from_period(u64 x, u64 r, u64 N) {
  if (r == 0 || r % 2 == 1) return std::nullopt;
  const u64 half = mod_pow(x, r / 2, N);
  if (half == N - 1 || half == 1) return std::nullopt;
  const u64 f1 = std::gcd(half - 1, N);
  const u64 f2 = std::gcd(half + 1, N);
  if (f1 <= 1 || f1 >= N || f2 <= 1 || f2 >= N) return std::nullopt;
  return std::minmax(f1, f2);
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

int register_qubits(u64 N) {
  int n = 0;
  while ((u64{1} << n) <= N) ++n;
  return n;
}

ProblemInstance ProblemInstance::make(u64 N, u64 x) {
  if (N < 9 || N % 2 == 0 || is_prime(N))
    throw std::invalid_argument("N = " + std::to_string(N) + " is not an odd composite >= 9");
  const int n_q = register_qubits(N);
  if (n_q > kMaxComputationalQubits)
    throw std::invalid_argument("N = " + std::to_string(N) + " needs more than " +
                                std::to_string(kMaxComputationalQubits) + " qubits");
  if (x < 2 || x >= N) throw std::invalid_argument("x must satisfy 2 <= x < N");
  ProblemInstance inst;
  inst.N = N;
  inst.x = x;
  inst.r = multiplicative_order(x, N);
  inst.n_q = n_q;
  inst.n_l = 2 * n_q;
  inst.Q = u64{1} << inst.n_l;
  return inst;
}

double ProblemInstance::log2N() const { return std::log2(static_cast<double>(N)); }

}  // namespace shorsim
