#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace shorsim {

/// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// gcd(x, N) != 1: the classical pre-check already split N.
class TrivialFactor : public Error {
 public:
  TrivialFactor(std::uint64_t N, std::uint64_t x, std::uint64_t factor)
      : Error("gcd(" + std::to_string(x) + ", " + std::to_string(N) + ") = " +
              std::to_string(factor) + " is a nontrivial factor"),
        factor_(factor) {}
  std::uint64_t factor() const noexcept { return factor_; }

 private:
  std::uint64_t factor_;
};

/// Both measurement branches have vanishing norm.
class DegenerateState : public Error {
 public:
  using Error::Error;
};

/// The histogram is too thin for the bias-corrected IPR estimator.
class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

/// No pair of sweep points straddles the chaos-border threshold.
class NotBracketed : public Error {
 public:
  using Error::Error;
};

}  // namespace shorsim
