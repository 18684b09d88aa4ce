#include "shorsim/rng.hpp"

#include <bit>
#include <vector>

namespace shorsim {

Rng make_stream(std::uint64_t master_seed, StreamTag tag, std::initializer_list<std::uint64_t> key) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (key.size() + 2));
  const auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32U));
  };
  push(master_seed);
  push(static_cast<std::uint64_t>(tag));
  for (const auto k : key) push(k);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

std::uint64_t bits_of(double value) { return std::bit_cast<std::uint64_t>(value); }

}  // namespace shorsim
