#pragma once

// The single randomization variable R in [0,1] and its expansion into the
// slot variables U_1, U_2, ... by interleaving R's binary digits.
//
// R's binary expansion is the bit stream of a counter-based generator keyed
// by (seed, stream): bit i is a pure function of (seed, stream, i). U_k reads
// the bits at positions cantor_pair(k, i), i < depth. Distinct k read
// disjoint positions, so the U_k are independent given ideal bits.

#include <concepts>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>

namespace oppsched {

inline constexpr int kDefaultDepth = 53;

// Independent streams derived from one seed: the policy's randomization
// variable, nature's state draws, and arrival draws never share bits.
inline constexpr std::uint64_t kPolicyStream = 0;
inline constexpr std::uint64_t kStateStream = 1;
inline constexpr std::uint64_t kArrivalStream = 2;

// SplitMix64 output function applied to state z + golden gamma.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class RandSource {
 public:
  explicit RandSource(std::uint64_t seed, std::uint64_t stream = kPolicyStream)
      : seed_(seed), stream_(stream), key_(splitmix64(seed ^ splitmix64(stream))) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  // 64 consecutive bits of the expansion, most significant bit first.
  std::uint64_t word(std::uint64_t index) const noexcept {
    return splitmix64(key_ + index * 0x9E3779B97F4A7C15ULL);
  }

  bool bit(std::uint64_t position) const noexcept {
    return (word(position >> 6) >> (63 - (position & 63))) & 1U;
  }

  // R truncated to its first `depth` binary digits.
  double value(int depth = kDefaultDepth) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
};

template <typename B>
concept BitStream = requires(const B& b, std::uint64_t i) {
  { b.bit(i) } -> std::convertible_to<bool>;
};

// (k, i) -> (k+i)(k+i+1)/2 + i. Throws InputError on 64-bit overflow.
std::uint64_t cantor_pair(std::uint64_t k, std::uint64_t i);

void check_slot_args(std::uint64_t k, int depth);

// U_k = sum_{i<depth} bit(cantor_pair(k, i)) * 2^-(i+1), in [0,1).
template <BitStream B>
double slot_uniform(const B& bits, std::uint64_t k, int depth = kDefaultDepth) {
  check_slot_args(k, depth);
  std::uint64_t mantissa = 0;
  for (int i = 0; i < depth; ++i) {
    mantissa = (mantissa << 1) |
               static_cast<std::uint64_t>(bits.bit(cantor_pair(k, static_cast<std::uint64_t>(i))));
  }
  return std::ldexp(static_cast<double>(mantissa), -depth);
}

// Inverse-CDF draw: the first positive-weight index whose cumulative weight
// is >= u. Throws InputError unless weights are nonnegative and sum to 1
// within 1e-9.
std::size_t draw_option(double u, std::span<const double> weights);

void check_simplex(std::span<const double> weights);

}  // namespace oppsched
