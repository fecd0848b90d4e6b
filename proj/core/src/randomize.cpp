#include "oppsched/randomize.hpp"

#include <cmath>
#include <string>

#include "oppsched/error.hpp"

namespace oppsched {

double RandSource::value(int depth) const {
  if (depth < 1 || depth > 53) throw InputError("depth must be in [1, 53]");
  const std::uint64_t top = word(0) >> (64 - depth);
  return std::ldexp(static_cast<double>(top), -depth);
}

std::uint64_t cantor_pair(std::uint64_t k, std::uint64_t i) {
  const std::uint64_t s = k + i;
  if (s < k || s >= (std::uint64_t{1} << 32))
    throw InputError("slot index too large for bit pairing");
  return s * (s + 1) / 2 + i;
}

void check_slot_args(std::uint64_t k, int depth) {
  if (k < 1) throw InputError("slot index k must be >= 1");
  if (depth < 1 || depth > 53) throw InputError("depth must be in [1, 53]");
}

void check_simplex(std::span<const double> weights) {
  if (weights.empty()) throw InputError("weight vector is empty");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0)
      throw InputError("weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw InputError("weights sum to " + std::to_string(total) + ", not 1");
}

std::size_t draw_option(double u, std::span<const double> weights) {
  check_simplex(weights);
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cumulative += weights[i];
    last_positive = i;
    if (u <= cumulative) return i;
  }
  return last_positive;
}

}  // namespace oppsched
