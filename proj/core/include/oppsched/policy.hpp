#pragma once

// Causal and measurable policies X_k = v_k(S_1, ..., S_k, R).
//
// Every policy sees only the observed state prefix and the slot uniforms
// U_1..U_k derived from its RandSource; the returned option always indexes
// C(S_k). Only max-weight additionally reads the queue vector.

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "oppsched/model.hpp"
#include "oppsched/randomize.hpp"
#include "oppsched/region.hpp"

namespace oppsched {

struct DeterministicPolicy {
  ChoiceFn psi;
};

// v(s, U_k): inverse-CDF draw from weights[s] using the current slot uniform.
struct RandomizedStationaryPolicy {
  std::vector<std::vector<double>> weights;
};

struct TargetPolicy {
  TargetDecomposition decomposition;
};

struct MaxWeightPolicy {};

// A decision table keyed on the whole history: the state sequence s_1..s_k
// and the quantized slot uniforms l_i = floor(q U_i), i <= k. Histories not
// in the table, or entries outside C(s_k), fall back to psi(s_k).
struct CustomPolicy {
  struct Key {
    std::vector<std::size_t> states;
    std::vector<std::size_t> levels;
    friend auto operator<=>(const Key&, const Key&) = default;
  };

  std::size_t levels = 1;  // q
  std::map<Key, std::size_t> table;

  std::size_t max_depth() const;
};

using Policy = std::variant<DeterministicPolicy, RandomizedStationaryPolicy,
                            TargetPolicy, MaxWeightPolicy, CustomPolicy>;

const char* kind_name(const Policy& policy);

struct Decision {
  std::size_t option = 0;
  // Randomization outcome that produced the decision: the level for custom
  // policies, the option for stationary ones, 0 when deterministic.
  std::size_t token = 0;
  bool fallback = false;
};

// Throws InputError when the policy is inconsistent with the model.
void check_policy(const Policy& policy, const Model& model);

// psi(s) from the model's certified choice function.
std::size_t fallback_choice(const Model& model, std::size_t state);

// Decision at slot k = states.size() >= 1. `queue` is read by max-weight only.
Decision decide(const Policy& policy, const Model& model,
                std::span<const std::size_t> states, const RandSource& src,
                std::span<const double> queue = {});

// argmax_i Q^T options[i]; ties go to the lowest index.
std::size_t max_weight(std::span<const double> q, std::span<const Vec> options);

// The randomization outcomes available at slot k given the full history,
// with exact probabilities. The building block for exact enumeration.
struct Branch {
  double prob = 1.0;
  Decision decision;
};

std::vector<Branch> branches(const Policy& policy, const Model& model,
                             std::span<const std::size_t> states,
                             std::span<const std::size_t> past_tokens,
                             std::span<const double> queue = {});

// E[X_k | past states, past tokens, queue] with S_k ~ lambda drawn
// independently of the past.
Vec conditional_mean(const Policy& policy, const Model& model,
                     std::span<const std::size_t> past_states,
                     std::span<const std::size_t> past_tokens,
                     std::span<const double> queue = {});

// A randomized stationary policy whose exact per-slot mean is within
// sqrt(tol) of x. Throws NotInRegionError when x is outside the region.
Policy target_policy(const RateRegion& region, std::span<const double> x,
                     double tol = kDefaultTol);

}  // namespace oppsched
