#pragma once

// Discrete-time slot loop and the verifiers for time averages.
//
// Slot k: nature draws S_k ~ lambda from the state stream, the policy
// decides X_k in C(S_k) from (S_1..S_k, R) (plus Q_k for max-weight), and if
// arrivals are configured Q_{k+1} = max(Q_k + A_k - X_k, 0).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oppsched/model.hpp"
#include "oppsched/policy.hpp"
#include "oppsched/queueing.hpp"
#include "oppsched/region.hpp"

namespace oppsched {

struct SlotRecord {
  std::uint64_t k = 0;
  std::size_t state = 0;
  Decision decision;
};

struct Checkpoint {
  std::size_t k = 0;
  double dist = 0.0;  // dist(running average at k, region)
};

// M_k = X_k - E[X_k | past], with the conditional mean computed exactly from
// the policy, never estimated.
struct MartingaleCheck {
  Vec partial_sum;
  double normalized_norm() const;  // ||(1/K) sum M_k||
  std::size_t count = 0;
};

struct Trace {
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::vector<SlotRecord> slots;
  std::vector<double> x;      // slots.size() * m, row per slot
  std::vector<double> avg;    // running averages, same layout
  std::vector<double> queue;  // backlog after each slot; empty without arrivals
  std::vector<Checkpoint> checkpoints;
  MartingaleCheck martingale;

  std::size_t horizon() const noexcept { return slots.size(); }
  std::span<const double> x_at(std::size_t k) const;    // 1-based
  std::span<const double> avg_at(std::size_t k) const;  // 1-based
  std::span<const double> queue_at(std::size_t k) const;
  Vec final_average() const;
};

struct RunOptions {
  std::optional<ArrivalProcess> arrivals;
  const RateRegion* region = nullptr;  // fills checkpoint distances
  std::vector<std::size_t> checkpoints;  // empty: powers of two and K
  double tol = kDefaultTol;
};

// 1, 2, 4, ... <= K, plus K itself.
std::vector<std::size_t> power_of_two_checkpoints(std::size_t horizon);

// Replayable: identical (model, policy, horizon, seed, options) give
// bit-identical traces.
Trace run(const Model& model, const Policy& policy, std::size_t horizon,
          std::uint64_t seed, const RunOptions& options = {});

// Statistical margin used by every Monte Carlo assertion: 3 D / sqrt(n).
double three_sigma_margin(double bound, std::size_t n);

struct MeanMembershipReport {
  std::size_t slot = 0;
  std::size_t replications = 0;
  Vec estimate;          // Monte Carlo E[X_k]
  Vec average_estimate;  // Monte Carlo (1/k) sum_{i<=k} E[X_i]
  double dist = 0.0;
  double average_dist = 0.0;
  double margin = 0.0;
  bool statistical = true;
  bool pass = false;
};

// Replications r = 0..R-1 use seeds base_seed + r and run in parallel.
MeanMembershipReport verify_mean_membership(
    const Model& model, const Policy& policy, std::size_t replications,
    std::size_t slot, const RateRegion& region, std::uint64_t base_seed = 1,
    const RunOptions& options = {}, double tol = kDefaultTol);

inline constexpr std::size_t kMinVerifiableHorizon = 100;

struct ConvergenceReport {
  std::size_t horizon = 0;
  std::size_t burn_in = 0;
  std::vector<Checkpoint> checkpoints;
  std::vector<double> bounds;          // 3 D / sqrt(k) + sqrt(tol) per checkpoint
  std::vector<double> tail_maxima;     // max dist over checkpoints >= k, after burn-in
  double final_dist = 0.0;
  double final_bound = 0.0;
  bool final_ok = false;
  bool envelope_ok = false;  // every post-burn-in tail maximum within its bound
  bool insufficient_horizon = false;
  bool pass = false;
};

ConvergenceReport verify_avg_convergence(const Trace& trace, const RateRegion& region,
                                         std::vector<std::size_t> checkpoints = {},
                                         double tol = kDefaultTol);

struct ConditionalClass {
  std::vector<std::size_t> prefix;  // decided options at slots 1..k-1
  double prob = 0.0;
  Vec mean;                         // E[X_k | prefix]
  std::vector<double> state_marginal;  // P(S_k = s | prefix)
  double witness_residual = 0.0;    // distance to a point certified in the region
  double projection_dist = 0.0;     // independent check by projection
  bool member = false;
};

struct ConditionalReport {
  std::size_t slot = 0;
  std::size_t paths = 0;
  std::vector<ConditionalClass> classes;
  double max_violation = 0.0;
  bool pass = false;
};

inline constexpr std::size_t kDefaultPathCap = 1'000'000;
inline constexpr double kConditionalTolerance = 1e-9;

// Exact enumeration of (S_1..S_k, randomization outcome) paths. Conditions
// on the decided-option prefix, which refines sigma(X_1..X_{k-1}).
ConditionalReport verify_conditional_membership(
    const Model& model, const Policy& policy, std::size_t slot,
    const RateRegion& region, const RunOptions& options = {},
    std::size_t path_cap = kDefaultPathCap);

}  // namespace oppsched
