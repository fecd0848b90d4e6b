#pragma once

// 1-hop queueing overlay: per-channel backlogs Q fed by exogenous arrivals
// and drained by the scheduled rate vector, Q' = max(Q + a - x, 0).

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>

#include "oppsched/model.hpp"
#include "oppsched/randomize.hpp"
#include "oppsched/vec.hpp"

namespace oppsched {

// Backlog per channel; every entry stays >= 0.
using QueueState = Vec;

struct DeterministicArrivals {
  Vec rate;
};

// Component j receives `batch[j]` units with probability `prob[j]`.
struct BernoulliArrivals {
  Vec prob;
  Vec batch;
};

using ArrivalProcess = std::variant<DeterministicArrivals, BernoulliArrivals>;

Vec mean_rate(const ArrivalProcess& arrivals);
std::size_t arrival_dim(const ArrivalProcess& arrivals);
void check_arrivals(const ArrivalProcess& arrivals);

// Arrivals in slot k, drawn from the arrival stream of src.
Vec draw_arrivals(const ArrivalProcess& arrivals, const RandSource& src,
                  std::uint64_t k);

QueueState step(std::span<const double> q, std::span<const double> a,
                std::span<const double> x);

// Total backlog; the queue size whose growth rate is the overload rate.
double backlog(std::span<const double> q);

inline constexpr double kStabilitySlopeThreshold = 0.01;

struct StabilityReport {
  std::size_t horizon = 0;
  double time_avg_backlog = 0.0;
  double tail_avg_backlog = 0.0;  // over the last horizon/4 slots
  double drift_slope = 0.0;       // least-squares slope of backlog vs k
  bool stable = false;            // drift_slope <= kStabilitySlopeThreshold
  QueueState final_queue;
};

// Least-squares slope of ys against k = 1..n.
double least_squares_slope(std::span<const double> ys);

StabilityReport stability_from_backlogs(std::span<const double> backlogs,
                                        QueueState final_queue);

// Max-weight scheduling against the arrival process for K >= 1000 slots.
StabilityReport run_maxweight(const Model& model, const ArrivalProcess& arrivals,
                              std::size_t horizon, std::uint64_t seed);

}  // namespace oppsched
