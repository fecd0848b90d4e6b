#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "oppsched/error.hpp"
#include "oppsched/queueing.hpp"
#include "oppsched/sim.hpp"

namespace oppsched {
namespace {

using testing::simplex_model;

TEST(Queueing, StepExamples) {
  EXPECT_EQ(step(Vec{0, 0}, Vec{1, 0}, Vec{1, 0}), (Vec{0, 0}));
  EXPECT_EQ(step(Vec{2, 0}, Vec{0, 0}, Vec{5, 0}), (Vec{0, 0}));
  const Vec q = step(Vec{1, 1}, Vec{0.4, 0.4}, Vec{1, 0});
  EXPECT_DOUBLE_EQ(q[0], 0.4);
  EXPECT_DOUBLE_EQ(q[1], 1.4);
  EXPECT_THROW(step(Vec{1}, Vec{1, 2}, Vec{1}), InputError);
}

TEST(Queueing, MeanRate) {
  EXPECT_EQ(mean_rate(DeterministicArrivals{{0.4, 0.1}}), (Vec{0.4, 0.1}));
  EXPECT_EQ(mean_rate(BernoulliArrivals{{0.5, 0.25}, {2.0, 4.0}}), (Vec{1.0, 1.0}));
}

TEST(Queueing, CheckArrivals) {
  EXPECT_THROW(check_arrivals(DeterministicArrivals{{-0.1}}), InputError);
  EXPECT_THROW(check_arrivals(BernoulliArrivals{{1.5}, {1.0}}), InputError);
  EXPECT_THROW(check_arrivals(BernoulliArrivals{{0.5}, {1.0, 1.0}}), InputError);
}

TEST(Queueing, BernoulliDrawsAreBatches) {
  const BernoulliArrivals b{{0.3, 0.0}, {2.0, 5.0}};
  const RandSource src(4, kArrivalStream);
  double total = 0.0;
  const int n = 20000;
  for (int k = 1; k <= n; ++k) {
    const Vec a = draw_arrivals(b, src, k);
    EXPECT_TRUE(a[0] == 0.0 || a[0] == 2.0);
    EXPECT_EQ(a[1], 0.0);
    total += a[0];
  }
  EXPECT_NEAR(total / n, 0.6, 3 * 2.0 * std::sqrt(0.21 / n));
}

TEST(Queueing, LeastSquaresSlope) {
  std::vector<double> line(100);
  for (std::size_t i = 0; i < line.size(); ++i) line[i] = 3.0 + 0.5 * static_cast<double>(i);
  EXPECT_NEAR(least_squares_slope(line), 0.5, 1e-12);
  EXPECT_EQ(least_squares_slope(std::vector<double>{4.0}), 0.0);
}

TEST(Queueing, DominatedArrivalsAreStable) {
  const StabilityReport r =
      run_maxweight(simplex_model(), DeterministicArrivals{{0.4, 0.4}}, 100000, 42);
  EXPECT_TRUE(r.stable);
  EXPECT_LE(r.tail_avg_backlog, 50.0);
  EXPECT_LE(r.drift_slope, 1e-3);
}

TEST(Queueing, OverloadedArrivalsGrow) {
  const StabilityReport r =
      run_maxweight(simplex_model(), DeterministicArrivals{{0.6, 0.6}}, 100000, 42);
  EXPECT_FALSE(r.stable);
  EXPECT_GE(r.drift_slope, 0.15);
}

TEST(Queueing, ZeroArrivalsStayEmpty) {
  RunOptions opts;
  opts.arrivals = DeterministicArrivals{{0.0, 0.0}};
  const Trace t = run(simplex_model(), MaxWeightPolicy{}, 2000, 1, opts);
  for (double q : t.queue) EXPECT_EQ(q, 0.0);
  const StabilityReport r =
      run_maxweight(simplex_model(), DeterministicArrivals{{0.0, 0.0}}, 2000, 1);
  EXPECT_TRUE(r.stable);
  EXPECT_EQ(r.time_avg_backlog, 0.0);
}

TEST(Queueing, ShortHorizonRejected) {
  EXPECT_THROW(run_maxweight(simplex_model(), DeterministicArrivals{{0.1, 0.1}}, 999, 1),
               InputError);
}

TEST(QueueingProperty, QueuesNonnegativeAndWorkConserving) {
  Model single;
  single.m = 1;
  single.states = {{"s", 1.0, {{0.7}}, 0}};
  RunOptions opts;
  opts.arrivals = BernoulliArrivals{{0.5}, {1.5}};
  const Trace t = run(single, MaxWeightPolicy{}, 5000, 8, opts);
  double prev = 0.0;
  for (std::size_t k = 1; k <= t.horizon(); ++k) {
    const double q = t.queue_at(k)[0];
    EXPECT_GE(q, 0.0);
    // Served amount prev + a - q never exceeds the option value.
    const double arrived = draw_arrivals(*opts.arrivals, RandSource(8, kArrivalStream), k)[0];
    EXPECT_LE(prev + arrived - q, 0.7 + 1e-12);
    prev = q;
  }
  RunOptions multi;
  multi.arrivals = BernoulliArrivals{{0.4, 0.3}, {1.0, 2.0}};
  const Trace u = run(simplex_model(), MaxWeightPolicy{}, 5000, 9, multi);
  EXPECT_TRUE(std::all_of(u.queue.begin(), u.queue.end(), [](double q) { return q >= 0.0; }));
}

}  // namespace
}  // namespace oppsched
