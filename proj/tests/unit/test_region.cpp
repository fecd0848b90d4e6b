#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oppsched/error.hpp"
#include "oppsched/region.hpp"

namespace oppsched {
namespace {

using testing::random_model;
using testing::simplex_model;
using testing::two_state_model;

TEST(Region, LmoTwoState) {
  const RateRegion r(two_state_model());
  EXPECT_EQ(lmo(r, Vec{-1.0}), Vec{1.5});
  EXPECT_EQ(lmo(r, Vec{1.0}), Vec{0.0});
  EXPECT_EQ(r.select(Vec{0.0}), (std::vector<std::size_t>{0, 0}));
}

TEST(Region, LmoSingletons) {
  Model m;
  m.m = 2;
  m.states = {{"a", 0.25, {{1.0, 2.0}}, 0}, {"b", 0.75, {{3.0, 0.0}}, 1}};
  const RateRegion r(m);
  for (const Vec& d : {Vec{1, 0}, Vec{-1, 3}, Vec{0, 0}})
    EXPECT_EQ(lmo(r, d), (Vec{2.5, 0.5}));
}

TEST(Region, EnumerateTwoState) {
  const RateRegion r(two_state_model());
  auto g = enumerate_generators(r);
  std::sort(g.begin(), g.end());
  EXPECT_EQ(g, (std::vector<Vec>{{0.0}, {0.5}, {1.0}, {1.5}}));
  EXPECT_EQ(r.deterministic_policy_count(), 4u);
}

TEST(Region, EnumerateSmallCases) {
  Model m;
  m.m = 2;
  m.states = {{"a", 1.0, {{0.1, 0.2}, {0.3, 0.4}}, 0}};
  EXPECT_EQ(enumerate_generators(RateRegion(m)), (std::vector<Vec>{{0.1, 0.2}, {0.3, 0.4}}));
  m.states = {{"a", 0.5, {{1, 1}, {1, 1}}, 0}, {"b", 0.5, {{1, 1}}, 1}};
  EXPECT_EQ(enumerate_generators(RateRegion(m)), (std::vector<Vec>{{1, 1}}));
}

TEST(Region, EnumerateCap) {
  const RateRegion r(two_state_model());
  EXPECT_THROW(enumerate_generators(r, 3), CapacityError);
}

TEST(Region, Membership) {
  const RateRegion r(two_state_model());
  EXPECT_TRUE(membership(r, Vec{1.2}).member);
  EXPECT_TRUE(membership(r, Vec{0.0}).member);
  const MembershipResult out = membership(r, Vec{1.6});
  EXPECT_FALSE(out.member);
  ASSERT_TRUE(out.certificate);
  EXPECT_EQ(out.certificate->a, Vec{1.0});
  EXPECT_NEAR(out.certificate->b, 1.5, 1e-12);
  EXPECT_GT(out.certificate->violation(Vec{1.6}), kDefaultTol);
  EXPECT_NEAR(out.dist, 0.1, 1e-6);
}

TEST(Region, Dominance) {
  const RateRegion r(simplex_model());
  EXPECT_TRUE(dominance(r, Vec{0.4, 0.4}).dominated);
  EXPECT_FALSE(dominance(r, Vec{0.6, 0.6}).dominated);
  EXPECT_TRUE(dominance(r, Vec{0.0, 0.0}).dominated);
  EXPECT_TRUE(dominance(RateRegion(two_state_model()), Vec{0.0}).dominated);
  const DominanceResult d = dominance(r, Vec{0.6, 0.6});
  EXPECT_NEAR(std::sqrt(d.value), std::sqrt(0.02), 1e-5);
}

TEST(Region, DominanceNegativeArrivalsAreFree) {
  const RateRegion r(simplex_model());
  EXPECT_TRUE(dominance(r, Vec{-3.0, 0.9}).dominated);
  EXPECT_FALSE(dominance(r, Vec{-3.0, 1.2}).dominated);
}

TEST(Region, CapacityMargin) {
  const RateRegion r(simplex_model());
  EXPECT_NEAR(capacity_margin(r, Vec{0.4, 0.4}), 0.2 / std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(capacity_margin(r, Vec{0.6, 0.6}), -0.2 / std::sqrt(2.0), 1e-5);
  EXPECT_NEAR(capacity_margin(r, Vec{0.0, 0.0}), 1.0 / std::sqrt(2.0), 1e-6);
}

TEST(Region, DecomposeBoundary) {
  const RateRegion r(two_state_model());
  const TargetDecomposition d = decompose(r, Vec{1.5});
  EXPECT_EQ(d.weights, (std::vector<std::vector<double>>{{0.0, 1.0}, {0.0, 1.0}}));
  EXPECT_LE(d.residual, 1e-12);
}

TEST(Region, DecomposeZero) {
  const RateRegion r(two_state_model());
  const TargetDecomposition d = decompose(r, Vec{0.0});
  EXPECT_EQ(d.weights, (std::vector<std::vector<double>>{{1.0, 0.0}, {1.0, 0.0}}));
}

TEST(Region, DecomposeInterior) {
  const RateRegion r(two_state_model());
  const TargetDecomposition d = decompose(r, Vec{0.75});
  const Vec mean = decomposition_mean(r.model(), d.weights);
  EXPECT_LE(std::abs(mean[0] - 0.75), 1e-5);
  EXPECT_NEAR(d.residual, std::abs(mean[0] - 0.75), 1e-15);
  for (const auto& p : d.weights) {
    double total = 0.0;
    for (double w : p) {
      EXPECT_GE(w, 0.0);
      total += w;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Region, DecomposeOutsideCarriesCertificate) {
  const RateRegion r(two_state_model());
  try {
    decompose(r, Vec{1.6});
    FAIL();
  } catch (const NotInRegionError& e) {
    EXPECT_EQ(e.certificate().a, Vec{1.0});
    EXPECT_NEAR(e.certificate().b, 1.5, 1e-12);
  }
}

TEST(Region, RejectsInvalidModel) {
  Model m = two_state_model();
  m.states[0].prob = 0.9;
  EXPECT_THROW(RateRegion{m}, InputError);
}

TEST(RegionProperty, LmoSupportMatchesEnumeration) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 50; ++trial) {
    const RateRegion r(random_model(rng));
    const auto gens = enumerate_generators(r);
    for (int k = 0; k < 100; ++k) {
      Vec d(r.dim());
      for (double& v : d) v = n(rng);
      double best = -INFINITY;
      for (const auto& g : gens) best = std::max(best, dot(d, g));
      EXPECT_NEAR(geometry::support(r.body(), d), best, 1e-12);
    }
  }
}

TEST(RegionProperty, DecompositionRecomputes) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 50; ++trial) {
    const RateRegion r(random_model(rng));
    const auto gens = enumerate_generators(r);
    // A random convex combination of generators is a member.
    Vec x(r.dim(), 0.0);
    double total = 0.0;
    std::vector<double> w(gens.size());
    for (double& v : w) total += (v = u(rng));
    for (std::size_t i = 0; i < gens.size(); ++i) axpy(w[i] / total, gens[i], x);
    const TargetDecomposition d = decompose(r, x);
    const Vec mean = decomposition_mean(r.model(), d.weights);
    EXPECT_LE(distance(mean, x), std::sqrt(kDefaultTol));
  }
}

TEST(RegionProperty, MidpointsOfMembersAreMembers) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 30; ++trial) {
    const RateRegion r(random_model(rng));
    const auto gens = enumerate_generators(r);
    const Vec& a = gens[rng() % gens.size()];
    const Vec& b = gens[rng() % gens.size()];
    const double t = u(rng);
    Vec mid = scaled(a, t);
    axpy(1.0 - t, b, mid);
    EXPECT_TRUE(membership(r, mid).member);
  }
}

TEST(RegionProperty, AddingOptionsNeverShrinks) {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 30; ++trial) {
    const Model base = random_model(rng);
    Model bigger = base;
    Vec extra(base.m);
    for (double& c : extra) c = u(rng);
    bigger.states[rng() % bigger.states.size()].options.push_back(extra);
    const RateRegion r0(base), r1(bigger);
    for (int k = 0; k < 50; ++k) {
      Vec d(base.m);
      for (double& v : d) v = n(rng);
      EXPECT_GE(geometry::support(r1.body(), d), geometry::support(r0.body(), d) - 1e-15);
    }
  }
}

TEST(RegionProperty, NonMembersAreSeparated) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 30; ++trial) {
    const RateRegion r(random_model(rng));
    Vec x(r.dim());
    for (double& v : x) v = 0.5 + 2.0 * n(rng);
    const MembershipResult out = membership(r, x);
    if (out.member) {
      EXPECT_LE(out.dist, std::sqrt(kDefaultTol) + 1e-12);
    } else {
      ASSERT_TRUE(out.certificate);
      EXPECT_GT(out.certificate->violation(x), kDefaultTol);
      for (const auto& g : enumerate_generators(r))
        EXPECT_LE(out.certificate->violation(g), 1e-12);
    }
  }
}

}  // namespace
}  // namespace oppsched
