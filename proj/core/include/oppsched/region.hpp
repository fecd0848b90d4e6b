#pragma once

// The closed rate region of a finite model: the set of mean rate vectors
// E[v(S,U)] of stationary randomized decisions v(s,u) in C(s).
//
// The region is the lambda-weighted Minkowski sum of the per-state option
// hulls. Its LMO decomposes per state: an optimal point in direction d picks,
// independently for every state, an option minimizing d^T v. Extreme points
// are therefore deterministic stationary policies (one option per state),
// which is what makes Frank-Wolfe atoms directly usable as time-sharing
// decompositions.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "oppsched/geometry.hpp"
#include "oppsched/model.hpp"

namespace oppsched {

inline constexpr double kDefaultTol = 1e-10;
inline constexpr std::size_t kDefaultGeneratorCap = 1'000'000;

class RateRegion {
 public:
  // Throws InputError when the model fails validation.
  explicit RateRegion(Model model);

  const Model& model() const noexcept { return *model_; }
  std::size_t dim() const noexcept { return model_->m; }
  double bound() const noexcept { return bound_; }
  const geometry::ConvexBody& body() const noexcept { return body_; }

  // Per-state option minimizing d^T v; ties go to the lowest option index.
  std::vector<std::size_t> select(std::span<const double> d) const;

  // sum_s lambda(s) v(s, selection[s])
  Vec mean_of(std::span<const std::size_t> selection) const;

  // prod_s |C(s)|, saturating at SIZE_MAX.
  std::size_t deterministic_policy_count() const;

 private:
  std::shared_ptr<const Model> model_;
  double bound_;
  geometry::ConvexBody body_;
};

Vec lmo(const RateRegion& region, std::span<const double> d);

// Every mean_of(selection) over all deterministic stationary policies, exact
// duplicates removed, in lexicographic selection order. Throws CapacityError
// when the policy count exceeds `cap`; use the LMO-based operations instead.
std::vector<Vec> enumerate_generators(const RateRegion& region,
                                      std::size_t cap = kDefaultGeneratorCap);

struct MembershipResult {
  bool member = false;
  double dist = 0.0;
  Vec nearest;                                     // projection onto the region
  std::optional<geometry::HalfSpace> certificate;  // set when !member
};

MembershipResult membership(const RateRegion& region, std::span<const double> x,
                            double tol = kDefaultTol);

struct DominanceResult {
  bool dominated = false;
  double value = 0.0;  // ||(a - y)^+||^2 at the returned point
  double gap = 0.0;
  Vec point;           // y in the region

  explicit operator bool() const noexcept { return dominated; }
};

// Whether a is dominated componentwise by some point of the region, i.e.
// min over y of ||(a - y)^+|| <= sqrt(tol). Throws ConvergenceError.
DominanceResult dominance(const RateRegion& region, std::span<const double> a,
                          double tol = kDefaultTol);

// Signed distance from a to the boundary of the 1-hop capacity region
// {a : a <= y for some y in the region}: negative outside, and inside the
// minimum over sampled nonnegative unit directions of support slack.
double capacity_margin(const RateRegion& region, std::span<const double> a,
                       std::size_t directions = 2048, double tol = kDefaultTol);

struct TargetDecomposition {
  Vec target;
  std::vector<std::vector<double>> weights;  // p_s over C(s), per state
  double residual = 0.0;  // ||sum_s lambda(s) sum_i p_si v_si - target||
};

// The exact mean sum_s lambda(s) sum_i p_si v_si of per-state weights.
Vec decomposition_mean(const Model& model,
                       const std::vector<std::vector<double>>& weights);

class NotInRegionError : public std::runtime_error {
 public:
  NotInRegionError(geometry::HalfSpace certificate, double dist);

  const geometry::HalfSpace& certificate() const noexcept { return cert_; }
  double dist() const noexcept { return dist_; }

 private:
  geometry::HalfSpace cert_;
  double dist_;
};

// Per-state simplex weights whose mean is within sqrt(tol) of x, read off
// the projection solver's atoms. Throws NotInRegionError outside the region.
TargetDecomposition decompose(const RateRegion& region, std::span<const double> x,
                              double tol = kDefaultTol);

}  // namespace oppsched
