#pragma once

// Compact convex bodies in R^m accessed through a linear-minimization
// oracle (LMO), with projection by away-step Frank-Wolfe.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "oppsched/vec.hpp"

namespace oppsched::geometry {

// An extreme point returned by an LMO. `key` identifies the vertex
// combinatorially (generator index, per-state selection, ...) so that active
// sets can merge repeated visits exactly. An empty key falls back to
// comparing points.
struct Atom {
  Vec point;
  std::vector<std::size_t> key;

  bool same_vertex(const Atom& other) const;
};

using LinearMinOracle = std::function<Atom(std::span<const double> direction)>;

class ConvexBody {
 public:
  // conv(generators). Throws InputError if empty or of mixed dimension.
  static ConvexBody from_generators(std::vector<Vec> generators);

  // A body known only through its LMO. `bound` must dominate the norm of
  // every point of the body.
  static ConvexBody from_oracle(std::size_t dim, LinearMinOracle lmo,
                                double bound);

  std::size_t dim() const noexcept { return dim_; }
  double bound() const noexcept { return bound_; }
  const std::optional<std::vector<Vec>>& generators() const noexcept {
    return generators_;
  }

  // argmin over the body of d^T y; ties go to the lowest generator index.
  Atom minimize(std::span<const double> direction) const;
  Vec lmo(std::span<const double> direction) const {
    return minimize(direction).point;
  }

 private:
  ConvexBody(std::size_t dim, LinearMinOracle lmo, double bound,
             std::optional<std::vector<Vec>> generators);

  std::size_t dim_;
  LinearMinOracle lmo_;
  double bound_;
  std::optional<std::vector<Vec>> generators_;
};

struct HalfSpace {
  Vec a;     // unit normal
  double b;  // offset: {x : a^T x <= b}

  double violation(std::span<const double> x) const;  // a^T x - b
};

// Maximum of a^T y over the body.
double support(const ConvexBody& body, std::span<const double> a);

struct SolverOptions {
  double tol = 1e-10;            // Frank-Wolfe duality gap
  long max_iterations = 100000;
};

struct WeightedAtom {
  Atom atom;
  double weight;
};

// Smooth convex objective over the body. line_search returns a minimizer of
// value(y + gamma d) over gamma in [0, gamma_max].
class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;
  virtual double value(std::span<const double> y) const = 0;
  virtual Vec gradient(std::span<const double> y) const = 0;
  virtual double line_search(std::span<const double> y,
                             std::span<const double> d,
                             double gamma_max) const = 0;
};

struct FrankWolfeResult {
  Vec point;
  double value = 0.0;
  double gap = 0.0;  // value - optimum <= gap
  long iterations = 0;
  std::vector<WeightedAtom> atoms;  // convex weights reproducing `point`
};

// Away-step Frank-Wolfe. Stops once the duality gap is <= options.tol or
// `stop(value, gap)` returns true; throws ConvergenceError at the cap.
FrankWolfeResult minimize_over(
    const ConvexBody& body, const SmoothObjective& objective, Atom start,
    const SolverOptions& options,
    const std::function<bool(double value, double gap)>& stop = {});

struct Projection {
  Vec point;
  double dist = 0.0;
  double gap = 0.0;  // certifies ||x - point||^2 - min <= gap
  long iterations = 0;
  std::vector<WeightedAtom> atoms;
};

// Euclidean projection of x onto the body with ||x - y||^2 - min <= tol.
Projection project(const ConvexBody& body, std::span<const double> x,
                   const SolverOptions& options = {});

// One supporting half-space per normalized direction; their intersection
// contains the body. Throws InputError on a zero direction.
std::vector<HalfSpace> outer_halfspaces(const ConvexBody& body,
                                        std::span<const Vec> directions);

// A subset of points with the same convex hull. Exact and minimal for
// m <= 2; for m >= 3 only exact duplicates are removed.
std::vector<Vec> hull_generators(std::span<const Vec> points);

}  // namespace oppsched::geometry
