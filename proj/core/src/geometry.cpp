#include "oppsched/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <set>
#include <string>

#include "oppsched/error.hpp"

namespace oppsched::geometry {

namespace {

class SquaredDistance final : public SmoothObjective {
 public:
  explicit SquaredDistance(std::span<const double> x) : x_(x.begin(), x.end()) {}

  double value(std::span<const double> y) const override {
    return squared_distance(y, x_);
  }
  Vec gradient(std::span<const double> y) const override {
    Vec g = sub(y, x_);
    for (double& v : g) v *= 2.0;
    return g;
  }
  double line_search(std::span<const double> y, std::span<const double> d,
                     double gamma_max) const override {
    const double dd = dot(d, d);
    if (dd == 0.0) return 0.0;
    const Vec r = sub(y, x_);
    return std::clamp(-dot(r, d) / dd, 0.0, gamma_max);
  }

 private:
  Vec x_;
};

Vec combine(const std::vector<WeightedAtom>& atoms, std::size_t dim) {
  Vec y(dim, 0.0);
  for (const auto& wa : atoms) axpy(wa.weight, wa.atom.point, y);
  return y;
}

// Drops vanishing weights and rescales so the weights sum to one.
void renormalize(std::vector<WeightedAtom>& atoms) {
  std::erase_if(atoms, [](const WeightedAtom& wa) { return wa.weight <= 0.0; });
  double total = 0.0;
  for (const auto& wa : atoms) total += wa.weight;
  for (auto& wa : atoms) wa.weight /= total;
}

constexpr long kResyncPeriod = 64;

}  // namespace

bool Atom::same_vertex(const Atom& other) const {
  if (!key.empty() || !other.key.empty()) return key == other.key;
  return point == other.point;
}

ConvexBody::ConvexBody(std::size_t dim, LinearMinOracle lmo, double bound,
                       std::optional<std::vector<Vec>> generators)
    : dim_(dim),
      lmo_(std::move(lmo)),
      bound_(bound),
      generators_(std::move(generators)) {}

ConvexBody ConvexBody::from_generators(std::vector<Vec> generators) {
  if (generators.empty()) throw InputError("convex body needs a generator");
  const std::size_t dim = generators[0].size();
  double bound = 0.0;
  for (const auto& g : generators) {
    if (g.size() != dim) throw InputError("generators of mixed dimension");
    if (!all_finite(g)) throw InputError("non-finite generator");
    bound = std::max(bound, norm(g));
  }
  auto shared = std::make_shared<const std::vector<Vec>>(generators);
  LinearMinOracle lmo = [shared](std::span<const double> d) {
    std::size_t best = 0;
    double best_value = dot(d, (*shared)[0]);
    for (std::size_t i = 1; i < shared->size(); ++i) {
      const double v = dot(d, (*shared)[i]);
      if (v < best_value) {
        best_value = v;
        best = i;
      }
    }
    return Atom{(*shared)[best], {best}};
  };
  return ConvexBody(dim, std::move(lmo), bound, std::move(generators));
}

ConvexBody ConvexBody::from_oracle(std::size_t dim, LinearMinOracle lmo,
                                   double bound) {
  if (dim == 0) throw InputError("convex body dimension must be positive");
  if (!(bound >= 0.0)) throw InputError("convex body bound must be >= 0");
  return ConvexBody(dim, std::move(lmo), bound, std::nullopt);
}

Atom ConvexBody::minimize(std::span<const double> direction) const {
  if (direction.size() != dim_)
    throw InputError("direction has dimension " +
                     std::to_string(direction.size()) + ", body has " +
                     std::to_string(dim_));
  return lmo_(direction);
}

double HalfSpace::violation(std::span<const double> x) const {
  return dot(a, x) - b;
}

double support(const ConvexBody& body, std::span<const double> a) {
  if (std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; }))
    return 0.0;
  if (const auto& gens = body.generators()) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& g : *gens) best = std::max(best, dot(a, g));
    return best;
  }
  return dot(a, body.lmo(negated(a)));
}

FrankWolfeResult minimize_over(
    const ConvexBody& body, const SmoothObjective& objective, Atom start,
    const SolverOptions& options,
    const std::function<bool(double, double)>& stop) {
  if (!(options.tol > 0.0)) throw InputError("solver tolerance must be > 0");
  const std::size_t dim = body.dim();

  FrankWolfeResult r;
  r.atoms.push_back({std::move(start), 1.0});
  r.point = r.atoms[0].atom.point;

  for (long it = 0;; ++it) {
    r.iterations = it;
    const Vec g = objective.gradient(r.point);
    Atom s = body.minimize(g);
    const Vec toward = sub(s.point, r.point);
    r.gap = -dot(g, toward);
    r.value = objective.value(r.point);
    if (r.gap <= options.tol) return r;
    if (stop && stop(r.value, r.gap)) return r;
    if (it >= options.max_iterations)
      throw ConvergenceError("Frank-Wolfe did not reach tolerance", r.gap, it);

    std::size_t away = 0;
    double away_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.atoms.size(); ++i) {
      const double v = dot(g, r.atoms[i].atom.point);
      if (v > away_score) {
        away_score = v;
        away = i;
      }
    }
    const double away_gap = away_score - dot(g, r.point);

    if (r.atoms.size() == 1 || r.gap >= away_gap ||
        r.atoms[away].weight >= 1.0) {
      const double gamma = objective.line_search(r.point, toward, 1.0);
      if (gamma >= 1.0) {
        r.atoms.clear();
        r.atoms.push_back({std::move(s), 1.0});
        r.point = r.atoms[0].atom.point;
        continue;
      }
      bool merged = false;
      for (auto& wa : r.atoms) {
        wa.weight *= (1.0 - gamma);
        if (!merged && wa.atom.same_vertex(s)) {
          wa.weight += gamma;
          merged = true;
        }
      }
      if (!merged) r.atoms.push_back({std::move(s), gamma});
      axpy(gamma, toward, r.point);
    } else {
      const double alpha = r.atoms[away].weight;
      const double gamma_max = alpha / (1.0 - alpha);
      const Vec from = sub(r.point, r.atoms[away].atom.point);
      const double gamma = objective.line_search(r.point, from, gamma_max);
      for (auto& wa : r.atoms) wa.weight *= (1.0 + gamma);
      if (gamma >= gamma_max) {
        r.atoms.erase(r.atoms.begin() + static_cast<std::ptrdiff_t>(away));
      } else {
        r.atoms[away].weight -= gamma;
      }
      axpy(gamma, from, r.point);
    }

    if ((it + 1) % kResyncPeriod == 0) {
      renormalize(r.atoms);
      r.point = combine(r.atoms, dim);
    }
  }
}

Projection project(const ConvexBody& body, std::span<const double> x,
                   const SolverOptions& options) {
  if (x.size() != body.dim())
    throw InputError("projection point has wrong dimension");
  if (!all_finite(x)) throw InputError("projection point is not finite");
  SquaredDistance objective(x);
  FrankWolfeResult fw =
      minimize_over(body, objective, body.minimize(negated(x)), options);
  renormalize(fw.atoms);
  Projection p;
  p.point = combine(fw.atoms, body.dim());
  p.dist = distance(p.point, x);
  p.gap = fw.gap;
  p.iterations = fw.iterations;
  p.atoms = std::move(fw.atoms);
  return p;
}

std::vector<HalfSpace> outer_halfspaces(const ConvexBody& body,
                                        std::span<const Vec> directions) {
  std::vector<HalfSpace> out;
  out.reserve(directions.size());
  for (const auto& d : directions) {
    if (d.size() != body.dim())
      throw InputError("half-space direction has wrong dimension");
    const double n = norm(d);
    if (!(n > 0.0) || !std::isfinite(n))
      throw InputError("half-space direction must be finite and nonzero");
    Vec a = scaled(d, 1.0 / n);
    const double b = support(body, a);
    out.push_back({std::move(a), b});
  }
  return out;
}

namespace {

double cross(const Vec& o, const Vec& a, const Vec& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

std::vector<Vec> planar_hull(std::vector<Vec> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) return pts;
  std::vector<Vec> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

std::vector<Vec> hull_generators(std::span<const Vec> points) {
  if (points.empty()) throw InputError("hull of an empty point set");
  const std::size_t dim = points[0].size();
  for (const auto& p : points)
    if (p.size() != dim) throw InputError("hull points of mixed dimension");

  if (dim == 1) {
    auto [lo, hi] = std::minmax_element(
        points.begin(), points.end(),
        [](const Vec& a, const Vec& b) { return a[0] < b[0]; });
    if ((*lo)[0] == (*hi)[0]) return {*lo};
    return {*lo, *hi};
  }
  if (dim == 2) return planar_hull({points.begin(), points.end()});

  std::vector<Vec> out;
  std::set<Vec> seen;
  for (const auto& p : points)
    if (seen.insert(p).second) out.push_back(p);
  return out;
}

}  // namespace oppsched::geometry
