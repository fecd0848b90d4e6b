#include "oppsched/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "oppsched/error.hpp"

namespace oppsched {

namespace {

std::vector<std::size_t> select_min(const Model& model,
                                    std::span<const double> d) {
  std::vector<std::size_t> sel(model.states.size(), 0);
  for (std::size_t s = 0; s < model.states.size(); ++s) {
    const auto& opts = model.states[s].options;
    double best = dot(d, opts[0]);
    for (std::size_t i = 1; i < opts.size(); ++i) {
      const double v = dot(d, opts[i]);
      if (v < best) {
        best = v;
        sel[s] = i;
      }
    }
  }
  return sel;
}

Vec weighted_mean(const Model& model, std::span<const std::size_t> sel) {
  Vec out(model.m, 0.0);
  for (std::size_t s = 0; s < model.states.size(); ++s)
    axpy(model.states[s].prob, model.states[s].options[sel[s]], out);
  return out;
}

// ||(a - y)^+||^2, the squared distance from a to {y} - R^m_+.
class PositivePartSquared final : public geometry::SmoothObjective {
 public:
  explicit PositivePartSquared(std::span<const double> a) : a_(a.begin(), a.end()) {}

  double value(std::span<const double> y) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) {
      const double r = std::max(a_[i] - y[i], 0.0);
      s += r * r;
    }
    return s;
  }
  Vec gradient(std::span<const double> y) const override {
    Vec g(a_.size());
    for (std::size_t i = 0; i < a_.size(); ++i)
      g[i] = -2.0 * std::max(a_[i] - y[i], 0.0);
    return g;
  }
  double line_search(std::span<const double> y, std::span<const double> d,
                     double gamma_max) const override {
    // phi(gamma) is convex piecewise quadratic; bisect on its derivative.
    auto slope = [&](double gamma) {
      double s = 0.0;
      for (std::size_t i = 0; i < a_.size(); ++i) {
        const double r = a_[i] - y[i] - gamma * d[i];
        if (r > 0.0) s -= 2.0 * d[i] * r;
      }
      return s;
    };
    if (slope(0.0) >= 0.0) return 0.0;
    if (slope(gamma_max) <= 0.0) return gamma_max;
    double lo = 0.0, hi = gamma_max;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  Vec a_;
};

}  // namespace

RateRegion::RateRegion(Model model)
    : model_(std::make_shared<const Model>(std::move(model))),
      bound_(0.0),
      body_(geometry::ConvexBody::from_generators({Vec{0.0}})) {
  require_valid(*model_);
  bound_ = model_->effective_bound();
  std::shared_ptr<const Model> m = model_;
  body_ = geometry::ConvexBody::from_oracle(
      m->m,
      [m](std::span<const double> d) {
        std::vector<std::size_t> sel = select_min(*m, d);
        Vec point = weighted_mean(*m, sel);
        return geometry::Atom{std::move(point), std::move(sel)};
      },
      bound_);
}

std::vector<std::size_t> RateRegion::select(std::span<const double> d) const {
  if (d.size() != model_->m) throw InputError("direction has wrong dimension");
  return select_min(*model_, d);
}

Vec RateRegion::mean_of(std::span<const std::size_t> selection) const {
  if (selection.size() != model_->states.size())
    throw InputError("selection needs one option per state");
  for (std::size_t s = 0; s < selection.size(); ++s)
    if (selection[s] >= model_->states[s].options.size())
      throw InputError("selection indexes past an option list");
  return weighted_mean(*model_, selection);
}

std::size_t RateRegion::deterministic_policy_count() const {
  std::size_t count = 1;
  for (const auto& s : model_->states) {
    const std::size_t n = s.options.size();
    if (count > std::numeric_limits<std::size_t>::max() / n)
      return std::numeric_limits<std::size_t>::max();
    count *= n;
  }
  return count;
}

Vec lmo(const RateRegion& region, std::span<const double> d) {
  return region.body().lmo(d);
}

std::vector<Vec> enumerate_generators(const RateRegion& region, std::size_t cap) {
  const std::size_t count = region.deterministic_policy_count();
  if (count > cap)
    throw CapacityError(
        "rate region has more than " + std::to_string(cap) +
        " deterministic stationary policies; use LMO-only operations");
  const Model& model = region.model();
  std::vector<std::size_t> sel(model.states.size(), 0);
  std::vector<Vec> out;
  std::set<Vec> seen;
  for (std::size_t n = 0; n < count; ++n) {
    Vec g = weighted_mean(model, sel);
    if (seen.insert(g).second) out.push_back(std::move(g));
    // Odometer with the last state varying fastest.
    for (std::size_t s = sel.size(); s-- > 0;) {
      if (++sel[s] < model.states[s].options.size()) break;
      sel[s] = 0;
    }
  }
  return out;
}

MembershipResult membership(const RateRegion& region, std::span<const double> x,
                            double tol) {
  if (!(tol > 0.0)) throw InputError("tolerance must be > 0");
  geometry::SolverOptions opts;
  opts.tol = tol;
  const geometry::Projection p = geometry::project(region.body(), x, opts);
  MembershipResult r;
  r.dist = p.dist;
  r.nearest = p.point;
  r.member = p.dist <= std::sqrt(tol);
  if (!r.member) {
    const std::vector<Vec> dirs{sub(x, p.point)};
    r.certificate = geometry::outer_halfspaces(region.body(), dirs).front();
  }
  return r;
}

DominanceResult dominance(const RateRegion& region, std::span<const double> a,
                          double tol) {
  if (!(tol > 0.0)) throw InputError("tolerance must be > 0");
  if (a.size() != region.dim()) throw InputError("arrival vector has wrong dimension");
  if (!all_finite(a)) throw InputError("arrival vector is not finite");
  PositivePartSquared objective(a);
  geometry::SolverOptions opts;
  opts.tol = tol;
  // The optimum is <= value and >= value - gap, so the verdict is settled as
  // soon as either bound crosses tol.
  const auto settled = [tol](double value, double gap) {
    return value <= tol || value - gap > tol;
  };
  geometry::FrankWolfeResult fw = geometry::minimize_over(
      region.body(), objective, region.body().minimize(negated(a)), opts, settled);
  DominanceResult r;
  r.value = fw.value;
  r.gap = fw.gap;
  r.point = std::move(fw.point);
  r.dominated = r.value <= tol;
  return r;
}

double capacity_margin(const RateRegion& region, std::span<const double> a,
                       std::size_t directions, double tol) {
  const DominanceResult dom = dominance(region, a, tol);
  if (!dom.dominated) return -std::sqrt(dom.value);

  const std::size_t m = region.dim();
  double depth = std::numeric_limits<double>::infinity();
  auto slack = [&](const Vec& d) {
    depth = std::min(depth, geometry::support(region.body(), d) - dot(d, a));
  };
  for (std::size_t i = 0; i < m; ++i) {
    Vec e(m, 0.0);
    e[i] = 1.0;
    slack(e);
  }
  if (m == 2) {
    for (std::size_t k = 0; k <= directions; ++k) {
      const double t = (std::numbers::pi / 2) * static_cast<double>(k) /
                       static_cast<double>(directions);
      slack(Vec{std::cos(t), std::sin(t)});
    }
  } else if (m > 2) {
    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> normal;
    for (std::size_t k = 0; k < directions; ++k) {
      Vec d(m);
      for (double& v : d) v = std::abs(normal(rng));
      slack(scaled(d, 1.0 / norm(d)));
    }
  }
  return depth;
}

Vec decomposition_mean(const Model& model,
                       const std::vector<std::vector<double>>& weights) {
  if (weights.size() != model.states.size())
    throw InputError("decomposition needs one weight vector per state");
  Vec out(model.m, 0.0);
  for (std::size_t s = 0; s < model.states.size(); ++s) {
    const auto& opts = model.states[s].options;
    if (weights[s].size() != opts.size())
      throw InputError("decomposition weights do not match the option list");
    for (std::size_t i = 0; i < opts.size(); ++i)
      axpy(model.states[s].prob * weights[s][i], opts[i], out);
  }
  return out;
}

NotInRegionError::NotInRegionError(geometry::HalfSpace certificate, double dist)
    : std::runtime_error("target lies outside the rate region (distance " +
                         std::to_string(dist) + ")"),
      cert_(std::move(certificate)),
      dist_(dist) {}

TargetDecomposition decompose(const RateRegion& region, std::span<const double> x,
                              double tol) {
  if (!(tol > 0.0)) throw InputError("tolerance must be > 0");
  geometry::SolverOptions opts;
  opts.tol = tol;
  const geometry::Projection p = geometry::project(region.body(), x, opts);
  if (p.dist > std::sqrt(tol)) {
    const std::vector<Vec> dirs{sub(x, p.point)};
    throw NotInRegionError(geometry::outer_halfspaces(region.body(), dirs).front(),
                           p.dist);
  }
  const Model& model = region.model();
  TargetDecomposition out;
  out.target.assign(x.begin(), x.end());
  out.weights.resize(model.states.size());
  for (std::size_t s = 0; s < model.states.size(); ++s)
    out.weights[s].assign(model.states[s].options.size(), 0.0);
  for (const auto& wa : p.atoms)
    for (std::size_t s = 0; s < model.states.size(); ++s)
      out.weights[s][wa.atom.key[s]] += wa.weight;
  out.residual = distance(decomposition_mean(model, out.weights), x);
  return out;
}

}  // namespace oppsched
