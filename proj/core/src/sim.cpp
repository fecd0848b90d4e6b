#include "oppsched/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "oppsched/error.hpp"
#include "oppsched/geometry.hpp"

namespace oppsched {

double MartingaleCheck::normalized_norm() const {
  if (count == 0) return 0.0;
  return norm(partial_sum) / static_cast<double>(count);
}

std::span<const double> Trace::x_at(std::size_t k) const {
  return std::span<const double>(x).subspan((k - 1) * m, m);
}

std::span<const double> Trace::avg_at(std::size_t k) const {
  return std::span<const double>(avg).subspan((k - 1) * m, m);
}

std::span<const double> Trace::queue_at(std::size_t k) const {
  return std::span<const double>(queue).subspan((k - 1) * m, m);
}

Vec Trace::final_average() const {
  if (slots.empty()) return Vec(m, 0.0);
  const auto a = avg_at(slots.size());
  return {a.begin(), a.end()};
}

std::vector<std::size_t> power_of_two_checkpoints(std::size_t horizon) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k <= horizon; k *= 2) out.push_back(k);
  if (out.empty() || out.back() != horizon) out.push_back(horizon);
  return out;
}

namespace {

void check_run_inputs(const Model& model, const Policy& policy,
                      const RunOptions& options) {
  require_valid(model);
  check_policy(policy, model);
  if (options.arrivals) {
    check_arrivals(*options.arrivals);
    if (arrival_dim(*options.arrivals) != model.m)
      throw InputError("arrival process dimension does not match the model");
  }
  if (options.region && options.region->dim() != model.m)
    throw InputError("region dimension does not match the model");
}

double region_distance(const RateRegion& region, std::span<const double> point,
                       double tol) {
  geometry::SolverOptions opts;
  opts.tol = tol;
  return geometry::project(region.body(), point, opts).dist;
}

}  // namespace

Trace run(const Model& model, const Policy& policy, std::size_t horizon,
          std::uint64_t seed, const RunOptions& options) {
  if (horizon < 1) throw InputError("horizon must be >= 1");
  check_run_inputs(model, policy, options);

  const RandSource policy_src(seed, kPolicyStream);
  const RandSource state_src(seed, kStateStream);
  const RandSource arrival_src(seed, kArrivalStream);
  const std::size_t m = model.m;

  Trace t;
  t.m = m;
  t.seed = seed;
  t.slots.reserve(horizon);
  t.x.reserve(horizon * m);
  t.avg.reserve(horizon * m);
  if (options.arrivals) t.queue.reserve(horizon * m);
  t.martingale.partial_sum.assign(m, 0.0);

  std::vector<std::size_t> marks;
  if (options.region) {
    marks = options.checkpoints.empty() ? power_of_two_checkpoints(horizon)
                                        : options.checkpoints;
    std::sort(marks.begin(), marks.end());
  }
  auto next_mark = marks.begin();

  std::vector<std::size_t> states;
  std::vector<std::size_t> tokens;
  states.reserve(horizon);
  tokens.reserve(horizon);
  QueueState q(options.arrivals ? m : 0, 0.0);
  Vec avg(m, 0.0);

  for (std::uint64_t k = 1; k <= horizon; ++k) {
    const Vec expected = conditional_mean(policy, model, states, tokens, q);
    states.push_back(sample_state(model, slot_uniform(state_src, k)));
    const Decision d = decide(policy, model, states, policy_src, q);
    tokens.push_back(d.token);
    const Vec& x = model.option(states.back(), d.option);

    for (std::size_t i = 0; i < m; ++i) {
      t.martingale.partial_sum[i] += x[i] - expected[i];
      avg[i] += (x[i] - avg[i]) / static_cast<double>(k);
    }
    t.martingale.count = k;
    t.slots.push_back({k, states.back(), d});
    t.x.insert(t.x.end(), x.begin(), x.end());
    t.avg.insert(t.avg.end(), avg.begin(), avg.end());

    if (options.arrivals) {
      q = step(q, draw_arrivals(*options.arrivals, arrival_src, k), x);
      t.queue.insert(t.queue.end(), q.begin(), q.end());
    }
    while (next_mark != marks.end() && *next_mark <= k) {
      if (*next_mark == k)
        t.checkpoints.push_back({k, region_distance(*options.region, avg, options.tol)});
      ++next_mark;
    }
  }
  return t;
}

double three_sigma_margin(double bound, std::size_t n) {
  return 3.0 * bound / std::sqrt(static_cast<double>(n));
}

MeanMembershipReport verify_mean_membership(
    const Model& model, const Policy& policy, std::size_t replications,
    std::size_t slot, const RateRegion& region, std::uint64_t base_seed,
    const RunOptions& options, double tol) {
  if (replications < 1000) throw InputError("need at least 1000 replications");
  if (slot < 1) throw InputError("slot must be >= 1");
  RunOptions plain = options;
  plain.region = nullptr;
  check_run_inputs(model, policy, plain);

  const std::size_t m = model.m;
  // Per-replication rows, summed in replication order afterwards so the
  // result does not depend on the thread count.
  std::vector<double> xs(replications * m), avgs(replications * m);
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < replications; r += workers) {
          const Trace t = run(model, policy, slot, base_seed + r, plain);
          std::copy_n(t.x_at(slot).begin(), m, xs.begin() + r * m);
          std::copy_n(t.avg_at(slot).begin(), m, avgs.begin() + r * m);
        }
      });
    }
  }

  MeanMembershipReport rep;
  rep.slot = slot;
  rep.replications = replications;
  rep.estimate.assign(m, 0.0);
  rep.average_estimate.assign(m, 0.0);
  for (std::size_t r = 0; r < replications; ++r)
    for (std::size_t i = 0; i < m; ++i) {
      rep.estimate[i] += xs[r * m + i];
      rep.average_estimate[i] += avgs[r * m + i];
    }
  for (std::size_t i = 0; i < m; ++i) {
    rep.estimate[i] /= static_cast<double>(replications);
    rep.average_estimate[i] /= static_cast<double>(replications);
  }
  rep.dist = region_distance(region, rep.estimate, tol);
  rep.average_dist = region_distance(region, rep.average_estimate, tol);
  rep.margin = three_sigma_margin(region.bound(), replications);
  rep.pass = rep.dist <= rep.margin && rep.average_dist <= rep.margin;
  return rep;
}

ConvergenceReport verify_avg_convergence(const Trace& trace, const RateRegion& region,
                                         std::vector<std::size_t> checkpoints,
                                         double tol) {
  if (trace.m != region.dim())
    throw InputError("trace dimension does not match the region");
  ConvergenceReport rep;
  rep.horizon = trace.horizon();
  rep.burn_in = rep.horizon / 10;
  if (rep.horizon < kMinVerifiableHorizon) {
    rep.insufficient_horizon = true;
    rep.pass = true;
    return rep;
  }
  if (checkpoints.empty()) checkpoints = power_of_two_checkpoints(rep.horizon);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()),
                    checkpoints.end());
  if (checkpoints.back() != rep.horizon) checkpoints.push_back(rep.horizon);

  for (std::size_t k : checkpoints) {
    if (k < 1 || k > rep.horizon) throw InputError("checkpoint outside the trace");
    rep.checkpoints.push_back({k, region_distance(region, trace.avg_at(k), tol)});
    rep.bounds.push_back(three_sigma_margin(region.bound(), k) + std::sqrt(tol));
  }

  rep.tail_maxima.assign(rep.checkpoints.size(), 0.0);
  double running = 0.0;
  rep.envelope_ok = true;
  for (std::size_t i = rep.checkpoints.size(); i-- > 0;) {
    running = std::max(running, rep.checkpoints[i].dist);
    rep.tail_maxima[i] = running;
    if (rep.checkpoints[i].k >= rep.burn_in && running > rep.bounds[i])
      rep.envelope_ok = false;
  }
  rep.final_dist = rep.checkpoints.back().dist;
  rep.final_bound = rep.bounds.back();
  rep.final_ok = rep.final_dist <= rep.final_bound;
  rep.pass = rep.final_ok && rep.envelope_ok;
  return rep;
}

namespace {

struct ClassAccumulator {
  double prob = 0.0;
  Vec mean_sum;
  std::vector<double> state_mass;
  std::vector<std::vector<double>> option_mass;
};

class PathEnumerator {
 public:
  PathEnumerator(const Model& model, const Policy& policy, std::size_t slot,
                 const DeterministicArrivals* arrivals, std::size_t cap)
      : model_(model), policy_(policy), slot_(slot), arrivals_(arrivals), cap_(cap) {}

  std::size_t paths() const noexcept { return paths_; }
  std::map<std::vector<std::size_t>, ClassAccumulator>& classes() { return classes_; }

  void walk(double prob, std::vector<std::size_t>& states,
            std::vector<std::size_t>& tokens, std::vector<std::size_t>& options,
            const QueueState& q) {
    const bool last = states.size() + 1 == slot_;
    for (std::size_t s = 0; s < model_.states.size(); ++s) {
      const double ps = model_.states[s].prob;
      if (ps <= 0.0) continue;
      states.push_back(s);
      for (const Branch& b : branches(policy_, model_, states, tokens, q)) {
        const double p = prob * ps * b.prob;
        const std::size_t opt = b.decision.option;
        if (last) {
          if (++paths_ > cap_)
            throw CapacityError("path enumeration exceeds the cap; use a smaller k");
          accumulate(options, s, opt, p);
          continue;
        }
        tokens.push_back(b.decision.token);
        options.push_back(opt);
        QueueState next = q;
        if (arrivals_) next = step(q, arrivals_->rate, model_.option(s, opt));
        walk(p, states, tokens, options, next);
        tokens.pop_back();
        options.pop_back();
      }
      states.pop_back();
    }
  }

 private:
  void accumulate(const std::vector<std::size_t>& prefix, std::size_t s,
                  std::size_t opt, double p) {
    auto [it, inserted] = classes_.try_emplace(prefix);
    ClassAccumulator& c = it->second;
    if (inserted) {
      c.mean_sum.assign(model_.m, 0.0);
      c.state_mass.assign(model_.states.size(), 0.0);
      for (const auto& st : model_.states) c.option_mass.emplace_back(st.options.size(), 0.0);
    }
    c.prob += p;
    axpy(p, model_.option(s, opt), c.mean_sum);
    c.state_mass[s] += p;
    c.option_mass[s][opt] += p;
  }

  const Model& model_;
  const Policy& policy_;
  std::size_t slot_;
  const DeterministicArrivals* arrivals_;
  std::size_t cap_;
  std::size_t paths_ = 0;
  std::map<std::vector<std::size_t>, ClassAccumulator> classes_;
};

}  // namespace

ConditionalReport verify_conditional_membership(
    const Model& model, const Policy& policy, std::size_t slot,
    const RateRegion& region, const RunOptions& options, std::size_t path_cap) {
  if (slot < 1) throw InputError("slot must be >= 1");
  RunOptions plain = options;
  plain.region = nullptr;
  check_run_inputs(model, policy, plain);
  const DeterministicArrivals* arrivals = nullptr;
  if (options.arrivals) {
    arrivals = std::get_if<DeterministicArrivals>(&*options.arrivals);
    if (!arrivals)
      throw InputError("exact enumeration supports deterministic arrivals only");
  }

  PathEnumerator walker(model, policy, slot, arrivals, path_cap);
  std::vector<std::size_t> states, tokens, options_taken;
  walker.walk(1.0, states, tokens, options_taken,
              QueueState(arrivals ? model.m : 0, 0.0));

  ConditionalReport rep;
  rep.slot = slot;
  rep.paths = walker.paths();
  rep.pass = true;
  geometry::SolverOptions tight;
  tight.tol = 1e-14;
  for (auto& [prefix, acc] : walker.classes()) {
    ConditionalClass c;
    c.prefix = prefix;
    c.prob = acc.prob;
    c.mean = scaled(acc.mean_sum, 1.0 / acc.prob);
    // Witness: the stationary policy using the conditional option law in
    // each state, averaged with the true lambda. Its mean lies in the region
    // by construction, so a tiny residual certifies membership.
    std::vector<std::vector<double>> weights(model.states.size());
    for (std::size_t s = 0; s < model.states.size(); ++s) {
      c.state_marginal.push_back(acc.state_mass[s] / acc.prob);
      weights[s].assign(model.states[s].options.size(), 0.0);
      if (acc.state_mass[s] > 0.0) {
        for (std::size_t i = 0; i < weights[s].size(); ++i)
          weights[s][i] = acc.option_mass[s][i] / acc.state_mass[s];
      } else {
        weights[s][fallback_choice(model, s)] = 1.0;
      }
    }
    c.witness_residual = distance(c.mean, decomposition_mean(model, weights));
    try {
      c.projection_dist = geometry::project(region.body(), c.mean, tight).dist;
    } catch (const ConvergenceError&) {
      c.projection_dist = region_distance(region, c.mean, kDefaultTol);
    }
    const double violation = std::min(c.witness_residual, c.projection_dist);
    c.member = violation <= kConditionalTolerance;
    rep.max_violation = std::max(rep.max_violation, violation);
    rep.pass = rep.pass && c.member;
    rep.classes.push_back(std::move(c));
  }
  return rep;
}

}  // namespace oppsched
