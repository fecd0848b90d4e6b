#include "oppsched/queueing.hpp"

#include <algorithm>
#include <cmath>

#include "oppsched/error.hpp"
#include "oppsched/sim.hpp"

namespace oppsched {

Vec mean_rate(const ArrivalProcess& arrivals) {
  if (auto* d = std::get_if<DeterministicArrivals>(&arrivals)) return d->rate;
  const auto& b = std::get<BernoulliArrivals>(arrivals);
  Vec out(b.prob.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = b.prob[j] * b.batch[j];
  return out;
}

std::size_t arrival_dim(const ArrivalProcess& arrivals) {
  if (auto* d = std::get_if<DeterministicArrivals>(&arrivals)) return d->rate.size();
  return std::get<BernoulliArrivals>(arrivals).prob.size();
}

void check_arrivals(const ArrivalProcess& arrivals) {
  auto nonneg = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(),
                       [](double a) { return std::isfinite(a) && a >= 0.0; });
  };
  if (auto* d = std::get_if<DeterministicArrivals>(&arrivals)) {
    if (!nonneg(d->rate)) throw InputError("arrival rates must be finite and >= 0");
    return;
  }
  const auto& b = std::get<BernoulliArrivals>(arrivals);
  if (b.prob.size() != b.batch.size())
    throw InputError("Bernoulli arrivals need one batch size per probability");
  if (!nonneg(b.batch)) throw InputError("arrival batch sizes must be finite and >= 0");
  for (double p : b.prob)
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("arrival probabilities must be in [0,1]");
}

Vec draw_arrivals(const ArrivalProcess& arrivals, const RandSource& src,
                  std::uint64_t k) {
  if (auto* d = std::get_if<DeterministicArrivals>(&arrivals)) return d->rate;
  const auto& b = std::get<BernoulliArrivals>(arrivals);
  const std::uint64_t m = b.prob.size();
  Vec out(m, 0.0);
  for (std::uint64_t j = 0; j < m; ++j)
    if (slot_uniform(src, (k - 1) * m + j + 1) < b.prob[j]) out[j] = b.batch[j];
  return out;
}

QueueState step(std::span<const double> q, std::span<const double> a,
                std::span<const double> x) {
  if (q.size() != a.size() || q.size() != x.size())
    throw InputError("queue, arrival, and service vectors differ in dimension");
  QueueState out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = std::max(q[i] + a[i] - x[i], 0.0);
  return out;
}

double backlog(std::span<const double> q) {
  double s = 0.0;
  for (double v : q) s += v;
  return s;
}

double least_squares_slope(std::span<const double> ys) {
  const std::size_t n = ys.size();
  if (n < 2) return 0.0;
  const double kbar = (static_cast<double>(n) + 1.0) / 2.0;
  double ybar = 0.0;
  for (double y : ys) ybar += y;
  ybar /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dk = static_cast<double>(i + 1) - kbar;
    num += dk * (ys[i] - ybar);
    den += dk * dk;
  }
  return num / den;
}

StabilityReport stability_from_backlogs(std::span<const double> backlogs,
                                        QueueState final_queue) {
  StabilityReport r;
  r.horizon = backlogs.size();
  r.final_queue = std::move(final_queue);
  if (backlogs.empty()) {
    r.stable = true;
    return r;
  }
  double total = 0.0;
  for (double b : backlogs) total += b;
  r.time_avg_backlog = total / static_cast<double>(backlogs.size());
  const std::size_t tail = std::max<std::size_t>(1, backlogs.size() / 4);
  double tail_total = 0.0;
  for (std::size_t i = backlogs.size() - tail; i < backlogs.size(); ++i)
    tail_total += backlogs[i];
  r.tail_avg_backlog = tail_total / static_cast<double>(tail);
  r.drift_slope = least_squares_slope(backlogs);
  r.stable = r.drift_slope <= kStabilitySlopeThreshold;
  return r;
}

StabilityReport run_maxweight(const Model& model, const ArrivalProcess& arrivals,
                              std::size_t horizon, std::uint64_t seed) {
  if (horizon < 1000) throw InputError("stability runs need a horizon of at least 1000");
  RunOptions opts;
  opts.arrivals = arrivals;
  const Trace t = run(model, MaxWeightPolicy{}, horizon, seed, opts);
  std::vector<double> backlogs(horizon);
  for (std::size_t k = 1; k <= horizon; ++k) backlogs[k - 1] = backlog(t.queue_at(k));
  const auto last = t.queue_at(horizon);
  return stability_from_backlogs(backlogs, QueueState(last.begin(), last.end()));
}

}  // namespace oppsched
