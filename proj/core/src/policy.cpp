#include "oppsched/policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oppsched/error.hpp"

namespace oppsched {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const std::vector<std::vector<double>>* stationary_weights(const Policy& p) {
  if (auto* r = std::get_if<RandomizedStationaryPolicy>(&p)) return &r->weights;
  if (auto* t = std::get_if<TargetPolicy>(&p)) return &t->decomposition.weights;
  return nullptr;
}

void check_weights(const std::vector<std::vector<double>>& weights,
                   const Model& model) {
  if (weights.size() != model.states.size())
    throw InputError("stationary policy needs one weight vector per state");
  for (std::size_t s = 0; s < weights.size(); ++s) {
    if (weights[s].size() != model.states[s].options.size())
      throw InputError("weights for state '" + model.states[s].label +
                       "' do not match its option list");
    check_simplex(weights[s]);
  }
}

std::size_t level_of(double u, std::size_t q) {
  const auto l = static_cast<std::size_t>(std::floor(u * static_cast<double>(q)));
  return std::min(l, q - 1);
}

Decision custom_lookup(const CustomPolicy& policy, const Model& model,
                       std::span<const std::size_t> states,
                       std::vector<std::size_t> levels) {
  const std::size_t s = states.back();
  const std::size_t token = levels.back();
  CustomPolicy::Key key{{states.begin(), states.end()}, std::move(levels)};
  auto it = policy.table.find(key);
  // The table plays g_k; entries outside C(s_k) are replaced by psi(s_k).
  if (it == policy.table.end() || it->second >= model.states[s].options.size())
    return {fallback_choice(model, s), token, true};
  return {it->second, token, false};
}

void check_history(const Model& model, std::span<const std::size_t> states) {
  // Only the current state is checked: earlier entries were checked when
  // they were current, and a custom table lookup on a bad prefix just misses.
  if (states.empty()) throw InputError("decision history must be nonempty");
  if (states.back() >= model.states.size())
    throw InputError("history names an unknown state");
}

}  // namespace

std::size_t CustomPolicy::max_depth() const {
  std::size_t d = 0;
  for (const auto& [key, option] : table) d = std::max(d, key.states.size());
  return d;
}

const char* kind_name(const Policy& policy) {
  return std::visit(
      Overloaded{[](const DeterministicPolicy&) { return "deterministic"; },
                 [](const RandomizedStationaryPolicy&) { return "randomized"; },
                 [](const TargetPolicy&) { return "target"; },
                 [](const MaxWeightPolicy&) { return "maxweight"; },
                 [](const CustomPolicy&) { return "custom"; }},
      policy);
}

void check_policy(const Policy& policy, const Model& model) {
  std::visit(
      Overloaded{
          [&](const DeterministicPolicy& p) {
            if (p.psi.size() != model.states.size())
              throw InputError("deterministic policy needs one option per state");
            for (std::size_t s = 0; s < p.psi.size(); ++s)
              if (p.psi[s] >= model.states[s].options.size())
                throw InputError("deterministic policy indexes past C(s) for state '" +
                                 model.states[s].label + "'");
          },
          [&](const RandomizedStationaryPolicy& p) { check_weights(p.weights, model); },
          [&](const TargetPolicy& p) { check_weights(p.decomposition.weights, model); },
          [&](const MaxWeightPolicy&) {},
          [&](const CustomPolicy& p) {
            if (p.levels < 1) throw InputError("custom policy needs levels >= 1");
            for (const auto& [key, option] : p.table) {
              if (key.states.empty() || key.states.size() != key.levels.size())
                throw InputError("custom policy key needs equal-length, nonempty "
                                 "state and level sequences");
              for (std::size_t s : key.states)
                if (s >= model.states.size())
                  throw InputError("custom policy key names an unknown state");
              for (std::size_t l : key.levels)
                if (l >= p.levels)
                  throw InputError("custom policy key level out of range");
            }
          }},
      policy);
}

std::size_t fallback_choice(const Model& model, std::size_t state) {
  if (model.choice) return (*model.choice).at(state);
  return 0;
}

std::size_t max_weight(std::span<const double> q, std::span<const Vec> options) {
  if (options.empty()) throw InputError("max-weight needs a nonempty option list");
  std::size_t best = 0;
  double best_value = dot(q, options[0]);
  for (std::size_t i = 1; i < options.size(); ++i) {
    const double v = dot(q, options[i]);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return best;
}

namespace {

std::size_t max_weight_choice(const Model& model, std::size_t s,
                              std::span<const double> queue) {
  const auto& opts = model.states[s].options;
  if (queue.empty()) {
    const Vec zero(model.m, 0.0);
    return max_weight(zero, opts);
  }
  if (queue.size() != model.m) throw InputError("queue vector has wrong dimension");
  return max_weight(queue, opts);
}

}  // namespace

Decision decide(const Policy& policy, const Model& model,
                std::span<const std::size_t> states, const RandSource& src,
                std::span<const double> queue) {
  check_history(model, states);
  const std::size_t s = states.back();
  const std::uint64_t k = states.size();
  return std::visit(
      Overloaded{
          [&](const DeterministicPolicy& p) { return Decision{p.psi[s], 0, false}; },
          [&](const MaxWeightPolicy&) {
            return Decision{max_weight_choice(model, s, queue), 0, false};
          },
          [&](const CustomPolicy& p) {
            if (k > p.max_depth()) return Decision{fallback_choice(model, s), 0, true};
            std::vector<std::size_t> levels;
            levels.reserve(k);
            for (std::uint64_t i = 1; i <= k; ++i)
              levels.push_back(level_of(slot_uniform(src, i), p.levels));
            return custom_lookup(p, model, states, std::move(levels));
          },
          [&](const auto&) {
            const auto& w = (*stationary_weights(policy))[s];
            const std::size_t i = draw_option(slot_uniform(src, k), w);
            return Decision{i, i, false};
          }},
      policy);
}

std::vector<Branch> branches(const Policy& policy, const Model& model,
                             std::span<const std::size_t> states,
                             std::span<const std::size_t> past_tokens,
                             std::span<const double> queue) {
  check_history(model, states);
  const std::size_t s = states.back();
  return std::visit(
      Overloaded{
          [&](const DeterministicPolicy& p) {
            return std::vector<Branch>{{1.0, {p.psi[s], 0, false}}};
          },
          [&](const MaxWeightPolicy&) {
            return std::vector<Branch>{{1.0, {max_weight_choice(model, s, queue), 0, false}}};
          },
          [&](const CustomPolicy& p) {
            if (states.size() > p.max_depth())
              return std::vector<Branch>{{1.0, {fallback_choice(model, s), 0, true}}};
            if (past_tokens.size() + 1 != states.size())
              throw InputError("custom policy branches need one token per past slot");
            std::vector<Branch> out;
            const double prob = 1.0 / static_cast<double>(p.levels);
            for (std::size_t l = 0; l < p.levels; ++l) {
              std::vector<std::size_t> levels(past_tokens.begin(), past_tokens.end());
              levels.push_back(l);
              out.push_back({prob, custom_lookup(p, model, states, std::move(levels))});
            }
            return out;
          },
          [&](const auto&) {
            const auto& w = (*stationary_weights(policy))[s];
            std::vector<Branch> out;
            for (std::size_t i = 0; i < w.size(); ++i)
              if (w[i] > 0.0) out.push_back({w[i], {i, i, false}});
            return out;
          }},
      policy);
}

Vec conditional_mean(const Policy& policy, const Model& model,
                     std::span<const std::size_t> past_states,
                     std::span<const std::size_t> past_tokens,
                     std::span<const double> queue) {
  Vec mean(model.m, 0.0);
  // Only custom policies within their table depth read the past states.
  const auto* custom = std::get_if<CustomPolicy>(&policy);
  const bool history = custom && past_states.size() < custom->max_depth();
  if (custom && !history) {
    for (std::size_t s = 0; s < model.states.size(); ++s)
      axpy(model.states[s].prob, model.option(s, fallback_choice(model, s)), mean);
    return mean;
  }
  std::vector<std::size_t> states;
  if (history) states.assign(past_states.begin(), past_states.end());
  states.push_back(0);
  for (std::size_t s = 0; s < model.states.size(); ++s) {
    const double ps = model.states[s].prob;
    if (ps <= 0.0) continue;
    states.back() = s;
    const auto tokens = history ? past_tokens : std::span<const std::size_t>{};
    for (const Branch& b : branches(policy, model, states, tokens, queue))
      axpy(ps * b.prob, model.states[s].options[b.decision.option], mean);
  }
  return mean;
}

Policy target_policy(const RateRegion& region, std::span<const double> x,
                     double tol) {
  return TargetPolicy{decompose(region, x, tol)};
}

}  // namespace oppsched
