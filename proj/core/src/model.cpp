#include "oppsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "oppsched/error.hpp"

namespace oppsched {

std::vector<double> Model::lambda() const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.prob);
  return out;
}

double Model::effective_bound() const {
  if (bound) return *bound;
  double d = 0.0;
  for (const auto& s : states)
    for (const auto& v : s.options) d = std::max(d, norm(v));
  return d;
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.message;
  }
  return out;
}

ValidationReport validate(const Model& model) {
  using Kind = Violation::Kind;
  ValidationReport report;
  auto fail = [&](Kind kind, std::optional<std::size_t> s, std::string msg) {
    report.violations.push_back({kind, s, std::move(msg)});
  };
  auto name = [&](std::size_t s) {
    return "state '" + model.states[s].label + "'";
  };

  if (model.m == 0) fail(Kind::DimensionMismatch, std::nullopt, "m must be >= 1");
  if (model.states.empty()) fail(Kind::NoStates, std::nullopt, "model has no states");

  double total = 0.0;
  for (std::size_t s = 0; s < model.states.size(); ++s) {
    const State& st = model.states[s];
    if (!std::isfinite(st.prob) || st.prob < 0.0)
      fail(Kind::NegativeProbability, s, name(s) + " has invalid probability");
    total += st.prob;
    if (st.options.empty())
      fail(Kind::EmptyOptions, s,
           "Assumption 1 violated: " + name(s) + " has an empty option list");
    for (const auto& v : st.options) {
      if (v.size() != model.m) {
        fail(Kind::DimensionMismatch, s,
             name(s) + " has an option of dimension " +
                 std::to_string(v.size()) + ", expected " +
                 std::to_string(model.m));
      } else if (!all_finite(v)) {
        fail(Kind::NonFinite, s, name(s) + " has a non-finite option");
      }
    }
  }
  if (!model.states.empty() && std::abs(total - 1.0) > kProbabilityTolerance) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", total);
    fail(Kind::Normalization, std::nullopt,
         std::string("state probabilities sum to ") + buf + ", not 1");
  }

  if (model.bound) {
    const double d = *model.bound;
    if (!std::isfinite(d) || d < 0.0) {
      fail(Kind::OutsideBound, std::nullopt, "bound must be finite and >= 0");
    } else {
      for (std::size_t s = 0; s < model.states.size(); ++s)
        for (const auto& v : model.states[s].options)
          if (v.size() == model.m && norm(v) > d * (1.0 + 1e-12))
            fail(Kind::OutsideBound, s,
                 "Assumption 3 violated: " + name(s) +
                     " has an option outside the ball of radius bound");
    }
  }
  report.bound = model.effective_bound();

  if (model.choice) {
    const ChoiceFn& psi = *model.choice;
    if (psi.size() != model.states.size()) {
      fail(Kind::InvalidChoice, std::nullopt,
           "choice function must name one option per state");
    } else {
      for (std::size_t s = 0; s < psi.size(); ++s)
        if (psi[s] >= model.states[s].options.size())
          fail(Kind::InvalidChoice, s, "choice function for " + name(s) +
                                           " indexes past its option list");
    }
    report.psi = psi;
  } else {
    report.psi.assign(model.states.size(), 0);
  }
  return report;
}

void require_valid(const Model& model) {
  const ValidationReport report = validate(model);
  if (!report.ok()) throw InputError("invalid model: " + report.summary());
}

StateSpace StateSpace::finite(std::vector<std::string> labels,
                              std::vector<double> lambda,
                              std::vector<double> values) {
  if (labels.size() != lambda.size())
    throw InputError("state space needs one probability per label");
  if (values.empty()) {
    values.resize(labels.size());
    for (std::size_t i = 0; i < values.size(); ++i)
      values[i] = static_cast<double>(i);
  }
  if (values.size() != labels.size())
    throw InputError("state space needs one value per label");
  return {std::move(labels), std::move(lambda), std::move(values)};
}

StateSpace StateSpace::unit_interval(std::vector<double> bin_probs) {
  const std::size_t q = bin_probs.size();
  if (q == 0) throw InputError("unit-interval quantization needs q >= 1 bins");
  StateSpace out;
  out.lambda = std::move(bin_probs);
  for (std::size_t i = 0; i < q; ++i) {
    const double mid = (static_cast<double>(i) + 0.5) / static_cast<double>(q);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", mid);
    out.labels.emplace_back(buf);
    out.values.push_back(mid);
  }
  return out;
}

Model build_model(const StateSpace& states, std::size_t m,
                  const std::function<std::vector<Vec>(std::size_t)>& options) {
  Model model;
  model.m = m;
  for (std::size_t s = 0; s < states.labels.size(); ++s) {
    model.states.push_back(
        {states.labels[s], states.lambda.at(s), options(s), states.values.at(s)});
  }
  return model;
}

Model from_resources(const ResourceSpec& spec, const StateSpace& states) {
  if (spec.power_vectors.empty())
    throw InputError("resource spec needs at least one power vector");
  if (!spec.reward) throw InputError("resource spec needs a reward map");
  const std::size_t a = spec.power_vectors[0].size();
  for (const auto& p : spec.power_vectors)
    if (p.size() != a) throw InputError("power vectors of mixed dimension");

  Model model = build_model(states, a + spec.reward_dim, [&](std::size_t s) {
    std::vector<Vec> opts;
    for (std::size_t i = 0; i < spec.power_vectors.size(); ++i) {
      Vec r = spec.reward(s, i);
      if (r.size() != spec.reward_dim)
        throw InputError("reward map returned a vector of dimension " +
                         std::to_string(r.size()));
      Vec v = spec.power_vectors[i];
      v.insert(v.end(), r.begin(), r.end());
      opts.push_back(std::move(v));
    }
    return opts;
  });

  std::size_t zero = 0;
  for (std::size_t i = 0; i < spec.power_vectors.size(); ++i) {
    const auto& p = spec.power_vectors[i];
    if (std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; })) {
      zero = i;
      break;
    }
  }
  model.choice = ChoiceFn(model.states.size(), zero);
  return model;
}

std::size_t sample_state(const Model& model, double u) {
  if (model.states.empty()) throw InputError("cannot sample from an empty model");
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t s = 0; s < model.states.size(); ++s) {
    const double p = model.states[s].prob;
    if (p <= 0.0) continue;
    cumulative += p;
    last_positive = s;
    if (u <= cumulative) return s;
  }
  return last_positive;
}

}  // namespace oppsched
