#pragma once

#include <random>
#include <string>

#include "oppsched/model.hpp"

namespace oppsched::testing {

// C(s1) = {0, 1}, C(s2) = {0, 2}, lambda = (1/2, 1/2); region [0, 1.5].
inline Model two_state_model() {
  Model m;
  m.m = 1;
  m.states = {{"s1", 0.5, {{0.0}, {1.0}}, 0.0}, {"s2", 0.5, {{0.0}, {2.0}}, 1.0}};
  return m;
}

// One state with C = {(0,0), (1,0), (0,1)}; region is the 2-simplex.
inline Model simplex_model() {
  Model m;
  m.m = 2;
  m.states = {{"s", 1.0, {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, 0.0}};
  return m;
}

// Up to `max_states` states with random probabilities, up to `max_options`
// options each, m in [1, max_m], coordinates in [0, 1).
inline Model random_model(std::mt19937_64& rng, std::size_t max_states = 4,
                          std::size_t max_options = 4, std::size_t max_m = 3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Model model;
  model.m = 1 + rng() % max_m;
  const std::size_t ns = 1 + rng() % max_states;
  double total = 0.0;
  std::vector<double> w(ns);
  for (double& v : w) total += (v = 0.1 + u(rng));
  for (std::size_t s = 0; s < ns; ++s) {
    State st{"s" + std::to_string(s), w[s] / total, {}, static_cast<double>(s)};
    const std::size_t no = 1 + rng() % max_options;
    for (std::size_t i = 0; i < no; ++i) {
      Vec v(model.m);
      for (double& c : v) c = u(rng);
      st.options.push_back(v);
    }
    model.states.push_back(st);
  }
  // Renormalize exactly enough for validation.
  double sum = 0.0;
  for (const auto& st : model.states) sum += st.prob;
  model.states.back().prob += 1.0 - sum;
  return model;
}

}  // namespace oppsched::testing
