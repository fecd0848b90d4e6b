#pragma once

// The opportunistic scheduling environment: i.i.d. states drawn from a
// finite distribution lambda, and a finite option list C(s) of rate vectors
// in R^m per state.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oppsched/vec.hpp"

namespace oppsched {

inline constexpr double kProbabilityTolerance = 1e-12;

struct State {
  std::string label;
  double prob = 0.0;
  std::vector<Vec> options;  // C(s)
  double value = 0.0;        // numeric state value, used by reward maps
};

// One option index per state: a deterministic selection psi(s) in C(s).
using ChoiceFn = std::vector<std::size_t>;

struct Model {
  std::size_t m = 1;
  std::vector<State> states;
  std::optional<double> bound;    // radius D of a ball containing every option
  std::optional<ChoiceFn> choice; // certified fallback psi, if not "first option"

  std::size_t state_count() const noexcept { return states.size(); }
  const Vec& option(std::size_t s, std::size_t i) const {
    return states.at(s).options.at(i);
  }
  std::vector<double> lambda() const;

  // The supplied bound, or the largest option norm.
  double effective_bound() const;
};

struct Violation {
  enum class Kind {
    NoStates,
    EmptyOptions,        // Assumption 1: C(s) must be nonempty
    OutsideBound,        // Assumption 3: C(s) inside the ball of radius D
    DimensionMismatch,
    NonFinite,
    NegativeProbability,
    Normalization,
    InvalidChoice,
  };
  Kind kind;
  std::optional<std::size_t> state;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  ChoiceFn psi;       // certified choice function (valid only when ok())
  double bound = 0.0; // effective D

  bool ok() const noexcept { return violations.empty(); }
  std::string summary() const;
};

ValidationReport validate(const Model& model);

// Throws InputError carrying the report summary unless the model is valid.
void require_valid(const Model& model);

// A finite state space, or [0,1] quantized into q equal bins whose
// representative states are the bin midpoints.
struct StateSpace {
  std::vector<std::string> labels;
  std::vector<double> lambda;
  std::vector<double> values;

  static StateSpace finite(std::vector<std::string> labels,
                           std::vector<double> lambda,
                           std::vector<double> values = {});
  static StateSpace unit_interval(std::vector<double> bin_probs);
};

// Builds a model whose option lists come from `options(state index)`.
Model build_model(const StateSpace& states, std::size_t m,
                  const std::function<std::vector<Vec>(std::size_t)>& options);

// Rewards R = f(s, p) for resource vectors p in a finite set Omega_P.
struct ResourceSpec {
  std::vector<Vec> power_vectors;  // Omega_P, each of dimension a
  std::size_t reward_dim = 0;      // b
  std::function<Vec(std::size_t state, std::size_t power)> reward;
};

// C(s) = {(p, f(s,p)) : p in Omega_P} in R^{a+b}. The choice function picks
// the zero resource vector when Omega_P contains it, else the first one.
Model from_resources(const ResourceSpec& spec, const StateSpace& states);

// Inverse-CDF sampling of lambda: the first positive-probability state whose
// cumulative probability is >= u, so boundary values go to the lower index.
std::size_t sample_state(const Model& model, double u);

}  // namespace oppsched
