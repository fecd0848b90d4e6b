// oppsched: rate regions, policy simulation, queue stability, and factor
// tables from JSON configs.
//
// Exit codes: 0 pass, 1 verification failure, 2 input error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oppsched/error.hpp"
#include "oppsched/geometry.hpp"
#include "oppsched/io.hpp"
#include "oppsched/model.hpp"
#include "oppsched/policy.hpp"
#include "oppsched/queueing.hpp"
#include "oppsched/region.hpp"
#include "oppsched/sigma.hpp"
#include "oppsched/sim.hpp"

namespace {

using namespace oppsched;
using io::json;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInput = 2;

// Enumerated generators are listed only up to this many deterministic policies.
constexpr std::size_t kListGeneratorCap = 4096;

struct Options {
  std::string model;
  std::string policy;
  std::string arrivals;
  std::string spec;
  std::size_t horizon = 100000;
  std::uint64_t seed = 1;
  std::vector<std::size_t> checkpoints;
  double tol = kDefaultTol;
  std::string out;
  std::string report;
  std::size_t replications = 0;
  std::size_t slot = 4;
  std::size_t dirs = 64;
};

// A flag value is inline JSON when it starts with '{', a path otherwise.
json json_arg(const std::string& value) {
  const auto first = value.find_first_not_of(" \t\n");
  if (first != std::string::npos && value[first] == '{') {
    try {
      return json::parse(value);
    } catch (const json::parse_error& e) {
      throw InputError(std::string("inline JSON does not parse: ") + e.what());
    }
  }
  return io::read_json_file(value);
}

void emit(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

std::vector<Vec> random_directions(std::size_t m, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Vec> out;
  while (out.size() < count) {
    Vec d(m);
    for (double& v : d) v = normal(rng);
    const double n = norm(d);
    if (n > 1e-12) out.push_back(scaled(d, 1.0 / n));
  }
  return out;
}

std::string config_hash(const json& model_doc, const json& extra, const Options& o) {
  json cfg = {{"model", model_doc},
              {"extra", extra},
              {"horizon", o.horizon},
              {"seed", o.seed},
              {"checkpoints", o.checkpoints},
              {"tol", io::format_double(o.tol)}};
  return io::hex64(io::fnv1a64(cfg.dump()));
}

void check_common(const Options& o) {
  if (o.horizon < 1) throw InputError("field 'horizon': must be >= 1");
  if (!(o.tol > 0.0)) throw InputError("field 'tol': must be > 0");
}

int cmd_region(const Options& o) {
  const json doc = io::read_json_file(o.model);
  const RateRegion region(io::model_from_json(doc));
  const std::size_t m = region.dim();

  json out;
  out["dim"] = m;
  out["bound"] = region.bound();
  if (region.deterministic_policy_count() <= kListGeneratorCap) {
    const auto gens = enumerate_generators(region, kListGeneratorCap);
    out["generators"] = gens;
    if (m <= 2) out["hull"] = geometry::hull_generators(gens);
  }

  const auto dirs = random_directions(m, o.dirs, o.seed);
  json samples = json::array();
  for (const auto& d : dirs)
    samples.push_back({{"direction", d}, {"value", geometry::support(region.body(), d)}});
  out["support_samples"] = samples;

  json halfspaces = json::array();
  for (const auto& h : geometry::outer_halfspaces(region.body(), dirs))
    halfspaces.push_back(io::to_json(h));
  out["halfspaces"] = halfspaces;
  emit(out, o.out);
  return kPass;
}

int cmd_simulate(const Options& o) {
  check_common(o);
  const json doc = io::read_json_file(o.model);
  const Model model = io::model_from_json(doc);
  const RateRegion region(model);
  const json policy_doc = o.policy.empty() ? json{{"kind", "deterministic"}} : json_arg(o.policy);
  const Policy policy = io::policy_from_json(policy_doc, region);

  RunOptions ro;
  ro.arrivals = io::arrivals_from_json(doc);
  ro.region = &region;
  ro.checkpoints = o.checkpoints;
  ro.tol = o.tol;
  for (std::size_t c : o.checkpoints)
    if (c < 1 || c > o.horizon) throw InputError("field 'checkpoints': must lie in [1, horizon]");

  const Trace trace = run(model, policy, o.horizon, o.seed, ro);
  if (!o.out.empty()) {
    std::ofstream csv(o.out);
    if (!csv) throw InputError("cannot write '" + o.out + "'");
    io::write_trace_csv(csv, trace, model);
  }

  const ConvergenceReport conv = verify_avg_convergence(trace, region, o.checkpoints, o.tol);
  std::vector<std::string> failures;
  if (!conv.insufficient_horizon) {
    if (!conv.final_ok) failures.push_back("final_dist");
    if (!conv.envelope_ok) failures.push_back("checkpoint_envelope");
  }

  json report;
  report["seed"] = o.seed;
  report["config_hash"] = config_hash(doc, policy_doc, o);
  report["policy"] = kind_name(policy);
  report["horizon"] = o.horizon;
  report["final_average"] = trace.final_average();
  report["convergence"] = io::to_json(conv);
  report["martingale_norm"] = trace.martingale.normalized_norm();
  report["fallback_slots"] = std::count_if(trace.slots.begin(), trace.slots.end(),
                                           [](const auto& r) { return r.decision.fallback; });

  if (const auto* t = std::get_if<TargetPolicy>(&policy)) {
    const Vec& x = t->decomposition.target;
    const double err = distance(trace.final_average(), x);
    const double bound =
        three_sigma_margin(region.bound(), o.horizon) + t->decomposition.residual;
    const bool ok = conv.insufficient_horizon || err <= bound;
    report["target"] = {{"x", x},
                        {"error", err},
                        {"bound", bound},
                        {"decomposition", io::to_json(t->decomposition)},
                        {"pass", ok}};
    if (!ok) failures.push_back("target_error");
  }

  if (o.replications > 0) {
    const std::size_t slot = std::min(o.slot, o.horizon);
    const auto mm = verify_mean_membership(model, policy, o.replications, slot, region,
                                           o.seed, ro, o.tol);
    report["mean_membership"] = io::to_json(mm);
    if (!mm.pass) failures.push_back("mean_membership");
  }

  report["failures"] = failures;
  report["pass"] = failures.empty();
  emit(report, o.report);
  if (!failures.empty()) {
    std::cerr << "verification failed:";
    for (const auto& f : failures) std::cerr << ' ' << f;
    std::cerr << '\n';
    return kFail;
  }
  return kPass;
}

int cmd_queue(const Options& o) {
  check_common(o);
  const json doc = io::read_json_file(o.model);
  const RateRegion region(io::model_from_json(doc));
  std::optional<ArrivalProcess> arrivals =
      o.arrivals.empty() ? io::arrivals_from_json(doc)
                         : std::optional(io::arrival_process_from_json(json_arg(o.arrivals)));
  if (!arrivals) throw InputError("field 'arrivals': missing (model member or --arrivals)");
  if (arrival_dim(*arrivals) != region.dim())
    throw InputError("field 'arrivals': dimension differs from the model");

  const Vec a = mean_rate(*arrivals);
  const DominanceResult dom = dominance(region, a, o.tol);
  const double margin = capacity_margin(region, a, 2048, o.tol);
  const StabilityReport st = run_maxweight(region.model(), *arrivals, o.horizon, o.seed);
  const bool agree = st.stable == dom.dominated;
  const bool decisive = std::abs(margin) >= 0.05;

  json report;
  report["seed"] = o.seed;
  report["config_hash"] = config_hash(doc, o.arrivals.empty() ? json() : json_arg(o.arrivals), o);
  report["arrival_rate"] = a;
  report["dominance"] = dom.dominated;
  report["dominance_point"] = dom.point;
  report["margin"] = margin;
  report["stable"] = st.stable;
  report["slope"] = st.drift_slope;
  report["stability"] = io::to_json(st);
  report["agree"] = agree;
  report["pass"] = agree || !decisive;
  emit(report, o.out);
  if (!agree && decisive) {
    std::cerr << "verification failed: stability verdict disagrees with dominance (margin "
              << margin << ")\n";
    return kFail;
  }
  return kPass;
}

int cmd_factor(const Options& o) {
  const io::FactorSpec spec = io::factor_spec_from_json(io::read_json_file(o.spec));
  try {
    const auto f = sigma::factorize(spec.rvs, spec.partitions, spec.deps);
    json out = io::to_json(f);
    out["measurable"] = true;
    emit(out, o.out);
    return kPass;
  } catch (const sigma::MeasurabilityError& e) {
    const auto [p, q] = e.witness();
    emit({{"measurable", false}, {"rv", e.rv_index()}, {"witness", {p, q}}, {"message", e.what()}},
         o.out);
    std::cerr << "verification failed: " << e.what() << '\n';
    return kFail;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Opportunistic scheduling: rate regions, policies, verification"};
  app.require_subcommand(1);
  Options o;

  auto* region = app.add_subcommand("region", "Rate region generators, support samples, half-spaces");
  region->add_option("--model", o.model, "Model JSON")->required();
  region->add_option("--dirs", o.dirs, "Number of random support directions");
  region->add_option("--seed", o.seed, "Direction sampling seed");
  region->add_option("--out", o.out, "Output JSON (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Run a policy and verify its time averages");
  simulate->add_option("--model", o.model, "Model JSON")->required();
  simulate->add_option("--policy", o.policy, "Policy JSON file or inline object");
  simulate->add_option("--horizon", o.horizon, "Number of slots K");
  simulate->add_option("--seed", o.seed, "Decimal 64-bit seed");
  simulate->add_option("--checkpoints", o.checkpoints, "Checkpoint slots")->delimiter(',');
  simulate->add_option("--tol", o.tol, "Solver tolerance");
  simulate->add_option("--out", o.out, "Trace CSV path");
  simulate->add_option("--report", o.report, "Report JSON path (default stdout)");
  simulate->add_option("--replications", o.replications, "Monte Carlo replications for E[X_k]");
  simulate->add_option("--slot", o.slot, "Slot k for the Monte Carlo mean check");

  auto* queue = app.add_subcommand("queue", "Max-weight stability against dominance");
  queue->add_option("--model", o.model, "Model JSON")->required();
  queue->add_option("--arrivals", o.arrivals, "Arrival JSON file or inline object");
  queue->add_option("--horizon", o.horizon, "Number of slots K (>= 1000)");
  queue->add_option("--seed", o.seed, "Decimal 64-bit seed");
  queue->add_option("--tol", o.tol, "Solver tolerance");
  queue->add_option("--out", o.out, "Output JSON (default stdout)");

  auto* factor = app.add_subcommand("factor", "Factor tables over a shared Y family");
  factor->add_option("--spec", o.spec, "Factor spec JSON")->required();
  factor->add_option("--out", o.out, "Output JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kInput;
  }

  try {
    if (*region) return cmd_region(o);
    if (*simulate) return cmd_simulate(o);
    if (*queue) return cmd_queue(o);
    if (*factor) return cmd_factor(o);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const NotInRegionError& e) {
    std::cerr << "input error: target outside the rate region (dist " << e.dist() << ")\n";
    return kInput;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const CapacityError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const ConvergenceError& e) {
    std::cerr << "solver failed: " << e.what() << '\n';
    return kFail;
  }
  return kInput;
}
