#include "oppsched/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "oppsched/error.hpp"

namespace oppsched::io {

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
  throw InputError("field '" + field + "': " + what);
}

const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(path, "expected a finite number");
  return v;
}

std::size_t index(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    schema_error(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  return j;
}

Vec vec(const json& j, const std::string& path) {
  Vec out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i)
    out.push_back(number(j[i], index_path(path, i)));
  return out;
}

std::vector<std::size_t> indices(const json& j, const std::string& path) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i)
    out.push_back(index(j[i], index_path(path, i)));
  return out;
}

std::vector<Vec> vec_list(const json& j, const std::string& path) {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i)
    out.push_back(vec(j[i], index_path(path, i)));
  return out;
}

std::string label(const json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return format_double(j.get<double>());
  schema_error(path, "expected a string label");
}

// Reports the violated field for validation failures detected after parsing.
void check_parsed(const Model& model) {
  const ValidationReport report = validate(model);
  if (report.ok()) return;
  const Violation& v = report.violations.front();
  std::string field = "states";
  if (v.state) field = index_path("states", *v.state);
  switch (v.kind) {
    case Violation::Kind::Normalization:
    case Violation::Kind::NegativeProbability:
      field = v.state ? join_path(field, "prob") : "states[*].prob";
      break;
    case Violation::Kind::EmptyOptions:
    case Violation::Kind::DimensionMismatch:
    case Violation::Kind::NonFinite:
      field = v.state ? join_path(field, "options") : "m";
      break;
    case Violation::Kind::OutsideBound:
      field = "bound";
      break;
    case Violation::Kind::InvalidChoice:
      field = "choice";
      break;
    case Violation::Kind::NoStates:
      break;
  }
  schema_error(field, report.summary());
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

Model model_from_json(const json& j) {
  if (!j.is_object()) schema_error("<root>", "expected an object");
  const json& states = member(j, "states", "");
  array(states, "states");
  if (states.empty()) schema_error("states", "must be nonempty");

  std::vector<std::string> labels;
  std::vector<double> probs;
  std::vector<double> values;
  for (std::size_t s = 0; s < states.size(); ++s) {
    const std::string path = index_path("states", s);
    const json& st = states[s];
    labels.push_back(st.contains("label") ? label(st["label"], join_path(path, "label"))
                                          : std::to_string(s));
    probs.push_back(number(member(st, "prob", path), join_path(path, "prob")));
    values.push_back(st.contains("value") ? number(st["value"], join_path(path, "value"))
                                          : static_cast<double>(s));
  }
  const StateSpace space = StateSpace::finite(labels, probs, values);

  Model model;
  if (j.contains("reward_table") || j.contains("power_vectors")) {
    ResourceSpec spec;
    spec.power_vectors = vec_list(member(j, "power_vectors", ""), "power_vectors");
    if (spec.power_vectors.empty()) schema_error("power_vectors", "must be nonempty");
    const json& table = member(j, "reward_table", "");
    if (!table.is_object()) schema_error("reward_table", "expected an object keyed by state label");
    std::vector<std::vector<Vec>> rewards;
    for (std::size_t s = 0; s < labels.size(); ++s) {
      const std::string path = join_path("reward_table", labels[s]);
      auto it = table.find(labels[s]);
      if (it == table.end()) schema_error(path, "missing");
      rewards.push_back(vec_list(*it, path));
      if (rewards.back().size() != spec.power_vectors.size())
        schema_error(path, "needs one reward vector per power vector");
    }
    spec.reward_dim = rewards[0].empty() ? 0 : rewards[0][0].size();
    spec.reward = [rewards](std::size_t s, std::size_t p) { return rewards[s][p]; };
    try {
      model = from_resources(spec, space);
    } catch (const InputError& e) {
      schema_error("reward_table", e.what());
    }
  } else {
    const json& mj = member(j, "m", "");
    model.m = index(mj, "m");
    for (std::size_t s = 0; s < states.size(); ++s) {
      const std::string path = index_path("states", s);
      model.states.push_back({labels[s], probs[s],
                              vec_list(member(states[s], "options", path),
                                       join_path(path, "options")),
                              values[s]});
    }
    if (j.contains("choice")) model.choice = indices(j["choice"], "choice");
  }
  if (j.contains("bound") && !j["bound"].is_null()) model.bound = number(j["bound"], "bound");
  check_parsed(model);
  return model;
}

ArrivalProcess arrival_process_from_json(const json& j) {
  const std::string kind = member(j, "kind", "arrivals").get<std::string>();
  ArrivalProcess out;
  if (kind == "deterministic") {
    out = DeterministicArrivals{vec(member(j, "rate", "arrivals"), "arrivals.rate")};
  } else if (kind == "bernoulli") {
    out = BernoulliArrivals{vec(member(j, "prob", "arrivals"), "arrivals.prob"),
                            vec(member(j, "batch", "arrivals"), "arrivals.batch")};
  } else {
    schema_error("arrivals.kind", "unknown kind '" + kind + "'");
  }
  try {
    check_arrivals(out);
  } catch (const InputError& e) {
    schema_error("arrivals", e.what());
  }
  return out;
}

std::optional<ArrivalProcess> arrivals_from_json(const json& model_doc) {
  if (!model_doc.is_object() || !model_doc.contains("arrivals") ||
      model_doc["arrivals"].is_null())
    return std::nullopt;
  return arrival_process_from_json(model_doc["arrivals"]);
}

Policy policy_from_json(const json& j, const RateRegion& region) {
  const Model& model = region.model();
  const json& kind_j = member(j, "kind", "policy");
  if (!kind_j.is_string()) schema_error("policy.kind", "expected a string");
  const std::string kind = kind_j.get<std::string>();

  auto state_index = [&](const json& e, const std::string& path) -> std::size_t {
    if (e.is_string()) {
      for (std::size_t s = 0; s < model.states.size(); ++s)
        if (model.states[s].label == e.get<std::string>()) return s;
      schema_error(path, "unknown state label");
    }
    return index(e, path);
  };

  Policy policy;
  if (kind == "deterministic") {
    ChoiceFn psi = j.contains("choice") ? indices(j["choice"], "policy.choice")
                                        : validate(model).psi;
    policy = DeterministicPolicy{std::move(psi)};
  } else if (kind == "randomized") {
    const json& w = member(j, "weights", "policy");
    std::vector<std::vector<double>> weights;
    for (std::size_t s = 0; s < array(w, "policy.weights").size(); ++s)
      weights.push_back(vec(w[s], index_path("policy.weights", s)));
    policy = RandomizedStationaryPolicy{std::move(weights)};
  } else if (kind == "target") {
    const Vec x = vec(member(j, "x", "policy"), "policy.x");
    if (x.size() != model.m) schema_error("policy.x", "has the wrong dimension");
    const double tol = j.contains("tol") ? number(j["tol"], "policy.tol") : kDefaultTol;
    policy = target_policy(region, x, tol);
  } else if (kind == "maxweight") {
    policy = MaxWeightPolicy{};
  } else if (kind == "custom") {
    CustomPolicy c;
    c.levels = j.contains("levels") ? index(j["levels"], "policy.levels") : 1;
    const json& entries = member(j, "entries", "policy");
    for (std::size_t e = 0; e < array(entries, "policy.entries").size(); ++e) {
      const std::string path = index_path("policy.entries", e);
      const json& ej = entries[e];
      CustomPolicy::Key key;
      const json& sj = array(member(ej, "states", path), join_path(path, "states"));
      for (std::size_t i = 0; i < sj.size(); ++i)
        key.states.push_back(state_index(sj[i], index_path(join_path(path, "states"), i)));
      key.levels = ej.contains("levels")
                       ? indices(ej["levels"], join_path(path, "levels"))
                       : std::vector<std::size_t>(key.states.size(), 0);
      c.table[std::move(key)] = index(member(ej, "option", path), join_path(path, "option"));
    }
    policy = std::move(c);
  } else {
    schema_error("policy.kind", "unknown kind '" + kind + "'");
  }
  try {
    check_policy(policy, model);
  } catch (const InputError& e) {
    schema_error("policy", e.what());
  }
  return policy;
}

json to_json(const geometry::HalfSpace& h) { return {{"a", h.a}, {"b", h.b}}; }

json to_json(const TargetDecomposition& d) {
  return {{"target", d.target}, {"weights", d.weights}, {"residual", d.residual}};
}

json to_json(const MembershipResult& r) {
  json j = {{"member", r.member}, {"dist", r.dist}, {"nearest", r.nearest}};
  if (r.certificate) j["certificate"] = to_json(*r.certificate);
  return j;
}

json to_json(const MeanMembershipReport& r) {
  return {{"slot", r.slot},
          {"replications", r.replications},
          {"estimate", r.estimate},
          {"average_estimate", r.average_estimate},
          {"dist", r.dist},
          {"average_dist", r.average_dist},
          {"margin", r.margin},
          {"statistical", r.statistical},
          {"pass", r.pass}};
}

json to_json(const ConvergenceReport& r) {
  json cps = json::array();
  for (std::size_t i = 0; i < r.checkpoints.size(); ++i)
    cps.push_back({{"k", r.checkpoints[i].k},
                   {"dist", r.checkpoints[i].dist},
                   {"bound", r.bounds[i]},
                   {"tail_max", r.tail_maxima[i]}});
  json j = {{"horizon", r.horizon},     {"burn_in", r.burn_in},
            {"checkpoints", cps},       {"final_dist", r.final_dist},
            {"final_bound", r.final_bound}, {"final_ok", r.final_ok},
            {"envelope_ok", r.envelope_ok}, {"pass", r.pass}};
  j["status"] = r.insufficient_horizon ? "insufficient horizon" : (r.pass ? "pass" : "fail");
  return j;
}

json to_json(const ConditionalReport& r) {
  json classes = json::array();
  for (const auto& c : r.classes)
    classes.push_back({{"prefix", c.prefix},
                       {"prob", c.prob},
                       {"mean", c.mean},
                       {"state_marginal", c.state_marginal},
                       {"witness_residual", c.witness_residual},
                       {"projection_dist", c.projection_dist},
                       {"member", c.member}});
  return {{"slot", r.slot},
          {"paths", r.paths},
          {"classes", classes},
          {"max_violation", r.max_violation},
          {"pass", r.pass}};
}

json to_json(const StabilityReport& r) {
  return {{"horizon", r.horizon},
          {"time_avg_backlog", r.time_avg_backlog},
          {"tail_avg_backlog", r.tail_avg_backlog},
          {"drift_slope", r.drift_slope},
          {"slope_threshold", kStabilitySlopeThreshold},
          {"stable", r.stable},
          {"final_queue", r.final_queue}};
}

FactorSpec factor_spec_from_json(const json& j) {
  FactorSpec spec;
  spec.space = sigma::FiniteSpace(index(member(j, "n", ""), "n"));
  const json& parts = array(member(j, "partitions", ""), "partitions");
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const std::string path = index_path("partitions", p);
    std::vector<sigma::IndexSet> sets;
    const bool blocks = parts[p].contains("blocks");
    const json& lists = blocks ? parts[p]["blocks"] : member(parts[p], "generators", path);
    const std::string lpath = join_path(path, blocks ? "blocks" : "generators");
    for (std::size_t i = 0; i < array(lists, lpath).size(); ++i)
      sets.push_back(indices(lists[i], index_path(lpath, i)));
    try {
      spec.partitions.push_back(blocks ? sigma::Partition(spec.space, std::move(sets))
                                       : sigma::generate(spec.space, sets));
    } catch (const InputError& e) {
      schema_error(lpath, e.what());
    }
  }
  const json& rvs = array(member(j, "rvs", ""), "rvs");
  for (std::size_t k = 0; k < rvs.size(); ++k) {
    try {
      spec.rvs.emplace_back(spec.space, vec(rvs[k], index_path("rvs", k)));
    } catch (const InputError& e) {
      schema_error(index_path("rvs", k), e.what());
    }
  }
  const json& deps = array(member(j, "deps", ""), "deps");
  for (std::size_t k = 0; k < deps.size(); ++k)
    spec.deps.push_back(indices(deps[k], index_path("deps", k)));
  return spec;
}

json to_json(const sigma::Factorization& f) {
  json ys = json::array();
  for (const auto& y : f.ys) ys.push_back(y.values);
  json tables = json::array();
  for (const auto& t : f.tables) {
    json entries = json::array();
    for (const auto& [blocks, value] : t.table)
      entries.push_back({{"blocks", blocks}, {"value", value}});
    tables.push_back({{"inputs", t.inputs}, {"entries", entries}});
  }
  return {{"ys", ys}, {"block_counts", f.counts}, {"tables", tables}};
}

void write_trace_csv(std::ostream& out, const Trace& trace, const Model& model) {
  const std::size_t m = trace.m;
  const bool queues = !trace.queue.empty();
  out << "k,state_label,option_index";
  for (std::size_t i = 0; i < m; ++i) out << ",x" << i;
  for (std::size_t i = 0; i < m; ++i) out << ",avg" << i;
  out << ",dist_checkpoint";
  if (queues)
    for (std::size_t i = 0; i < m; ++i) out << ",q" << i;
  out << '\n';

  std::map<std::size_t, double> dists;
  for (const auto& c : trace.checkpoints) dists[c.k] = c.dist;

  auto quoted = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };

  for (std::size_t k = 1; k <= trace.horizon(); ++k) {
    const SlotRecord& r = trace.slots[k - 1];
    out << k << ',' << quoted(model.states[r.state].label) << ',' << r.decision.option;
    for (double v : trace.x_at(k)) out << ',' << format_double(v);
    for (double v : trace.avg_at(k)) out << ',' << format_double(v);
    out << ',';
    if (auto it = dists.find(k); it != dists.end()) out << format_double(it->second);
    if (queues)
      for (double v : trace.queue_at(k)) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace oppsched::io
