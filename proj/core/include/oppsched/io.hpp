#pragma once

// JSON and CSV surfaces: model, policy, arrival, and factor-spec schemas;
// trace CSV; report serialization.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "oppsched/model.hpp"
#include "oppsched/policy.hpp"
#include "oppsched/queueing.hpp"
#include "oppsched/region.hpp"
#include "oppsched/sigma.hpp"
#include "oppsched/sim.hpp"

namespace oppsched::io {

using nlohmann::json;

// Parses a file as JSON; InputError naming the path on failure.
json read_json_file(const std::filesystem::path& path);

// Explicit form {"m", "states": [{"label", "prob", "options", "value"?}],
// "bound"?, "choice"?} or resource form {"power_vectors", "states":
// [{"label", "prob", "value"?}], "reward_table": {label: [[...], ...]}}.
// Schema violations raise InputError naming the offending field.
Model model_from_json(const json& j);

// The optional "arrivals" member of a model document:
// {"kind": "deterministic", "rate": [...]} or
// {"kind": "bernoulli", "prob": [...], "batch": [...]}.
std::optional<ArrivalProcess> arrivals_from_json(const json& model_doc);
ArrivalProcess arrival_process_from_json(const json& j);

// {"kind": "deterministic"|"randomized"|"target"|"maxweight"|"custom", ...}.
// Target policies are decomposed against `region`.
Policy policy_from_json(const json& j, const RateRegion& region);

json to_json(const TargetDecomposition& d);
json to_json(const MembershipResult& r);
json to_json(const MeanMembershipReport& r);
json to_json(const ConvergenceReport& r);
json to_json(const ConditionalReport& r);
json to_json(const StabilityReport& r);
json to_json(const geometry::HalfSpace& h);

// Factor spec {"n", "partitions": [{"blocks": [...]} | {"generators": [...]}],
// "rvs": [[...]], "deps": [[...]]} (indices 0-based).
struct FactorSpec {
  sigma::FiniteSpace space{1};
  std::vector<sigma::Partition> partitions;
  std::vector<sigma::FiniteRV> rvs;
  std::vector<sigma::IndexSet> deps;
};

FactorSpec factor_spec_from_json(const json& j);
json to_json(const sigma::Factorization& f);

// Columns: k, state_label, option_index, x_i..., avg_i..., dist_checkpoint,
// then q_i... when the trace carries queues. Doubles use %.17g so the output
// is a deterministic function of the trace.
void write_trace_csv(std::ostream& out, const Trace& trace, const Model& model);

std::string format_double(double v);
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace oppsched::io
