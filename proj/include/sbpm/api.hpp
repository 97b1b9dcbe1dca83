#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sbpm/engine.hpp"
#include "sbpm/explore.hpp"
#include "sbpm/notation.hpp"
#include "sbpm/persistence.hpp"

// Operations and JSON shapes shared by the CLI and the HTTP service, so both
// front ends report byte-identical results for the same input.
namespace sbpm::api {

using json = nlohmann::ordered_json;

/// Structure, interface and (when a layout is present) notation conformance.
/// Warnings are included; has_errors() decides pass/fail.
std::vector<Violation> validate(const ModelDocument& doc,
                                const NotationDefinition& notation);

json to_json(const Violation& v);
json to_json(const std::vector<Violation>& vs);
json validation_json(const std::vector<Violation>& vs);

json to_json(const Move& m);
json to_json(const GlobalStateView& view);
json to_json(const ExplorationResult& r);

json to_json(const TraceEvent& e);
json run_json(const ProcessInstance& inst);

json to_json(const AnomalyReport& report, const std::vector<Lint>& lints);

json error_json(const std::string& code, const std::string& message,
                const std::string& details);

/// Reads {"max_states", "max_mailbox", "max_depth", "multiplicities",
/// "symmetry_reduction"}; absent keys keep their defaults. Throws BadRequest.
void read_exploration(const json& body, ExplorationBounds& bounds,
                      ExplorationOptions& options);

/// Reads {"policy": "round-robin"|"seeded-random", "seed", "max_steps",
/// "multiplicities"}. The default policy is seeded-random. Throws BadRequest.
SchedulerConfig read_scheduler(const json& body);

std::string_view to_string(SchedulingPolicy p);
std::optional<SchedulingPolicy> parse_policy(std::string_view text);

} // namespace sbpm::api
