#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "relayplan/evaluation.hpp"
#include "relayplan/model.hpp"
#include "relayplan/validator.hpp"

namespace relayplan {

inline constexpr int kPlanSchemaVersion = 1;

/// Input that cannot be decoded into a plan or scenario.
class MalformedInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pretty-printed plan document with its violation list. Byte-stable for a
/// given plan.
std::string plan_to_json(const PlacementPlan& plan, const std::vector<Violation>& violations);
std::string plan_to_json(const PlacementPlan& plan);

/// Inverse of plan_to_json; recorded flows are kept as-is, not recomputed.
PlacementPlan plan_from_json(const std::string& text);

/// A scenario file either names a generator or lists demands explicitly.
/// Missing radio keys keep their defaults from `defaults`.
struct ScenarioInput {
    std::variant<ScenarioSpec, std::vector<Demand>> source;
    RadioConfig config;
};

ScenarioInput scenario_from_json(const std::string& text, const RadioConfig& defaults);

/// Writes via a temporary file in the same directory and a rename.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace relayplan
