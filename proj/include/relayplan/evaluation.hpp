#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "relayplan/merge.hpp"
#include "relayplan/model.hpp"

namespace relayplan {

/// aggregation: many sources, one shared destination.
/// definite: independent pairs with known requirements.
/// unknown: same pairs, requirements withheld from the planner.
enum class ScenarioKind { Aggregation, Definite, Unknown };

std::string to_string(ScenarioKind kind);
/// Accepts the names above or the scenario numbers 1, 2, 3.
ScenarioKind parse_kind(const std::string& name);
int scenario_number(ScenarioKind kind);

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::Definite;
    double area = 200.0;
    int m = 10;
    double flow_low = 0.04;
    double flow_high = 0.4;
    std::uint64_t seed = 1;
    RadioConfig config;

    void validate() const;
};

/// Requirement range used by the experiments for each kind.
std::pair<double, double> default_flow_range(ScenarioKind kind);

/// Raised when positions with 2R separation cannot be drawn.
class ScenarioInfeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Uniform doubles in [0, 1) from mt19937_64 using the top 53 bits, so a
/// seed gives the same stream on every platform.
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed);
    double next();
    double next(double lo, double hi) { return lo + (hi - lo) * next(); }

private:
    std::mt19937_64 engine_;
};

/// Demands "d1".."dm". Every demand carries its drawn requirement, also for
/// kind unknown; the pipeline is what hides it from the planner.
std::vector<Demand> gen_scenario(const ScenarioSpec& spec);

double satisfied_rate(double required, double achieved);
double average_satisfied_rate(std::span<const double> rates);

struct PipelineOptions {
    bool merge = true;
    // Requirements above the planned flow are lowered to it instead of failing.
    bool best_effort = true;
};

struct PipelineResult {
    PlacementPlan plan;
    std::size_t baseline_relays = 0;  // after mpm, before pruning and merging
    double baseline_length = 0.0;
    MergeStats merge;
};

/// mpm, then pruning and merging when enabled. Each demand's requirement is
/// kept in the returned plan as given.
PipelineResult run_pipeline(std::span<const Demand> demands, const RadioConfig& config, const PipelineOptions& options);

struct EvalRecord {
    ScenarioSpec spec;
    std::string status = "ok";
    std::vector<double> sr;
    double asr = 0.0;
    std::size_t relays = 0;
    double total_length = 0.0;
    double merge_savings = 0.0;  // percent of the pre-merge relay count
    std::size_t violations = 0;
    PlacementPlan plan;

    bool ok() const { return status == "ok"; }
};

/// Generates, plans (merging unless kind unknown) and scores one instance.
/// Failures are recorded in status, never thrown.
EvalRecord run_instance(const ScenarioSpec& spec);

struct GridSpec {
    ScenarioKind kind = ScenarioKind::Definite;
    std::vector<double> areas{200.0};
    std::vector<double> interference_multipliers{1.4142135623730951};
    std::vector<int> demand_counts{10};
    std::optional<std::pair<double, double>> flow_range;  // default per kind
    int runs = 100;
    std::uint64_t first_seed = 1;
    RadioConfig base;  // R is replaced by multiplier * r

    void validate() const;
};

/// Grid points in (area, multiplier, m) order; seeds first_seed.. are shared
/// by every grid point.
std::vector<ScenarioSpec> expand_grid(const GridSpec& grid);
std::vector<EvalRecord> run_batch(const GridSpec& grid);

std::string per_run_csv(std::span<const EvalRecord> records);
std::string aggregate_csv(std::span<const EvalRecord> records);

}  // namespace relayplan
