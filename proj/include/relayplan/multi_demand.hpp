#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "relayplan/model.hpp"

namespace relayplan {

/// Result of scanning one path for the node whose interference gates it.
struct PathInterferenceReport {
    std::size_t path = 0;
    NodeId heaviest = 0;
    // Heaviest mutually-interfering group around the gate, gate excluded.
    std::vector<WeightedNode> set;
    int weighted_cardinality = 0;
    double realized_flow = 0.0;  // f / (weighted_cardinality + 1)
};

/// Scans the transmitting nodes of plan.paths[path] from src to dest. For
/// each node n the interfering transmitters of n are reduced to the
/// heaviest group that also interferes pairwise (they all compete for
/// distinct slots together with n); the node with the largest weighted
/// group wins, first one on ties.
PathInterferenceReport heaviest_node(std::size_t path, const PlacementPlan& plan, const InterferenceIndex& index);
PathInterferenceReport heaviest_node(std::size_t path, const PlacementPlan& plan);

/// Incremental greedy slot colouring over the hops of a plan. Hops that
/// already carry a label are taken as fixed.
class SlotAssigner {
public:
    explicit SlotAssigner(PlacementPlan& plan);

    /// Lowest label not used by any assigned hop that conflicts with this one.
    int lowest_free(std::size_t path, std::size_t hop) const;
    void set(std::size_t path, std::size_t hop, int label);

    /// Labels the gate hops (those transmitted by the report's nodes) first,
    /// then the rest of the reported path in src -> dest order.
    void assign(const PathInterferenceReport& report);

    /// Labels every unassigned hop of one path in order.
    void assign_path(std::size_t path);

private:
    using HopRef = std::pair<std::size_t, std::size_t>;
    long long cell_key(Point p) const;

    PlacementPlan& plan_;
    std::vector<Point> positions_;
    double cell_;
    std::unordered_map<long long, std::vector<HopRef>> cells_;
};

/// Slot assignment for one path against the current schedule of the plan.
void assign_slots(PlacementPlan& plan, const PathInterferenceReport& report);

/// Phase 2 of MPM: clears the schedule, then for every demand in order and
/// every path of it finds the heaviest node against the whole plan and
/// assigns slots. Fills plan.estimated (summed realized flows) and
/// plan.achieved (validator-measured). Throws std::logic_error if the
/// result is not conflict-free.
std::vector<PathInterferenceReport> schedule_plan(PlacementPlan& plan);

/// Replays the schedule and stores measured flows into plan.achieved and
/// each path's achieved_flow.
void refresh_flows(PlacementPlan& plan);

/// Recomputes every path's realized_flow and plan.estimated against the
/// plan as it stands, leaving the schedule untouched.
void refresh_realized(PlacementPlan& plan);

/// MP1 per demand for geometry, then joint slot assignment.
PlacementPlan mpm(std::span<const Demand> demands, const RadioConfig& config);

}  // namespace relayplan
