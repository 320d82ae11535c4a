#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "relayplan/model.hpp"

namespace relayplan {

/// A demand asks for more flow than its plan delivers.
class RequirementInfeasible : public std::runtime_error {
public:
    RequirementInfeasible(const std::string& demand_id, double required, double achieved);
    std::string demand_id;
    double required;
    double achieved;
};

/// Flow a demand can be promised: its summed realized flow, bounded by what
/// the schedule replays to.
double planned_flow(const PlacementPlan& plan, std::size_t demand);

struct SurplusReport {
    std::string demand_id;
    double flow = 0.0;      // measured after pruning
    double required = 0.0;
    double surplus = 0.0;   // dF = flow - required
    std::size_t removed = 0;
};

struct PruneResult {
    std::vector<std::size_t> kept;  // indices into the input, ascending
    double flow = 0.0;
};

/// Deletes entries longest first (later index first on equal length) as
/// long as flow_of(remaining) stays strictly above required. A single
/// entry is never deleted.
PruneResult prune_longest_first(std::span<const double> lengths, double required,
                                const std::function<double(std::span<const std::size_t>)>& flow_of);

/// Prunes every demand that carries a requirement, keeping slot labels, and
/// re-measures flows. A path goes only while the planned flow of the rest
/// stays above the requirement. Demands without one are left alone. Throws
/// RequirementInfeasible when a requirement exceeds the planned flow.
std::vector<SurplusReport> prune_surplus(PlacementPlan& plan);

/// Mean distance from samples of one polyline to the other, averaged over
/// both directions. Throws std::invalid_argument unless step > 0.
double avg_path_distance(const Polyline& a, const Polyline& b, double step);

/// Geometric part of a reroute of guest onto host.
struct MergeCandidate {
    std::size_t host = 0;   // path indices
    std::size_t guest = 0;
    std::size_t i = 0, k = 0;  // junction positions on the guest
    std::size_t a = 0, b = 0;  // attachment positions on the host
    double connector_length = 0.0;
    double bypassed_length = 0.0;  // guest length between the junctions
    // Rerouted guest: prefix, relays onto the host, host stretch, relays
    // back, suffix. Joins where guest and host already share a node are
    // not repeated.
    std::vector<NodeId> prefix, shared, suffix;
    std::vector<Point> entry_relays, exit_relays;
};

/// Distance below which a guest node counts as running alongside the host.
double junction_threshold(const RadioConfig& config);

/// Checks the geometric merge conditions and returns the reroute if they
/// hold: guest and host belong to different demands and neither was merged
/// before, the connectors are shorter than the bypassed guest stretch, the
/// reroute removes more relays than it adds, and no node repeats.
std::optional<MergeCandidate> merge_geometry(const PlacementPlan& plan, std::size_t host, std::size_t guest);

/// Per demand: its stated requirement, or the currently measured flow when
/// it has none.
std::vector<double> requirements_of(const PlacementPlan& plan);

/// Applies the reroute to a copy, labels only the guest's new hops and
/// returns the copy if every demand still meets requirements[d] under the
/// replayed schedule, and demands with a stated requirement also by their
/// planned flow.
std::optional<PlacementPlan> merge_pair(const PlacementPlan& plan, const MergeCandidate& candidate,
                                        std::span<const double> requirements);

bool is_mergable(const PlacementPlan& plan, std::size_t host, std::size_t guest, std::span<const double> requirements);

struct MergeStats {
    std::size_t merges = 0;
    std::size_t pruned = 0;
    std::size_t relays_before = 0;
    std::size_t relays_after = 0;
    double length_before = 0.0;
    double length_after = 0.0;
    std::vector<SurplusReport> surplus;  // from the first pruning pass
};

/// Prune, then greedy cross-demand merging in decreasing surplus order. With
/// until_stable the pass repeats until it changes nothing, which makes the
/// result a fixed point of merge. The result is compacted, validated and
/// re-measured.
PlacementPlan merge(const PlacementPlan& plan, MergeStats* stats = nullptr, bool until_stable = false);

}  // namespace relayplan
