#pragma once

#include <string>
#include <utility>
#include <vector>

#include "relayplan/model.hpp"

namespace relayplan {

/// Two hops that share a slot label although they conflict.
struct Violation {
    int slot = 0;
    std::size_t path_a = 0, hop_a = 0;
    std::size_t path_b = 0, hop_b = 0;
    Link a, b;
    bool shared_node = false;
    double tx_distance = 0.0;
};

/// Exhaustive pairwise check of every equal-label hop pair. Throws
/// std::invalid_argument if any hop is unlabelled or node ids are dangling.
std::vector<Violation> validate(const PlacementPlan& plan);

std::string describe(const Violation& v);

struct FlowMeasurement {
    std::string demand_id;
    double flow = 0.0;
    int frame = 0;  // distinct labels used by the demand
    std::vector<std::pair<std::size_t, double>> path_flows;
};

/// Replays the schedule slot by slot. Each demand cycles through its own
/// labels; sources inject one unit per path per frame and every active hop
/// forwards at most one unit. Flow is delivered volume per slot after a
/// warm-up, in demand order.
std::vector<FlowMeasurement> simulate_flow(const PlacementPlan& plan);

}  // namespace relayplan
