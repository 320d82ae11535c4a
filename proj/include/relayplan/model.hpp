#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "relayplan/geometry.hpp"

namespace relayplan {

struct RadioConfig {
    double r = 10.0;                     // transmission range, m
    double R = 14.142135623730951;       // interference range, m
    double f = 1.0;                      // flow per activated slot
    int C = 8;                           // max paths per demand

    /// Throws std::invalid_argument unless r > 0, R >= r, f > 0, C >= 1.
    void validate() const;
};

/// j with j*r <= R < (j+1)*r. Throws std::invalid_argument when R < r.
int derive_j(const RadioConfig& config);

struct Demand {
    std::string id;
    Point src;
    Point dest;
    std::optional<double> required_flow;

    void validate() const;
};

using NodeId = std::size_t;

enum class NodeKind { Terminal, Relay };

struct Node {
    Point pos;
    NodeKind kind = NodeKind::Relay;
};

struct Link {
    NodeId tx = 0;
    NodeId rx = 0;

    friend bool operator==(const Link&, const Link&) = default;
};

/// Two links may not share a slot when they touch a common node (half-duplex
/// radios) or when one transmitter lies within R of the other.
bool links_conflict(Link a, Link b, std::span<const Point> positions, double R);

/// Slot labels are 1-based; 0 marks an unassigned hop.
struct PlannedPath {
    std::size_t demand = 0;
    std::vector<NodeId> nodes;
    std::vector<int> slots;
    double achieved_flow = 0.0;
    // f / (weighted interference around the gating node + 1).
    double realized_flow = 0.0;
    // Rerouted onto another demand's path by the merger.
    bool merged = false;

    std::size_t hop_count() const { return nodes.size() - 1; }
    Link link(std::size_t hop) const { return {nodes[hop], nodes[hop + 1]}; }
};

struct PlacementPlan {
    RadioConfig config;
    std::vector<Demand> demands;
    std::vector<Node> nodes;
    std::vector<PlannedPath> paths;
    // Per demand, in demand order: flow replayed from the schedule, and the
    // planner's own estimate (sum of per-path realized flows).
    std::vector<double> achieved;
    std::vector<double> estimated;

    std::vector<Point> positions() const;
    Polyline geometry(const PlannedPath& p) const;

    /// Terminals at (near-)identical positions collapse onto one node.
    NodeId add_terminal(Point p);
    NodeId add_relay(Point p);

    std::optional<std::size_t> demand_index(const std::string& id) const;
    std::vector<std::size_t> paths_of(std::size_t demand) const;

    /// Relay nodes referenced by at least one path.
    std::size_t relay_count() const;
    double total_length() const;

    /// Drops relays no path references and renumbers the rest.
    void compact();
};

/// Highest slot label in use (0 for an empty schedule).
int schedule_period(const PlacementPlan& plan);

/// Read-only lookup of points by proximity, cell size fixed at construction.
class PointGrid {
public:
    PointGrid(std::span<const Point> points, std::span<const std::size_t> ids, double cell);

    /// Visits every id whose point is within radius of q (plus kGeomEps), in
    /// a deterministic order.
    void for_each_within(Point q, double radius, const std::function<void(std::size_t)>& fn) const;

private:
    long long key(long cx, long cy) const;
    std::span<const Point> points_;
    double cell_;
    std::unordered_map<long long, std::vector<std::size_t>> cells_;
};

struct WeightedNode {
    NodeId node = 0;
    int weight = 1;
};

/// Per-plan data reused by repeated interference queries.
class InterferenceIndex {
public:
    explicit InterferenceIndex(const PlacementPlan& plan);
    InterferenceIndex(const InterferenceIndex&) = delete;
    InterferenceIndex& operator=(const InterferenceIndex&) = delete;

    bool transmits(NodeId n) const { return transmitting_[n]; }
    /// Paths ending at a terminal count once each; relays weigh 1.
    int weight(NodeId n) const { return weight_[n]; }

    /// Transmitting nodes m != n with dist(m, n) <= R.
    std::vector<WeightedNode> interference_set(NodeId n) const;

    std::span<const Point> positions() const { return positions_; }
    double R() const { return R_; }

private:
    std::vector<Point> positions_;
    std::vector<bool> transmitting_;
    std::vector<int> weight_;
    std::vector<std::size_t> tx_ids_;
    double R_;
    PointGrid grid_;
};

std::vector<WeightedNode> interference_set(NodeId n, const PlacementPlan& plan);

int cardinality(std::span<const WeightedNode> set);

}  // namespace relayplan
