#include "relayplan/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace relayplan {

void RadioConfig::validate() const {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("transmission range r must be positive");
    if (!(R >= r) || !std::isfinite(R)) throw std::invalid_argument("interference range R must be >= r");
    if (!(f > 0.0) || !std::isfinite(f)) throw std::invalid_argument("per-slot flow f must be positive");
    if (C < 1) throw std::invalid_argument("max path count C must be >= 1");
}

int derive_j(const RadioConfig& config) {
    if (!(config.r > 0.0)) throw std::invalid_argument("transmission range r must be positive");
    if (config.R < config.r) throw std::invalid_argument("interference range R must be >= r");
    // R = j*r exactly belongs to [j*r, (j+1)*r).
    return static_cast<int>(std::floor(config.R / config.r + kGeomEps));
}

void Demand::validate() const {
    if (near(src, dest)) throw std::invalid_argument("demand '" + id + "' has src == dest");
    if (required_flow && !(*required_flow > 0.0))
        throw std::invalid_argument("demand '" + id + "' has a non-positive flow requirement");
}

bool links_conflict(Link a, Link b, std::span<const Point> positions, double R) {
    if (a.tx == b.tx || a.tx == b.rx || a.rx == b.tx || a.rx == b.rx) return true;
    return dist(positions[a.tx], positions[b.tx]) <= R + kGeomEps;
}

std::vector<Point> PlacementPlan::positions() const {
    std::vector<Point> out;
    out.reserve(nodes.size());
    for (const auto& n : nodes) out.push_back(n.pos);
    return out;
}

Polyline PlacementPlan::geometry(const PlannedPath& p) const {
    std::vector<Point> pts;
    pts.reserve(p.nodes.size());
    for (auto id : p.nodes) pts.push_back(nodes[id].pos);
    return Polyline(dedupe_consecutive(pts));
}

NodeId PlacementPlan::add_terminal(Point p) {
    for (NodeId i = 0; i < nodes.size(); ++i) {
        if (nodes[i].kind == NodeKind::Terminal && near(nodes[i].pos, p)) return i;
    }
    nodes.push_back({p, NodeKind::Terminal});
    return nodes.size() - 1;
}

NodeId PlacementPlan::add_relay(Point p) {
    nodes.push_back({p, NodeKind::Relay});
    return nodes.size() - 1;
}

std::optional<std::size_t> PlacementPlan::demand_index(const std::string& id) const {
    for (std::size_t i = 0; i < demands.size(); ++i) {
        if (demands[i].id == id) return i;
    }
    return std::nullopt;
}

std::vector<std::size_t> PlacementPlan::paths_of(std::size_t demand) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (paths[i].demand == demand) out.push_back(i);
    }
    return out;
}

std::size_t PlacementPlan::relay_count() const {
    std::vector<bool> used(nodes.size(), false);
    for (const auto& p : paths) {
        for (auto id : p.nodes) used[id] = true;
    }
    std::size_t count = 0;
    for (NodeId i = 0; i < nodes.size(); ++i) {
        if (used[i] && nodes[i].kind == NodeKind::Relay) ++count;
    }
    return count;
}

double PlacementPlan::total_length() const {
    // Shared hops (same node pair, either direction) are counted once.
    std::vector<std::pair<NodeId, NodeId>> hops;
    for (const auto& p : paths) {
        for (std::size_t h = 0; h + 1 < p.nodes.size(); ++h)
            hops.emplace_back(std::min(p.nodes[h], p.nodes[h + 1]), std::max(p.nodes[h], p.nodes[h + 1]));
    }
    std::sort(hops.begin(), hops.end());
    hops.erase(std::unique(hops.begin(), hops.end()), hops.end());
    double total = 0.0;
    for (auto [a, b] : hops) total += dist(nodes[a].pos, nodes[b].pos);
    return total;
}

void PlacementPlan::compact() {
    std::vector<bool> keep(nodes.size(), false);
    for (NodeId i = 0; i < nodes.size(); ++i) keep[i] = nodes[i].kind == NodeKind::Terminal;
    for (const auto& p : paths) {
        for (auto id : p.nodes) keep[id] = true;
    }
    std::vector<NodeId> remap(nodes.size(), 0);
    std::vector<Node> kept;
    for (NodeId i = 0; i < nodes.size(); ++i) {
        if (!keep[i]) continue;
        remap[i] = kept.size();
        kept.push_back(nodes[i]);
    }
    nodes = std::move(kept);
    for (auto& p : paths) {
        for (auto& id : p.nodes) id = remap[id];
    }
}

int schedule_period(const PlacementPlan& plan) {
    int period = 0;
    for (const auto& p : plan.paths) {
        for (int s : p.slots) period = std::max(period, s);
    }
    return period;
}

PointGrid::PointGrid(std::span<const Point> points, std::span<const std::size_t> ids, double cell)
    : points_(points), cell_(cell) {
    if (!(cell > 0.0)) throw std::invalid_argument("grid cell must be positive");
    for (auto id : ids) {
        const Point p = points_[id];
        cells_[key(static_cast<long>(std::floor(p.x / cell_)), static_cast<long>(std::floor(p.y / cell_)))].push_back(id);
    }
}

long long PointGrid::key(long cx, long cy) const {
    return (static_cast<long long>(cx) << 32) ^ static_cast<long long>(static_cast<unsigned int>(cy));
}

void PointGrid::for_each_within(Point q, double radius, const std::function<void(std::size_t)>& fn) const {
    const long span = static_cast<long>(std::ceil(radius / cell_));
    const long cx = static_cast<long>(std::floor(q.x / cell_));
    const long cy = static_cast<long>(std::floor(q.y / cell_));
    for (long dx = -span; dx <= span; ++dx) {
        for (long dy = -span; dy <= span; ++dy) {
            auto it = cells_.find(key(cx + dx, cy + dy));
            if (it == cells_.end()) continue;
            for (auto id : it->second) {
                if (dist(points_[id], q) <= radius + kGeomEps) fn(id);
            }
        }
    }
}

namespace {

std::vector<std::size_t> transmitter_ids(const PlacementPlan& plan, std::vector<bool>& transmitting) {
    transmitting.assign(plan.nodes.size(), false);
    for (const auto& p : plan.paths) {
        for (std::size_t h = 0; h + 1 < p.nodes.size(); ++h) transmitting[p.nodes[h]] = true;
    }
    std::vector<std::size_t> ids;
    for (NodeId i = 0; i < plan.nodes.size(); ++i) {
        if (transmitting[i]) ids.push_back(i);
    }
    return ids;
}

}  // namespace

InterferenceIndex::InterferenceIndex(const PlacementPlan& plan)
    : positions_(plan.positions()),
      tx_ids_(transmitter_ids(plan, transmitting_)),
      R_(plan.config.R),
      grid_(positions_, tx_ids_, plan.config.R) {
    weight_.assign(plan.nodes.size(), 0);
    for (const auto& p : plan.paths) {
        weight_[p.nodes.front()] += 1;
        weight_[p.nodes.back()] += 1;
    }
    for (NodeId i = 0; i < plan.nodes.size(); ++i) {
        if (plan.nodes[i].kind == NodeKind::Relay || weight_[i] == 0) weight_[i] = 1;
    }
}

std::vector<WeightedNode> InterferenceIndex::interference_set(NodeId n) const {
    std::vector<WeightedNode> out;
    grid_.for_each_within(positions_[n], R_, [&](std::size_t m) {
        if (m != n) out.push_back({m, weight_[m]});
    });
    std::sort(out.begin(), out.end(), [](const WeightedNode& a, const WeightedNode& b) { return a.node < b.node; });
    return out;
}

std::vector<WeightedNode> interference_set(NodeId n, const PlacementPlan& plan) {
    return InterferenceIndex(plan).interference_set(n);
}

int cardinality(std::span<const WeightedNode> set) {
    return std::accumulate(set.begin(), set.end(), 0, [](int acc, const WeightedNode& w) { return acc + w.weight; });
}

}  // namespace relayplan
