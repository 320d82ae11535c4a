#include "relayplan/validator.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace relayplan {

namespace {

constexpr int kMeasuredFrames = 10;

void check_complete(const PlacementPlan& plan) {
    for (std::size_t p = 0; p < plan.paths.size(); ++p) {
        const auto& path = plan.paths[p];
        if (path.nodes.size() < 2) throw std::invalid_argument("path " + std::to_string(p) + " has fewer than 2 nodes");
        if (path.demand >= plan.demands.size())
            throw std::invalid_argument("path " + std::to_string(p) + " refers to an unknown demand");
        for (auto id : path.nodes) {
            if (id >= plan.nodes.size()) throw std::invalid_argument("path " + std::to_string(p) + " has a dangling node id");
        }
        if (path.slots.size() != path.hop_count())
            throw std::invalid_argument("path " + std::to_string(p) + " has a slot count that differs from its hops");
        for (int s : path.slots) {
            if (s < 1) throw std::invalid_argument("path " + std::to_string(p) + " has an unassigned hop");
        }
    }
}

}  // namespace

std::vector<Violation> validate(const PlacementPlan& plan) {
    check_complete(plan);
    const auto positions = plan.positions();
    std::map<int, std::vector<std::pair<std::size_t, std::size_t>>> by_slot;
    for (std::size_t p = 0; p < plan.paths.size(); ++p) {
        for (std::size_t h = 0; h < plan.paths[p].hop_count(); ++h) by_slot[plan.paths[p].slots[h]].emplace_back(p, h);
    }
    std::vector<Violation> out;
    for (const auto& [slot, hops] : by_slot) {
        for (std::size_t i = 0; i < hops.size(); ++i) {
            for (std::size_t k = i + 1; k < hops.size(); ++k) {
                const Link a = plan.paths[hops[i].first].link(hops[i].second);
                const Link b = plan.paths[hops[k].first].link(hops[k].second);
                if (!links_conflict(a, b, positions, plan.config.R)) continue;
                Violation v;
                v.slot = slot;
                std::tie(v.path_a, v.hop_a) = hops[i];
                std::tie(v.path_b, v.hop_b) = hops[k];
                v.a = a;
                v.b = b;
                v.shared_node = a.tx == b.tx || a.tx == b.rx || a.rx == b.tx || a.rx == b.rx;
                v.tx_distance = dist(positions[a.tx], positions[b.tx]);
                out.push_back(v);
            }
        }
    }
    return out;
}

std::string describe(const Violation& v) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "slot %d: path %zu hop %zu (%zu->%zu) vs path %zu hop %zu (%zu->%zu), %s, tx distance %.6g",
                  v.slot, v.path_a, v.hop_a, v.a.tx, v.a.rx, v.path_b, v.hop_b, v.b.tx, v.b.rx,
                  v.shared_node ? "shared node" : "interference", v.tx_distance);
    return buf;
}

std::vector<FlowMeasurement> simulate_flow(const PlacementPlan& plan) {
    check_complete(plan);
    std::vector<FlowMeasurement> out;
    for (std::size_t d = 0; d < plan.demands.size(); ++d) {
        FlowMeasurement m;
        m.demand_id = plan.demands[d].id;
        const auto paths = plan.paths_of(d);
        std::vector<int> labels;
        std::size_t longest = 0;
        for (auto p : paths) {
            labels.insert(labels.end(), plan.paths[p].slots.begin(), plan.paths[p].slots.end());
            longest = std::max(longest, plan.paths[p].hop_count());
        }
        std::sort(labels.begin(), labels.end());
        labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
        m.frame = static_cast<int>(labels.size());
        if (paths.empty()) {
            out.push_back(std::move(m));
            continue;
        }
        // A unit needs at most one frame per hop to drain through a path.
        const int warmup = std::max<int>(3, static_cast<int>(longest));
        for (auto p : paths) {
            const auto& path = plan.paths[p];
            std::vector<long> held(path.nodes.size(), 0);
            long delivered = 0;
            for (int frame = 0; frame < warmup + kMeasuredFrames; ++frame) {
                held.front() += 1;
                for (int label : labels) {
                    const auto before = held;
                    for (std::size_t h = 0; h < path.hop_count(); ++h) {
                        if (path.slots[h] != label || before[h] == 0) continue;
                        held[h] -= 1;
                        held[h + 1] += 1;
                        if (h + 1 == path.hop_count() && frame >= warmup) ++delivered;
                    }
                }
                held.back() = 0;
            }
            const double flow = delivered * plan.config.f / (kMeasuredFrames * static_cast<double>(m.frame));
            m.path_flows.emplace_back(p, flow);
            m.flow += flow;
        }
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace relayplan
