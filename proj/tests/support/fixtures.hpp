#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "relayplan/model.hpp"

namespace fixtures {

using namespace relayplan;

/// Adds a straight chain of `hops` equal hops from a to b as its own demand.
inline std::size_t add_chain(PlacementPlan& plan, const std::string& id, Point a, Point b, int hops) {
    const std::size_t d = plan.demands.size();
    plan.demands.push_back({id, a, b, std::nullopt});
    PlannedPath p;
    p.demand = d;
    p.nodes.push_back(plan.add_terminal(a));
    for (int k = 1; k < hops; ++k) p.nodes.push_back(plan.add_relay(a + (static_cast<double>(k) / hops) * (b - a)));
    p.nodes.push_back(plan.add_terminal(b));
    p.slots.assign(hops, 0);
    plan.paths.push_back(p);
    return plan.paths.size() - 1;
}

inline PlacementPlan empty_plan(double R = std::numbers::sqrt2 * 10.0) {
    PlacementPlan plan;
    plan.config.r = 10.0;
    plan.config.R = R;
    return plan;
}

/// Two interfering chains: A has hops of r/3 (five mutually conflicting
/// transmitters per window), B has hops of 4 m (four per window) and runs
/// 12.5 m beside A. Demand order A, B.
inline PlacementPlan two_chain_fixture() {
    auto plan = empty_plan();
    add_chain(plan, "A", {0, 0}, {100.0 / 3.0, 0}, 10);
    add_chain(plan, "B", {1, 12.5}, {33, 12.5}, 8);
    return plan;
}

/// Random demands in a square, each at least 2R long.
inline std::vector<Demand> random_demands(std::uint64_t seed, int m, double area, double R) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, area);
    std::vector<Demand> out;
    while (static_cast<int>(out.size()) < m) {
        Demand d{"d" + std::to_string(out.size() + 1), {u(rng), u(rng)}, {u(rng), u(rng)}, std::nullopt};
        if (dist(d.src, d.dest) >= 2 * R) out.push_back(d);
    }
    return out;
}

}  // namespace fixtures
