#include "relayplan/multi_demand.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>

#include "relayplan/single_demand.hpp"
#include "relayplan/validator.hpp"

namespace relayplan {

namespace {

// Maximum-weight clique by branch and bound with a greedy colouring bound.
class WeightedClique {
public:
    WeightedClique(std::span<const WeightedNode> items, std::span<const Point> positions, double R)
        : items_(items), words_((items.size() + 63) / 64), adj_(items.size(), Bits(words_, 0)) {
        for (std::size_t a = 0; a < items.size(); ++a) {
            for (std::size_t b = a + 1; b < items.size(); ++b) {
                if (dist(positions[items[a].node], positions[items[b].node]) <= R + kGeomEps) {
                    adj_[a][b / 64] |= std::uint64_t{1} << (b % 64);
                    adj_[b][a / 64] |= std::uint64_t{1} << (a % 64);
                }
            }
        }
    }

    std::vector<std::size_t> solve() {
        Bits all(words_, 0);
        for (std::size_t i = 0; i < items_.size(); ++i) all[i / 64] |= std::uint64_t{1} << (i % 64);
        std::vector<std::size_t> current;
        expand(current, 0, all);
        return best_;
    }

private:
    using Bits = std::vector<std::uint64_t>;

    static bool test(const Bits& b, std::size_t i) { return (b[i / 64] >> (i % 64)) & 1U; }
    static void clear(Bits& b, std::size_t i) { b[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }

    void expand(std::vector<std::size_t>& current, int weight, Bits candidates) {
        // Colour classes are independent sets, so each contributes at most
        // its heaviest member to any clique.
        std::vector<std::size_t> order;
        std::vector<int> bound;
        {
            Bits left = candidates;
            int acc = 0;
            for (;;) {
                std::vector<std::size_t> cls;
                for (std::size_t i = 0; i < items_.size(); ++i) {
                    if (!test(left, i)) continue;
                    bool independent = true;
                    for (auto c : cls) independent = independent && !test(adj_[c], i);
                    if (independent) cls.push_back(i);
                }
                if (cls.empty()) break;
                int heaviest = 0;
                for (auto c : cls) heaviest = std::max(heaviest, items_[c].weight);
                acc += heaviest;
                for (auto c : cls) {
                    clear(left, c);
                    order.push_back(c);
                    bound.push_back(acc);
                }
            }
        }
        if (order.empty()) {
            if (weight > best_weight_) {
                best_weight_ = weight;
                best_ = current;
            }
            return;
        }
        for (std::size_t k = order.size(); k-- > 0;) {
            if (weight + bound[k] <= best_weight_) return;
            const std::size_t v = order[k];
            Bits next(words_);
            for (std::size_t w = 0; w < words_; ++w) next[w] = candidates[w] & adj_[v][w];
            current.push_back(v);
            expand(current, weight + items_[v].weight, std::move(next));
            current.pop_back();
            clear(candidates, v);
        }
    }

    std::span<const WeightedNode> items_;
    std::size_t words_;
    std::vector<Bits> adj_;
    std::vector<std::size_t> best_;
    int best_weight_ = -1;
};

double max_hop_length(const PlacementPlan& plan) {
    double out = 0.0;
    for (const auto& p : plan.paths) {
        for (std::size_t h = 0; h < p.hop_count(); ++h)
            out = std::max(out, dist(plan.nodes[p.nodes[h]].pos, plan.nodes[p.nodes[h + 1]].pos));
    }
    return out;
}

}  // namespace

PathInterferenceReport heaviest_node(std::size_t path, const PlacementPlan& plan, const InterferenceIndex& index) {
    if (path >= plan.paths.size()) throw std::out_of_range("path index out of range");
    const auto& p = plan.paths[path];
    PathInterferenceReport report;
    report.path = path;
    report.heaviest = p.nodes.front();
    int best = -1;
    for (std::size_t h = 0; h < p.hop_count(); ++h) {
        const NodeId n = p.nodes[h];
        const auto around = index.interference_set(n);
        WeightedClique solver(around, index.positions(), index.R());
        std::vector<WeightedNode> group;
        for (auto i : solver.solve()) group.push_back(around[i]);
        std::sort(group.begin(), group.end(), [](const WeightedNode& a, const WeightedNode& b) { return a.node < b.node; });
        const int weight = cardinality(group);
        if (weight > best) {
            best = weight;
            report.heaviest = n;
            report.set = std::move(group);
        }
    }
    report.weighted_cardinality = std::max(best, 0);
    report.realized_flow = plan.config.f / (report.weighted_cardinality + 1);
    return report;
}

PathInterferenceReport heaviest_node(std::size_t path, const PlacementPlan& plan) {
    const InterferenceIndex index(plan);
    return heaviest_node(path, plan, index);
}

SlotAssigner::SlotAssigner(PlacementPlan& plan)
    : plan_(plan), positions_(plan.positions()),
      cell_(std::max({plan.config.R, 2.0 * max_hop_length(plan), kGeomEps}) + kGeomEps) {
    for (std::size_t p = 0; p < plan_.paths.size(); ++p) {
        const auto& path = plan_.paths[p];
        if (path.slots.size() != path.hop_count()) plan_.paths[p].slots.resize(path.hop_count(), 0);
        for (std::size_t h = 0; h < path.hop_count(); ++h) {
            if (plan_.paths[p].slots[h] > 0) cells_[cell_key(positions_[path.nodes[h]])].emplace_back(p, h);
        }
    }
}

long long SlotAssigner::cell_key(Point p) const {
    const long cx = static_cast<long>(std::floor(p.x / cell_));
    const long cy = static_cast<long>(std::floor(p.y / cell_));
    return (static_cast<long long>(cx) << 32) ^ static_cast<long long>(static_cast<unsigned int>(cy));
}

int SlotAssigner::lowest_free(std::size_t path, std::size_t hop) const {
    const Link link = plan_.paths[path].link(hop);
    const Point tx = positions_[link.tx];
    const long cx = static_cast<long>(std::floor(tx.x / cell_));
    const long cy = static_cast<long>(std::floor(tx.y / cell_));
    std::set<int> taken;
    for (long dx = -1; dx <= 1; ++dx) {
        for (long dy = -1; dy <= 1; ++dy) {
            const long long key =
                (static_cast<long long>(cx + dx) << 32) ^ static_cast<long long>(static_cast<unsigned int>(cy + dy));
            auto it = cells_.find(key);
            if (it == cells_.end()) continue;
            for (auto [p, h] : it->second) {
                if (p == path && h == hop) continue;
                if (links_conflict(link, plan_.paths[p].link(h), positions_, plan_.config.R))
                    taken.insert(plan_.paths[p].slots[h]);
            }
        }
    }
    int label = 1;
    while (taken.count(label) != 0) ++label;
    return label;
}

void SlotAssigner::set(std::size_t path, std::size_t hop, int label) {
    if (label < 1) throw std::invalid_argument("slot labels start at 1");
    auto& slot = plan_.paths[path].slots[hop];
    if (slot == 0) cells_[cell_key(positions_[plan_.paths[path].nodes[hop]])].emplace_back(path, hop);
    slot = label;
}

void SlotAssigner::assign(const PathInterferenceReport& report) {
    std::vector<bool> gate(plan_.nodes.size(), false);
    gate[report.heaviest] = true;
    for (const auto& w : report.set) gate[w.node] = true;
    for (std::size_t p = 0; p < plan_.paths.size(); ++p) {
        const auto& path = plan_.paths[p];
        for (std::size_t h = 0; h < path.hop_count(); ++h) {
            if (gate[path.nodes[h]] && path.slots[h] == 0) set(p, h, lowest_free(p, h));
        }
    }
    assign_path(report.path);
}

void SlotAssigner::assign_path(std::size_t path) {
    for (std::size_t h = 0; h < plan_.paths[path].hop_count(); ++h) {
        if (plan_.paths[path].slots[h] == 0) set(path, h, lowest_free(path, h));
    }
}

void assign_slots(PlacementPlan& plan, const PathInterferenceReport& report) {
    SlotAssigner assigner(plan);
    assigner.assign(report);
}

void refresh_flows(PlacementPlan& plan) {
    const auto measured = simulate_flow(plan);
    plan.achieved.assign(plan.demands.size(), 0.0);
    for (std::size_t d = 0; d < measured.size(); ++d) {
        plan.achieved[d] = measured[d].flow;
        for (const auto& [path, flow] : measured[d].path_flows) plan.paths[path].achieved_flow = flow;
    }
}

std::vector<PathInterferenceReport> schedule_plan(PlacementPlan& plan) {
    for (auto& p : plan.paths) p.slots.assign(p.hop_count(), 0);
    plan.estimated.assign(plan.demands.size(), 0.0);
    std::vector<PathInterferenceReport> reports;
    const InterferenceIndex index(plan);
    SlotAssigner assigner(plan);
    for (std::size_t d = 0; d < plan.demands.size(); ++d) {
        for (auto p : plan.paths_of(d)) {
            auto report = heaviest_node(p, plan, index);
            assigner.assign(report);
            plan.estimated[d] += report.realized_flow;
            plan.paths[p].realized_flow = report.realized_flow;
            reports.push_back(std::move(report));
        }
    }
    const auto violations = validate(plan);
    if (!violations.empty())
        throw std::logic_error("slot assignment produced " + std::to_string(violations.size()) + " conflicts");
    refresh_flows(plan);
    return reports;
}

void refresh_realized(PlacementPlan& plan) {
    plan.estimated.assign(plan.demands.size(), 0.0);
    const InterferenceIndex index(plan);
    for (std::size_t p = 0; p < plan.paths.size(); ++p) {
        plan.paths[p].realized_flow = heaviest_node(p, plan, index).realized_flow;
        plan.estimated[plan.paths[p].demand] += plan.paths[p].realized_flow;
    }
}

PlacementPlan mpm(std::span<const Demand> demands, const RadioConfig& config) {
    config.validate();
    PlacementPlan plan;
    plan.config = config;
    for (const auto& d : demands) {
        d.validate();
        if (plan.demand_index(d.id)) throw std::invalid_argument("duplicate demand id '" + d.id + "'");
        plan.demands.push_back(d);
    }
    for (std::size_t d = 0; d < plan.demands.size(); ++d) {
        const auto geometry = mp1_geometry(plan.demands[d], config);
        for (const auto& g : geometry.paths) append_path(plan, d, g);
    }
    schedule_plan(plan);
    return plan;
}

}  // namespace relayplan
