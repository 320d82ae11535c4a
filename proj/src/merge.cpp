#include "relayplan/merge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "relayplan/multi_demand.hpp"
#include "relayplan/validator.hpp"

namespace relayplan {

namespace {

constexpr double kFlowEps = 1e-9;

std::string format_flow(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double flow_with_paths(const PlacementPlan& plan, std::size_t demand, std::span<const std::size_t> paths) {
    PlacementPlan tmp;
    tmp.config = plan.config;
    tmp.demands = plan.demands;
    tmp.nodes = plan.nodes;
    for (auto p : paths) tmp.paths.push_back(plan.paths[p]);
    return simulate_flow(tmp)[demand].flow;
}

struct Box {
    double x0, y0, x1, y1;
};

Box bounds(const PlacementPlan& plan, const PlannedPath& p) {
    Box b{INFINITY, INFINITY, -INFINITY, -INFINITY};
    for (auto id : p.nodes) {
        const Point q = plan.nodes[id].pos;
        b = {std::min(b.x0, q.x), std::min(b.y0, q.y), std::max(b.x1, q.x), std::max(b.y1, q.y)};
    }
    return b;
}

bool boxes_within(const Box& a, const Box& b, double gap) {
    return a.x0 - gap <= b.x1 && b.x0 - gap <= a.x1 && a.y0 - gap <= b.y1 && b.y0 - gap <= a.y1;
}

std::vector<Point> connector_relays(Point from, Point to, double r) {
    return place_relays(Polyline({from, to}), r);
}

}  // namespace

RequirementInfeasible::RequirementInfeasible(const std::string& id, double req, double got)
    : std::runtime_error("demand '" + id + "' requires " + format_flow(req) + " but the plan achieves " +
                         format_flow(got)),
      demand_id(id), required(req), achieved(got) {}

PruneResult prune_longest_first(std::span<const double> lengths, double required,
                                const std::function<double(std::span<const std::size_t>)>& flow_of) {
    PruneResult out;
    out.kept.resize(lengths.size());
    std::iota(out.kept.begin(), out.kept.end(), std::size_t{0});
    out.flow = flow_of(out.kept);
    std::vector<std::size_t> order = out.kept;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (lengths[a] != lengths[b]) return lengths[a] > lengths[b];
        return a > b;
    });
    for (auto victim : order) {
        if (out.kept.size() <= 1) break;
        std::vector<std::size_t> rest;
        for (auto k : out.kept) {
            if (k != victim) rest.push_back(k);
        }
        const double flow = flow_of(rest);
        if (flow > required + kFlowEps) {
            out.kept = std::move(rest);
            out.flow = flow;
        }
    }
    return out;
}

double planned_flow(const PlacementPlan& plan, std::size_t demand) {
    return std::min(plan.achieved.at(demand), plan.estimated.at(demand));
}

std::vector<SurplusReport> prune_surplus(PlacementPlan& plan) {
    if (plan.achieved.size() != plan.demands.size()) refresh_flows(plan);
    if (plan.estimated.size() != plan.demands.size()) refresh_realized(plan);
    std::vector<SurplusReport> reports;
    std::vector<bool> drop(plan.paths.size(), false);
    for (std::size_t d = 0; d < plan.demands.size(); ++d) {
        const auto& demand = plan.demands[d];
        SurplusReport rep;
        rep.demand_id = demand.id;
        rep.flow = planned_flow(plan, d);
        rep.required = demand.required_flow.value_or(rep.flow);
        if (demand.required_flow) {
            if (*demand.required_flow > rep.flow + kFlowEps)
                throw RequirementInfeasible(demand.id, *demand.required_flow, rep.flow);
            const auto paths = plan.paths_of(d);
            std::vector<double> lengths;
            for (auto p : paths) lengths.push_back(polyline_length(plan.geometry(plan.paths[p])));
            const auto result = prune_longest_first(lengths, *demand.required_flow, [&](std::span<const std::size_t> sub) {
                std::vector<std::size_t> ids;
                double realized = 0.0;
                for (auto s : sub) {
                    ids.push_back(paths[s]);
                    realized += plan.paths[paths[s]].realized_flow;
                }
                return std::min(realized, flow_with_paths(plan, d, ids));
            });
            std::vector<bool> keep(paths.size(), false);
            for (auto k : result.kept) keep[k] = true;
            for (std::size_t s = 0; s < paths.size(); ++s) {
                if (!keep[s]) {
                    drop[paths[s]] = true;
                    ++rep.removed;
                }
            }
            rep.flow = result.flow;
        }
        rep.surplus = std::max(0.0, rep.flow - rep.required);
        reports.push_back(rep);
    }
    std::vector<PlannedPath> kept;
    for (std::size_t p = 0; p < plan.paths.size(); ++p) {
        if (!drop[p]) kept.push_back(std::move(plan.paths[p]));
    }
    plan.paths = std::move(kept);
    plan.compact();
    refresh_flows(plan);
    refresh_realized(plan);
    return reports;
}

double avg_path_distance(const Polyline& a, const Polyline& b, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("sampling step must be positive");
    auto one_way = [step](const Polyline& from, const Polyline& to) {
        const auto samples = sample_polyline(from, step);
        double sum = 0.0;
        for (const auto& s : samples) sum += point_to_polyline_distance(s, to);
        return sum / samples.size();
    };
    return 0.5 * (one_way(a, b) + one_way(b, a));
}

double junction_threshold(const RadioConfig& config) { return 2.0 * config.R; }

std::optional<MergeCandidate> merge_geometry(const PlacementPlan& plan, std::size_t host, std::size_t guest) {
    if (host == guest || host >= plan.paths.size() || guest >= plan.paths.size()) return std::nullopt;
    const auto& H = plan.paths[host];
    const auto& G = plan.paths[guest];
    if (H.demand == G.demand || H.merged || G.merged) return std::nullopt;

    const Polyline host_line = plan.geometry(H);
    const double tau = junction_threshold(plan.config);
    auto pos = [&](NodeId id) { return plan.nodes[id].pos; };

    std::optional<std::size_t> first, last;
    for (std::size_t t = 0; t < G.nodes.size(); ++t) {
        const bool on_host = std::find(H.nodes.begin(), H.nodes.end(), G.nodes[t]) != H.nodes.end();
        if (on_host || point_to_polyline_distance(pos(G.nodes[t]), host_line) < tau) {
            if (!first) first = t;
            last = t;
        }
    }
    if (!first || *first >= *last) return std::nullopt;

    MergeCandidate c;
    c.host = host;
    c.guest = guest;
    c.i = *first;
    c.k = *last;
    auto attach = [&](NodeId g) {
        std::size_t best = 0;
        double best_d = INFINITY;
        for (std::size_t s = 0; s < H.nodes.size(); ++s) {
            const double d = H.nodes[s] == g ? -1.0 : dist(pos(H.nodes[s]), pos(g));
            if (d < best_d) {
                best_d = d;
                best = s;
            }
        }
        return best;
    };
    c.a = attach(G.nodes[c.i]);
    c.b = attach(G.nodes[c.k]);
    if (c.a == c.b) return std::nullopt;

    const NodeId gi = G.nodes[c.i], gk = G.nodes[c.k];
    const NodeId ha = H.nodes[c.a], hb = H.nodes[c.b];
    // Distinct nodes stacked on one spot cannot be joined by a connector.
    if ((gi != ha && near(pos(gi), pos(ha))) || (gk != hb && near(pos(gk), pos(hb)))) return std::nullopt;
    if (gi != ha) c.entry_relays = connector_relays(pos(gi), pos(ha), plan.config.r);
    if (gk != hb) c.exit_relays = connector_relays(pos(hb), pos(gk), plan.config.r);
    c.connector_length = (gi != ha ? dist(pos(gi), pos(ha)) : 0.0) + (gk != hb ? dist(pos(hb), pos(gk)) : 0.0);
    for (std::size_t t = c.i; t < c.k; ++t) c.bypassed_length += dist(pos(G.nodes[t]), pos(G.nodes[t + 1]));
    if (!(c.connector_length < c.bypassed_length - kGeomEps)) return std::nullopt;

    std::vector<int> uses(plan.nodes.size(), 0);
    for (std::size_t p = 0; p < plan.paths.size(); ++p) {
        if (p == guest) continue;
        for (auto id : plan.paths[p].nodes) ++uses[id];
    }
    std::size_t removed = 0;
    for (std::size_t t = c.i + 1; t < c.k; ++t) {
        if (plan.nodes[G.nodes[t]].kind == NodeKind::Relay && uses[G.nodes[t]] == 0) ++removed;
    }
    if (c.entry_relays.size() + c.exit_relays.size() >= removed) return std::nullopt;

    c.prefix.assign(G.nodes.begin(), G.nodes.begin() + static_cast<std::ptrdiff_t>(c.i) + 1);
    if (c.a < c.b) {
        for (std::size_t s = c.a; s <= c.b; ++s) c.shared.push_back(H.nodes[s]);
    } else {
        for (std::size_t s = c.a + 1; s-- > c.b;) c.shared.push_back(H.nodes[s]);
    }
    c.suffix.assign(G.nodes.begin() + static_cast<std::ptrdiff_t>(c.k), G.nodes.end());

    std::vector<NodeId> all = c.prefix;
    all.insert(all.end(), c.shared.begin() + (gi == ha ? 1 : 0), c.shared.end());
    all.insert(all.end(), c.suffix.begin() + (gk == hb ? 1 : 0), c.suffix.end());
    std::set<NodeId> seen(all.begin(), all.end());
    if (seen.size() != all.size()) return std::nullopt;
    return c;
}

std::vector<double> requirements_of(const PlacementPlan& plan) {
    std::vector<double> out;
    for (std::size_t d = 0; d < plan.demands.size(); ++d) {
        const double measured = d < plan.achieved.size() ? plan.achieved[d] : 0.0;
        out.push_back(plan.demands[d].required_flow.value_or(measured));
    }
    return out;
}

std::optional<PlacementPlan> merge_pair(const PlacementPlan& plan, const MergeCandidate& c,
                                        std::span<const double> requirements) {
    PlacementPlan out = plan;
    const auto& old = plan.paths[c.guest];
    std::vector<NodeId> nodes;
    std::vector<int> slots;
    for (std::size_t t = 0; t < c.prefix.size(); ++t) {
        nodes.push_back(c.prefix[t]);
        if (t + 1 < c.prefix.size()) slots.push_back(old.slots[t]);
    }
    auto extend = [&](NodeId id) {
        nodes.push_back(id);
        slots.push_back(0);
    };
    for (const auto& p : c.entry_relays) extend(out.add_relay(p));
    for (std::size_t s = nodes.back() == c.shared.front() ? 1 : 0; s < c.shared.size(); ++s) extend(c.shared[s]);
    for (const auto& p : c.exit_relays) extend(out.add_relay(p));
    if (nodes.back() != c.suffix.front()) extend(c.suffix.front());
    for (std::size_t t = 1; t < c.suffix.size(); ++t) {
        nodes.push_back(c.suffix[t]);
        slots.push_back(old.slots[c.k + t - 1]);
    }
    auto& guest = out.paths[c.guest];
    guest.nodes = std::move(nodes);
    guest.slots = std::move(slots);
    guest.merged = true;

    SlotAssigner(out).assign_path(c.guest);
    refresh_flows(out);
    refresh_realized(out);
    for (std::size_t d = 0; d < out.demands.size(); ++d) {
        if (out.achieved[d] < requirements[d] - kFlowEps) return std::nullopt;
        if (out.demands[d].required_flow && planned_flow(out, d) < requirements[d] - kFlowEps) return std::nullopt;
    }
    return out;
}

bool is_mergable(const PlacementPlan& plan, std::size_t host, std::size_t guest, std::span<const double> requirements) {
    const auto c = merge_geometry(plan, host, guest);
    return c && merge_pair(plan, *c, requirements).has_value();
}

PlacementPlan merge(const PlacementPlan& input, MergeStats* stats, bool until_stable) {
    PlacementPlan work = input;
    if (work.achieved.size() != work.demands.size()) refresh_flows(work);
    if (work.estimated.size() != work.demands.size()) refresh_realized(work);
    MergeStats local;
    local.relays_before = work.relay_count();
    local.length_before = work.total_length();
    const auto requirements = requirements_of(work);
    const double tau = junction_threshold(work.config);
    const double step = work.config.r / 2.0;

    for (bool first_pass = true;; first_pass = false) {
        bool changed = false;
        auto surplus = prune_surplus(work);
        for (const auto& s : surplus) {
            local.pruned += s.removed;
            changed = changed || s.removed > 0;
        }
        if (first_pass) local.surplus = surplus;

        std::vector<std::size_t> order(work.demands.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return surplus[a].surplus > surplus[b].surplus; });

        for (std::size_t x = 0; x < order.size(); ++x) {
            for (std::size_t y = x + 1; y < order.size(); ++y) {
                std::vector<std::size_t> rows, cols;
                for (auto p : work.paths_of(order[x])) {
                    if (!work.paths[p].merged) rows.push_back(p);
                }
                for (auto p : work.paths_of(order[y])) {
                    if (!work.paths[p].merged) cols.push_back(p);
                }
                // Paths that never come within tau of each other cannot
                // merge, and the first minimum would stop the pair anyway.
                bool close = false;
                for (auto rp : rows) {
                    for (auto cp : cols)
                        close = close || boxes_within(bounds(work, work.paths[rp]), bounds(work, work.paths[cp]), tau);
                }
                if (!close) continue;

                struct Entry {
                    double value;
                    bool excluded;
                };
                std::vector<std::vector<Entry>> M(rows.size(), std::vector<Entry>(cols.size()));
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    for (std::size_t k = 0; k < cols.size(); ++k)
                        M[i][k] = {avg_path_distance(work.geometry(work.paths[rows[i]]),
                                                     work.geometry(work.paths[cols[k]]), step),
                                   false};
                }
                for (;;) {
                    std::optional<std::pair<std::size_t, std::size_t>> at;
                    for (std::size_t i = 0; i < rows.size(); ++i) {
                        for (std::size_t k = 0; k < cols.size(); ++k) {
                            if (M[i][k].excluded) continue;
                            if (!at || M[i][k].value < M[at->first][at->second].value) at = {i, k};
                        }
                    }
                    if (!at) break;
                    const auto [row, col] = *at;
                    for (auto& e : M[row]) e.excluded = true;
                    for (auto& r : M) r[col].excluded = true;
                    const auto candidate = merge_geometry(work, rows[row], cols[col]);
                    if (!candidate) break;
                    auto next = merge_pair(work, *candidate, requirements);
                    if (!next) break;
                    work = std::move(*next);
                    ++local.merges;
                    changed = true;
                }
            }
        }
        if (!changed || !until_stable) break;
    }

    work.compact();
    const auto violations = validate(work);
    if (!violations.empty())
        throw std::logic_error("merged schedule has " + std::to_string(violations.size()) + " conflicts: " +
                               describe(violations.front()));
    refresh_flows(work);
    local.relays_after = work.relay_count();
    local.length_after = work.total_length();
    if (stats) *stats = std::move(local);
    return work;
}

}  // namespace relayplan
