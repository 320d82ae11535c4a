#include "relayplan/single_demand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "relayplan/multi_demand.hpp"
#include "relayplan/validator.hpp"

namespace relayplan {

double single_path_flow(const RadioConfig& config) {
    return config.f / (derive_j(config) + 1);
}

double interference_length(int q, int m, int c, const RadioConfig& config) {
    const int j = derive_j(config);
    if (q < 1 || q > j) throw std::invalid_argument("q must lie in 1..j");
    if (m < 2 || m > c) throw std::invalid_argument("m must lie in 2..c");
    const double angle = 2.0 * std::numbers::pi * (m - 1) / c;
    const double qr = q * config.r;
    const double cosine = std::cos(angle);
    // R^2 - (qr sin a)^2, non-negative for qr <= R up to rounding.
    const double radicand = std::max(0.0, qr * qr * cosine * cosine - qr * qr + config.R * config.R);
    return qr * cosine + std::sqrt(radicand);
}

InterferenceProfile interference_profile(int c, const RadioConfig& config) {
    if (c < 1) throw std::invalid_argument("path count must be >= 1");
    const int j = derive_j(config);
    InterferenceProfile profile;
    profile.c = c;
    for (int q = 1; q <= j; ++q) {
        int total = q + 1;
        for (int m = 2; m <= c; ++m) {
            const double x = interference_length(q, m, c, config);
            // floor is closed below: an exact multiple of r keeps its value.
            const int on_path = std::max(static_cast<int>(std::floor(x / config.r + kGeomEps)), 0);
            total += on_path + 1;
        }
        profile.slot_totals.push_back(total);
    }
    profile.max_slots = *std::max_element(profile.slot_totals.begin(), profile.slot_totals.end());
    profile.flow = c * config.f / profile.max_slots;
    return profile;
}

MaxFlow max_flow(const RadioConfig& config) {
    MaxFlow best;
    for (int c = 1; c <= config.C; ++c) {
        const double fc = interference_profile(c, config).flow;
        if (fc > best.flow) best = {fc, c};
    }
    return best;
}

namespace {

// Demand-aligned frame: a along src->dest, b to the left of it.
struct Frame {
    Point origin;
    Point u;
    Point v;

    Point world(double a, double b) const { return origin + a * u + b * v; }
};

double min_dist(Point p, const std::vector<Point>& others) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& o : others) best = std::min(best, dist(p, o));
    return best;
}

std::vector<Point> path_nodes(const Polyline& geometry, double spacing) {
    std::vector<Point> nodes{geometry.front()};
    for (const auto& p : place_relays(geometry, spacing)) nodes.push_back(p);
    nodes.push_back(geometry.back());
    return nodes;
}

// Extends a ray from origin along dir, one hop of length r at a time, and
// returns the hop count of the first node clear of every existing node.
int ray_extent(Point origin, Point dir, const std::vector<Point>& existing, const RadioConfig& config,
               int max_hops) {
    for (int k = 1; k <= max_hops; ++k) {
        if (min_dist(origin + (k * config.r) * dir, existing) > config.R + kGeomEps) return k;
    }
    throw ConstructionInfeasible("ray never clears the existing paths");
}

struct SideState {
    int layers = 0;
    double height = 0.0;  // outermost corridor height so far
    double left = 0.0;    // leftmost src-side leg
    double right = 0.0;   // rightmost dest-side leg
};

}  // namespace

std::vector<Polyline> construct_paths(const Demand& demand, int c, const RadioConfig& config) {
    config.validate();
    if (c < 1) throw std::invalid_argument("path count must be >= 1");
    const double D = dist(demand.src, demand.dest);
    if (D < 2.0 * config.R - kGeomEps)
        throw DemandTooClose("demand '" + demand.id + "': dist(src, dest) < 2R");

    const Point u = (1.0 / D) * (demand.dest - demand.src);
    const Frame frame{demand.src, u, {-u.y, u.x}};

    std::vector<std::optional<Polyline>> built(c);
    built[0] = Polyline({demand.src, demand.dest});
    std::vector<Point> existing = path_nodes(*built[0], config.r);

    // Paths closest to the forward direction are routed first so that each
    // later path on a side wraps around the earlier ones.
    std::vector<int> order;
    for (int m = 2; m <= c; ++m) order.push_back(m);
    auto deviation = [c](int m) {
        const double a = 2.0 * std::numbers::pi * (m - 1) / c;
        return std::min(a, 2.0 * std::numbers::pi - a);
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return deviation(a) < deviation(b) - 1e-12; });

    const double clearance = config.R + config.r * 1e-3;
    const double bound = 2.0 * c * config.R;
    const int max_ray_hops = static_cast<int>(std::ceil((bound + D) / config.r)) + 1;
    SideState sides[2];

    for (int m : order) {
        const double angle = 2.0 * std::numbers::pi * (m - 1) / c;
        const double sine = std::sin(angle);
        int side;
        if (sine > 1e-12) side = 0;
        else if (sine < -1e-12) side = 1;
        else side = sides[0].layers <= sides[1].layers ? 0 : 1;
        const double sigma = side == 0 ? 1.0 : -1.0;

        const Point dir_src{std::cos(angle), sine};
        const Point dir_dest{-std::cos(angle), sine};
        const Point world_dir_src = dir_src.x * frame.u + dir_src.y * frame.v;
        const Point world_dir_dest = dir_dest.x * frame.u + dir_dest.y * frame.v;
        const int ks = ray_extent(demand.src, world_dir_src, existing, config, max_ray_hops);
        const int kd = ray_extent(demand.dest, world_dir_dest, existing, config, max_ray_hops);
        const Point tip_src{ks * config.r * dir_src.x, ks * config.r * dir_src.y};
        const Point tip_dest{D + kd * config.r * dir_dest.x, kd * config.r * dir_dest.y};

        SideState& st = sides[side];
        double height = std::max({clearance, sigma * tip_src.y, sigma * tip_dest.y});
        double left = tip_src.x;
        double right = tip_dest.x;
        if (st.layers > 0) {
            height = std::max(height, st.height + clearance);
            left = std::min(left, st.left - clearance);
            right = std::max(right, st.right + clearance);
        }

        std::optional<Polyline> route;
        std::vector<Point> nodes;
        while (height <= bound + std::max(sigma * tip_src.y, sigma * tip_dest.y)) {
            const std::vector<Point> local{{0.0, 0.0}, tip_src, {left, sigma * height}, {right, sigma * height},
                                           tip_dest, {D, 0.0}};
            std::vector<Point> world;
            for (const auto& p : local) world.push_back(frame.world(p.x, p.y));
            Polyline candidate(dedupe_consecutive(world));
            nodes = path_nodes(candidate, config.r);

            // Nodes from the src tip to the dest tip must clear the earlier paths.
            const Point ws = frame.world(tip_src.x, tip_src.y);
            const Point wd = frame.world(tip_dest.x, tip_dest.y);
            std::size_t first = 0, last = nodes.size() - 1;
            while (first < nodes.size() && !near(nodes[first], ws)) ++first;
            while (last > first && !near(nodes[last], wd)) --last;
            bool clear = first < nodes.size();
            for (std::size_t i = first; clear && i <= last; ++i)
                clear = min_dist(nodes[i], existing) > config.R + kGeomEps;
            if (clear) {
                route = std::move(candidate);
                break;
            }
            height += clearance / 2.0;
            left -= clearance / 2.0;
            right += clearance / 2.0;
        }
        if (!route) {
            throw ConstructionInfeasible("demand '" + demand.id + "': no clear connection for path " +
                                         std::to_string(m) + " of " + std::to_string(c));
        }
        st.layers += 1;
        st.height = height;
        st.left = left;
        st.right = right;
        existing.insert(existing.end(), nodes.begin(), nodes.end());
        built[m - 1] = std::move(route);
    }

    std::vector<Polyline> out;
    for (auto& p : built) out.push_back(std::move(*p));
    return out;
}

PlannedPath& append_path(PlacementPlan& plan, std::size_t demand, const Polyline& geometry) {
    PlannedPath path;
    path.demand = demand;
    path.nodes.push_back(plan.add_terminal(geometry.front()));
    for (const auto& p : place_relays(geometry, plan.config.r)) path.nodes.push_back(plan.add_relay(p));
    path.nodes.push_back(plan.add_terminal(geometry.back()));
    path.slots.assign(path.hop_count(), 0);
    plan.paths.push_back(std::move(path));
    return plan.paths.back();
}

Mp1Geometry mp1_geometry(const Demand& demand, const RadioConfig& config) {
    config.validate();
    demand.validate();
    if (dist(demand.src, demand.dest) < 2.0 * config.R - kGeomEps)
        throw DemandTooClose("demand '" + demand.id + "': dist(src, dest) < 2R");
    Mp1Geometry best;
    for (int c = 1; c <= config.C; ++c) {
        const double fc = interference_profile(c, config).flow;
        if (fc <= best.analytic_flow) continue;
        try {
            auto paths = construct_paths(demand, c, config);
            best = {fc, c, std::move(paths)};
        } catch (const ConstructionInfeasible&) {
            // This c is skipped; smaller bundles stay candidates.
        }
    }
    return best;
}

Mp1Result mp1(const Demand& demand, const RadioConfig& config) {
    auto geometry = mp1_geometry(demand, config);
    Mp1Result result;
    result.analytic_flow = geometry.analytic_flow;
    result.best_c = geometry.best_c;
    result.plan.config = config;
    result.plan.demands = {demand};
    for (const auto& g : geometry.paths) append_path(result.plan, 0, g);
    schedule_plan(result.plan);
    result.measured_flow = result.plan.achieved.front();
    return result;
}

}  // namespace relayplan
