#pragma once

#include <stdexcept>
#include <vector>

#include "relayplan/geometry.hpp"
#include "relayplan/model.hpp"

namespace relayplan {

/// src and dest closer than 2R: they talk directly or over a few relays, so
/// there is no placement problem worth solving.
class DemandTooClose : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// No interference-free middle connection within the search region.
class ConstructionInfeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Best flow of one straight path: f / (j + 1).
double single_path_flow(const RadioConfig& config);

/// Signed distance along path m (angle 2*pi*(m-1)/c from path 1) to the
/// point at distance R from (q*r, 0) on path 1. Throws when q is outside
/// 1..j or m outside 2..c.
double interference_length(int q, int m, int c, const RadioConfig& config);

struct InterferenceProfile {
    int c = 1;
    // slot_totals[q-1] = s(q*r, 0) for q = 1..j.
    std::vector<int> slot_totals;
    int max_slots = 0;       // s_c
    double flow = 0.0;       // f_c = c*f / s_c
};

InterferenceProfile interference_profile(int c, const RadioConfig& config);

struct MaxFlow {
    double flow = 0.0;
    int best_c = 1;
};

/// Maximum of f_c over c = 1..C; ties go to the smaller c.
MaxFlow max_flow(const RadioConfig& config);

/// Equal-angle path bundle for one demand; element m-1 is path m.
/// Throws DemandTooClose when dist(src, dest) < 2R and
/// ConstructionInfeasible when a clear connection cannot be routed.
std::vector<Polyline> construct_paths(const Demand& demand, int c, const RadioConfig& config);

/// Adds a path following geometry to the plan, placing relays at spacing r.
/// The polyline endpoints must be the demand's terminals.
PlannedPath& append_path(PlacementPlan& plan, std::size_t demand, const Polyline& geometry);

struct Mp1Result {
    double analytic_flow = 0.0;  // F_C
    int best_c = 1;
    double measured_flow = 0.0;  // replayed through the validator
    PlacementPlan plan;          // single-demand plan with its schedule
};

/// Picks the best path count analytically among constructible bundles, builds
/// it and schedules it.
Mp1Result mp1(const Demand& demand, const RadioConfig& config);

/// The geometry step of mp1 alone: (best_c, F_C, polylines).
struct Mp1Geometry {
    double analytic_flow = 0.0;
    int best_c = 1;
    std::vector<Polyline> paths;
};

Mp1Geometry mp1_geometry(const Demand& demand, const RadioConfig& config);

}  // namespace relayplan
