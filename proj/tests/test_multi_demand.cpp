#include <doctest.h>

#include <set>

#include "relayplan/multi_demand.hpp"
#include "relayplan/single_demand.hpp"
#include "relayplan/validator.hpp"
#include "support/fixtures.hpp"

using namespace relayplan;
using fixtures::add_chain;

TEST_CASE("heaviest_node on an uncontended link") {
    auto plan = fixtures::empty_plan();
    add_chain(plan, "a", {0, 0}, {10, 0}, 1);
    const auto report = heaviest_node(0, plan);
    CHECK(report.set.empty());
    CHECK(report.weighted_cardinality == 0);
    CHECK(report.realized_flow == doctest::Approx(1.0));
}

TEST_CASE("heaviest_node on a lone chain") {
    auto plan = fixtures::empty_plan();
    add_chain(plan, "a", {0, 0}, {60, 0}, 6);
    const auto report = heaviest_node(0, plan);
    // Neighbours on both sides are within R of the gate but 2r apart, so
    // only one of them competes with it for a slot.
    CHECK(report.weighted_cardinality == 1);
    CHECK(report.realized_flow == doctest::Approx(0.5));
    CHECK(report.heaviest == plan.paths[0].nodes[0]);
}

TEST_CASE("heaviest_node with j = 2") {
    auto plan = fixtures::empty_plan(22.0);
    add_chain(plan, "a", {0, 0}, {80, 0}, 8);
    const auto report = heaviest_node(0, plan);
    CHECK(report.weighted_cardinality == 2);
    CHECK(report.realized_flow == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("assign_slots on a chain gives the alternating pattern") {
    auto plan = fixtures::empty_plan();
    add_chain(plan, "a", {0, 0}, {60, 0}, 6);
    schedule_plan(plan);
    CHECK(plan.paths[0].slots == std::vector<int>{1, 2, 1, 2, 1, 2});
    CHECK(plan.achieved[0] == doctest::Approx(0.5));
}

TEST_CASE("second chain reuses the first chain's slots") {
    auto plan = fixtures::two_chain_fixture();
    schedule_plan(plan);
    CHECK(validate(plan).empty());
    const std::set<int> a(plan.paths[0].slots.begin(), plan.paths[0].slots.end());
    const std::set<int> b(plan.paths[1].slots.begin(), plan.paths[1].slots.end());
    CHECK(a.size() == 5);
    CHECK(b.size() == 4);
    for (int s : b) CHECK(a.count(s) == 1);
    CHECK(schedule_period(plan) == 5);
    CHECK(plan.achieved[0] == doctest::Approx(0.2));
    CHECK(plan.achieved[1] == doctest::Approx(0.25));
}

TEST_CASE("far-apart chains share the same two slots") {
    RadioConfig config;
    config.C = 1;
    const std::vector<Demand> demands{{"a", {0, 0}, {100, 0}, std::nullopt}, {"b", {0, 500}, {100, 500}, std::nullopt}};
    const auto plan = mpm(demands, config);
    CHECK(schedule_period(plan) == 2);
    CHECK(validate(plan).empty());
    CHECK(plan.achieved[0] == doctest::Approx(0.5));
    CHECK(plan.achieved[1] == doctest::Approx(0.5));
}

TEST_CASE("mpm on one demand agrees with mp1") {
    const Demand d{"a", {10, 20}, {130, 70}, std::nullopt};
    const RadioConfig config;
    const auto single = mp1(d, config);
    const std::vector<Demand> one{d};
    const auto plan = mpm(one, config);
    CHECK(plan.estimated[0] == doctest::Approx(single.measured_flow));
    CHECK(plan.achieved[0] == doctest::Approx(single.measured_flow));
}

TEST_CASE("a source next to another demand's terminals lowers its flow") {
    const RadioConfig config;
    const double R = config.R;
    const std::vector<Demand> demands{{"1", {0, 0}, {2 * R, 0}, std::nullopt}, {"2", {R, 0}, {R, -100}, std::nullopt}};
    const auto plan = mpm(demands, config);
    CHECK(validate(plan).empty());
    CHECK(plan.estimated[0] < max_flow(config).flow);
}

TEST_CASE("mpm on random instances") {
    const RadioConfig config;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        CAPTURE(seed);
        const auto demands = fixtures::random_demands(seed, 10, 200, config.R);
        const auto plan = mpm(demands, config);
        REQUIRE(validate(plan).empty());
        for (std::size_t d = 0; d < demands.size(); ++d) {
            CHECK(plan.estimated[d] > 0.0);
            CHECK(plan.achieved[d] > 0.0);
        }
        for (const auto& p : plan.paths) {
            const double fc = mp1_geometry(plan.demands[p.demand], config).analytic_flow;
            CHECK(p.realized_flow > 0.0);
            CHECK(p.realized_flow <= fc + 1e-12);
        }
    }
}

TEST_CASE("adding a demand never raises an existing path's realized flow") {
    const RadioConfig config;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto demands = fixtures::random_demands(seed, 6, 150, config.R);
        PlacementPlan small, large;
        small.config = large.config = config;
        for (std::size_t d = 0; d < demands.size(); ++d) {
            const auto geometry = mp1_geometry(demands[d], config);
            if (d + 1 < demands.size()) {
                small.demands.push_back(demands[d]);
                for (const auto& g : geometry.paths) append_path(small, d, g);
            }
            large.demands.push_back(demands[d]);
            for (const auto& g : geometry.paths) append_path(large, d, g);
        }
        const InterferenceIndex si(small), li(large);
        for (std::size_t p = 0; p < small.paths.size(); ++p)
            CHECK(heaviest_node(p, large, li).realized_flow <= heaviest_node(p, small, si).realized_flow + 1e-12);
    }
}

TEST_CASE("isolated demands keep their single-demand flow") {
    const RadioConfig config;
    const std::vector<Demand> demands{{"a", {0, 0}, {90, 30}, std::nullopt}, {"b", {800, 0}, {900, -20}, std::nullopt}};
    const auto plan = mpm(demands, config);
    for (std::size_t d = 0; d < demands.size(); ++d) {
        const auto single = mp1(demands[d], config);
        CHECK(plan.estimated[d] == doctest::Approx(single.plan.estimated[0]));
        CHECK(plan.achieved[d] == doctest::Approx(single.measured_flow));
    }
}

TEST_CASE("mpm input checks") {
    const RadioConfig config;
    const std::vector<Demand> dup{{"a", {0, 0}, {100, 0}, std::nullopt}, {"a", {0, 50}, {100, 50}, std::nullopt}};
    CHECK_THROWS_AS(mpm(dup, config), std::invalid_argument);
    const std::vector<Demand> close{{"a", {0, 0}, {20, 0}, std::nullopt}};
    CHECK_THROWS_AS(mpm(close, config), DemandTooClose);
}
