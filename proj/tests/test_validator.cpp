#include <doctest.h>

#include <algorithm>

#include "relayplan/multi_demand.hpp"
#include "relayplan/validator.hpp"
#include "support/fixtures.hpp"

using namespace relayplan;
using fixtures::add_chain;

namespace {

// Chain with labels 1..period repeating along the path.
PlacementPlan cyclic_chain(double R, int hops, int period) {
    auto plan = fixtures::empty_plan(R);
    add_chain(plan, "a", {0, 0}, {10.0 * hops, 0}, hops);
    for (int h = 0; h < hops; ++h) plan.paths[0].slots[h] = h % period + 1;
    return plan;
}

}  // namespace

TEST_CASE("validate") {
    SUBCASE("far-apart links in one slot") {
        auto plan = fixtures::empty_plan(14.142);
        add_chain(plan, "a", {0, 0}, {10, 0}, 1);
        add_chain(plan, "b", {100, 0}, {110, 0}, 1);
        plan.paths[0].slots = {1};
        plan.paths[1].slots = {1};
        CHECK(validate(plan).empty());
    }
    SUBCASE("transmitters 10 m apart in one slot") {
        auto plan = fixtures::empty_plan(14.142);
        add_chain(plan, "a", {0, 0}, {0, -10}, 1);
        add_chain(plan, "b", {10, 0}, {10, -10}, 1);
        plan.paths[0].slots = {1};
        plan.paths[1].slots = {1};
        const auto v = validate(plan);
        REQUIRE(v.size() == 1);
        CHECK(v[0].slot == 1);
        CHECK(v[0].tx_distance == doctest::Approx(10.0));
        CHECK_FALSE(v[0].shared_node);
    }
    SUBCASE("adjacent hops of one chain in one slot") {
        auto plan = cyclic_chain(14.142, 2, 1);
        const auto v = validate(plan);
        REQUIRE(v.size() == 1);
        CHECK(v[0].shared_node);
    }
    SUBCASE("incomplete schedule") {
        auto plan = fixtures::empty_plan();
        add_chain(plan, "a", {0, 0}, {30, 0}, 3);
        CHECK_THROWS_AS(validate(plan), std::invalid_argument);
        CHECK_THROWS_AS(simulate_flow(plan), std::invalid_argument);
    }
}

TEST_CASE("violation count is invariant under relabelling") {
    auto plan = fixtures::two_chain_fixture();
    schedule_plan(plan);
    // Inject faults, then apply a bijection 1..5 -> 5..1.
    plan.paths[1].slots[0] = plan.paths[0].slots[0];
    plan.paths[1].slots[3] = plan.paths[0].slots[4];
    const auto before = validate(plan).size();
    CHECK(before > 0);
    for (auto& p : plan.paths) {
        for (auto& s : p.slots) s = 6 - s;
    }
    CHECK(validate(plan).size() == before);
}

TEST_CASE("simulate_flow reproduces the chain bound for j = 1, 2, 3") {
    const std::vector<std::pair<double, int>> cases{{14.142, 1}, {22.0, 2}, {30.0, 3}};
    for (auto [R, j] : cases) {
        CAPTURE(R);
        auto plan = cyclic_chain(R, 12, j + 1);
        CHECK(validate(plan).empty());
        const auto m = simulate_flow(plan);
        CHECK(m[0].frame == j + 1);
        CHECK(m[0].flow == doctest::Approx(1.0 / (j + 1)).epsilon(1e-12));
        // One label fewer always conflicts.
        CHECK_FALSE(validate(cyclic_chain(R, 12, j)).empty());
    }
}

TEST_CASE("simulate_flow on a descending label order still reaches steady state") {
    auto plan = fixtures::empty_plan();
    add_chain(plan, "a", {0, 0}, {200, 0}, 20);
    for (int h = 0; h < 20; ++h) plan.paths[0].slots[h] = h % 2 == 0 ? 2 : 1;
    CHECK(validate(plan).empty());
    CHECK(simulate_flow(plan)[0].flow == doctest::Approx(0.5));
}

TEST_CASE("simulate_flow edge cases") {
    auto plan = fixtures::empty_plan();
    add_chain(plan, "a", {0, 0}, {30, 0}, 3);
    plan.paths[0].slots = {1, 2, 1};
    plan.demands.push_back({"idle", {0, 100}, {100, 100}, std::nullopt});
    const auto m = simulate_flow(plan);
    REQUIRE(m.size() == 2);
    CHECK(m[1].flow == 0.0);
    CHECK(m[1].path_flows.empty());
    CHECK(m[0].flow <= 1.0 * plan.config.f);
}

TEST_CASE("simulate_flow is deterministic") {
    auto plan = fixtures::two_chain_fixture();
    schedule_plan(plan);
    const auto a = simulate_flow(plan);
    const auto b = simulate_flow(plan);
    REQUIRE(a.size() == b.size());
    for (std::size_t d = 0; d < a.size(); ++d) CHECK(a[d].flow == b[d].flow);
}

TEST_CASE("mp1 bundle at the three-path configuration measures 3f/4") {
    RadioConfig config;
    config.f = 2.0;
    const std::vector<Demand> one{{"a", {0, 0}, {100, 0}, std::nullopt}};
    const auto plan = mpm(one, config);
    CHECK(plan.paths.size() == 3);
    CHECK(simulate_flow(plan)[0].flow == doctest::Approx(1.5));
}
