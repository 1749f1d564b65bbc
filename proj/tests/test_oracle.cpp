#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"

#include "covtour/oracle.hpp"
#include "support/toys.hpp"

using namespace covtour;

namespace {

// Depot, a far hub, and three clustered demand stops hanging off the hub.
ProblemInstance clustered_triple(int m, Quantity q_units) {
    std::vector<Node> nodes{{0, 0, 0}, {9, 1000, 0}, {1, 1005, 0}, {2, 1010, 0}, {3, 1015, 0}};
    std::vector<Arc> arcs;
    auto both = [&](NodeId a, NodeId b, double len) {
        arcs.push_back(Arc{a, b, len});
        arcs.push_back(Arc{b, a, len});
    };
    both(0, 9, 1000);
    both(9, 1, 5);
    both(1, 2, 5);
    both(2, 3, 5);
    RoadNetwork net = RoadNetwork::create(nodes, arcs, 0, {1, 2, 3}, {1, 2, 3});
    InstanceParams params;
    params.gamma_m = 0.0;
    params.m = m;
    params.capacity = q_units * kQuantityScale;
    params.stop_penalty_s = 5.0;
    return ProblemInstance::assemble(std::move(net),
                                     {{1, 4 * kQuantityScale}, {2, 4 * kQuantityScale}, {3, 4 * kQuantityScale}},
                                     std::nullopt, params);
}

// Exhaustive TSP over the demand set, the reduction oracle for gamma = 0,
// m = 1 instances.
double brute_tsp(const ProblemInstance& inst) {
    std::vector<NodeId> order(inst.network().demand_nodes());
    std::sort(order.begin(), order.end());
    double best = std::numeric_limits<double>::infinity();
    do {
        double c = inst.travel().cost(inst.network().depot(), order.front());
        for (std::size_t i = 0; i + 1 < order.size(); ++i) c += inst.travel().cost(order[i], order[i + 1]);
        c += inst.travel().cost(order.back(), inst.network().depot());
        best = std::min(best, c);
    } while (std::next_permutation(order.begin(), order.end()));
    return best + inst.stop_penalty_s() * static_cast<double>(order.size());
}

int split_count(const Solution& sol) {
    std::map<NodeId, int> visits;
    for (const Tour& t : sol.tours)
        for (const TourStop& s : t.stops) ++visits[s.node];
    int splits = 0;
    for (auto& [j, v] : visits) splits += v - 1;
    return splits;
}

// Generated instances draw demands up to 9 per node; lift the sum limit.
OracleLimits loose_limits() {
    OracleLimits limits;
    limits.max_total_demand = 500 * kQuantityScale;
    return limits;
}

}  // namespace

TEST_SUITE_BEGIN("oracle");

TEST_CASE("one demand node makes an out-and-back tour") {
    std::vector<Node> nodes{{0, 0, 0}, {1, 70, 0}};
    std::vector<Arc> arcs{{0, 1, 70.0}, {1, 0, 70.0}};
    RoadNetwork net = RoadNetwork::create(nodes, arcs, 0, {1}, {1});
    InstanceParams params;
    params.gamma_m = 0.0;
    params.m = 1;
    params.stop_penalty_s = 5.0;
    ProblemInstance inst =
        ProblemInstance::assemble(std::move(net), {{1, 2 * kQuantityScale}}, std::nullopt, params);

    const OracleResult result = solve_exact(inst, true);
    REQUIRE(result.optimum.tours.size() == 1);
    REQUIRE(result.optimum.tours[0].stops.size() == 1);
    CHECK(result.optimum.tours[0].stops[0].node == 1);
    CHECK(result.cost == doctest::Approx(70.0 + 70.0 + 5.0));
    CHECK(result.explored > 0);
}

TEST_CASE("gamma zero with one tour reduces to an exact TSP") {
    int tested = 0;
    for (std::uint64_t seed : {2ULL, 5ULL, 8ULL}) {
        ProblemInstance inst = tests::tiny(seed, 9, 0.8, 0.0, 1);
        if (inst.network().demand_nodes().size() > 8) continue;
        const OracleResult result = solve_exact(inst, true, loose_limits());
        CHECK(result.cost == doctest::Approx(brute_tsp(inst)));
        CHECK(result.optimum.tours[0].stops.size() == inst.demands().size());
        ++tested;
    }
    CHECK(tested >= 1);
}

TEST_CASE("oracle optima are feasible and consistently priced") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        ProblemInstance inst = tests::tiny(seed + 200, 10, 0.6, seed % 2 ? 60.0 : 0.0, 2);
        for (bool splits : {false, true}) {
            OracleResult result;
            try {
                result = solve_exact(inst, splits, loose_limits());
            } catch (const InfeasibleError&) {
                CHECK_FALSE(splits);  // split mode relaxes no-split, never the reverse
                continue;
            }
            CHECK(check_feasible(inst, result.optimum).feasible());
            CHECK(result.cost == doctest::Approx(evaluate(inst, result.optimum).total_s));
        }
    }
}

TEST_CASE("split mode never costs more than no-split mode") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ProblemInstance inst = tests::tiny(seed + 300, 9, 0.7, 0.0, 2);
        double nosplit = std::numeric_limits<double>::infinity();
        try {
            nosplit = solve_exact(inst, false, loose_limits()).cost;
        } catch (const InfeasibleError&) {
        }
        const double split = solve_exact(inst, true, loose_limits()).cost;
        CHECK(split <= nosplit + 1e-9);
    }
}

TEST_CASE("a stop demanding more than Q forces a split") {
    std::vector<Node> nodes{{0, 0, 0}, {1, 50, 0}};
    std::vector<Arc> arcs{{0, 1, 50.0}, {1, 0, 50.0}};
    RoadNetwork net = RoadNetwork::create(nodes, arcs, 0, {1}, {1});
    InstanceParams params;
    params.gamma_m = 0.0;
    params.m = 2;
    params.capacity = 4 * kQuantityScale;  // demand is Q + 1
    ProblemInstance inst =
        ProblemInstance::assemble(std::move(net), {{1, 5 * kQuantityScale}}, std::nullopt, params);

    CHECK_THROWS_AS(solve_exact(inst, false), InfeasibleError);
    const OracleResult split = solve_exact(inst, true);
    CHECK(check_feasible(inst, split.optimum).feasible());
    CHECK(split_count(split.optimum) == 1);
}

TEST_CASE("splits strictly beat singleton tours on a clustered triple") {
    ProblemInstance inst = clustered_triple(3, 6);  // demands 4/4/4, Q = 6
    const OracleResult nosplit = solve_exact(inst, false);
    const OracleResult split = solve_exact(inst, true);
    CHECK(split.cost < nosplit.cost - 1e-6);
    // two loaded tours instead of three round trips
    int nonempty = 0;
    for (const Tour& t : split.optimum.tours) nonempty += t.stops.empty() ? 0 : 1;
    CHECK(nonempty == 2);
    CHECK(split_count(split.optimum) == 1);
}

TEST_CASE("split optima satisfy the split bound") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        ProblemInstance inst = tests::tiny(seed + 400, 9, 0.7, seed % 2 ? 60.0 : 0.0, 2);
        const OracleResult result = solve_exact(inst, true, loose_limits());
        CHECK(split_count(result.optimum) <= inst.m() - 1);
    }
}

TEST_CASE("a larger walking radius never raises the optimal cost") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ProblemInstance narrow = tests::tiny(seed + 500, 9, 0.7, 0.0, 2);
        ProblemInstance wide = tests::tiny(seed + 500, 9, 0.7, 60.0, 2);
        const double c0 = solve_exact(narrow, true, loose_limits()).cost;
        const double c1 = solve_exact(wide, true, loose_limits()).cost;
        CHECK(c0 >= c1 - 1e-9);
    }
}

TEST_CASE("limits are enforced") {
    ProblemInstance big = tests::tiny(77, 16, 0.95, 0.0, 2);
    CHECK(big.network().candidate_stops().size() > 12);
    CHECK_THROWS_AS(solve_exact(big, true), LimitExceededError);

    ProblemInstance inst = tests::tiny(78, 9, 0.7, 0.0, 2);
    OracleLimits tight = loose_limits();
    tight.max_m = 1;
    CHECK_THROWS_AS(solve_exact(inst, true, tight), LimitExceededError);
    OracleLimits tiny_budget = loose_limits();
    tiny_budget.max_explored = 1;
    CHECK_THROWS_AS(solve_exact(inst, true, tiny_budget), LimitExceededError);
}

TEST_CASE("oracle is deterministic") {
    ProblemInstance inst = tests::tiny(81, 9, 0.7, 60.0, 2);
    const OracleResult a = solve_exact(inst, true, loose_limits());
    const OracleResult b = solve_exact(inst, true, loose_limits());
    CHECK(a.cost == b.cost);
    CHECK(a.explored == b.explored);
    REQUIRE(a.optimum.tours.size() == b.optimum.tours.size());
    for (std::size_t k = 0; k < a.optimum.tours.size(); ++k) CHECK(a.optimum.tours[k] == b.optimum.tours[k]);
}

TEST_SUITE_END();
