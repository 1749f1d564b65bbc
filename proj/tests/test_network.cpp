#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"

#include "covtour/network.hpp"
#include "support/toys.hpp"

using namespace covtour;

namespace {

RoadNetwork square_cycle() {
    // Directed 4-cycle with lengths 1, 2, 3, 4.
    std::vector<Node> nodes{{0, 0, 0}, {1, 1, 0}, {2, 1, 1}, {3, 0, 1}};
    std::vector<Arc> arcs{{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 3.0}, {3, 0, 4.0}};
    return RoadNetwork::create(nodes, arcs, 0, {1, 2, 3}, {});
}

// Exhaustive simple-path enumeration, the independent shortest-path oracle.
double brute_shortest(const RoadNetwork& net, NodeId from, NodeId to, bool undirected) {
    if (from == to) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    std::vector<NodeId> stack{from};
    std::set<NodeId> used{from};
    std::function<void(double)> dfs = [&](double acc) {
        const NodeId cur = stack.back();
        if (cur == to) {
            best = std::min(best, acc);
            return;
        }
        for (const Arc& a : net.arcs()) {
            NodeId nxt = -1;
            if (a.tail == cur)
                nxt = a.head;
            else if (undirected && a.head == cur)
                nxt = a.tail;
            else
                continue;
            if (used.count(nxt)) continue;
            used.insert(nxt);
            stack.push_back(nxt);
            dfs(acc + a.length_m);
            stack.pop_back();
            used.erase(nxt);
        }
    };
    dfs(0.0);
    return best;
}

bool same_network(const RoadNetwork& a, const RoadNetwork& b) {
    auto key_nodes = [](const RoadNetwork& n) {
        std::map<NodeId, std::pair<double, double>> m;
        for (const Node& x : n.nodes()) m[x.id] = {x.x, x.y};
        return m;
    };
    auto key_arcs = [](const RoadNetwork& n) {
        std::multiset<std::tuple<NodeId, NodeId, double>> m;
        for (const Arc& x : n.arcs()) m.insert({x.tail, x.head, x.length_m});
        return m;
    };
    return key_nodes(a) == key_nodes(b) && key_arcs(a) == key_arcs(b) &&
           a.candidate_stops() == b.candidate_stops() && a.demand_nodes() == b.demand_nodes() &&
           a.depot() == b.depot();
}

}  // namespace

TEST_SUITE_BEGIN("network");

TEST_CASE("single depot arc travel time uses the depot speed") {
    std::vector<Node> nodes{{0, 0, 0}, {7, 140, 0}};
    std::vector<Arc> arcs{{0, 7, 140.0}, {7, 0, 140.0}};
    RoadNetwork net = RoadNetwork::create(nodes, arcs, 0, {7}, {});
    TravelCostMatrix m = TravelCostMatrix::compute(net, SpeedModel{2.0, 14.0});
    CHECK(m.cost(0, 7) == doctest::Approx(10.0));
    CHECK(m.cost(0, 0) == 0.0);
    CHECK(m.cost(7, 7) == 0.0);
}

TEST_CASE("directed 4-cycle matches exhaustive path enumeration") {
    RoadNetwork net = square_cycle();
    TravelCostMatrix m = TravelCostMatrix::compute(net, SpeedModel{1.0, 1.0});
    const std::vector<NodeId> terminals{0, 1, 2, 3};
    for (NodeId a : {0, 1, 2, 3}) {
        if (!net.is_candidate_stop(a) && a != 0) continue;
        for (NodeId b : {0, 1, 2, 3}) {
            CHECK(m.cost(a, b) == doctest::Approx(brute_shortest(net, a, b, false)));
        }
    }
}

TEST_CASE("unreachable network is rejected at construction") {
    std::vector<Node> nodes{{0, 0, 0}, {1, 1, 0}};
    std::vector<Arc> arcs{{0, 1, 1.0}};  // no way back
    CHECK_THROWS_AS(RoadNetwork::create(nodes, arcs, 0, {1}, {}), UnreachableError);
}

TEST_CASE("duplicate arcs and non-positive lengths are rejected") {
    std::vector<Node> nodes{{0, 0, 0}, {1, 1, 0}};
    CHECK_THROWS_AS(RoadNetwork::create(nodes, {{0, 1, 1.0}, {0, 1, 2.0}, {1, 0, 1.0}}, 0, {}, {}),
                    ValidationError);
    CHECK_THROWS_AS(RoadNetwork::create(nodes, {{0, 1, 0.0}, {1, 0, 1.0}}, 0, {}, {}), ValidationError);
}

TEST_CASE("matrix expansion re-sums to the stored cost") {
    ProblemInstance inst = tests::tiny(11, 16, 0.6, 0.0, 2);
    const auto& travel = inst.travel();
    const auto& terminals = travel.terminals();
    for (NodeId a : terminals) {
        for (NodeId b : terminals) {
            double sum = 0.0;
            for (const Arc& arc : travel.expand(a, b)) sum += travel.arc_seconds(arc);
            const double c = travel.cost(a, b);
            CHECK(std::abs(sum - c) <= 1e-9 * std::max(1.0, std::abs(c)));
        }
    }
}

TEST_CASE("triangle inequality holds for every ordered terminal triple") {
    ProblemInstance inst = tests::tiny(3, 25, 0.5, 60.0, 2);
    const auto& travel = inst.travel();
    const auto& ts = travel.terminals();
    REQUIRE(ts.size() <= 30);
    for (NodeId a : ts)
        for (NodeId b : ts)
            for (NodeId c : ts) CHECK(travel.cost(a, c) <= travel.cost(a, b) + travel.cost(b, c) + 1e-9);
}

TEST_CASE("densify splits a 120 m segment into three 40 m stretches") {
    std::vector<Node> nodes{{0, 0, 0}, {1, 120, 0}};
    std::vector<Arc> arcs{{0, 1, 120.0}, {1, 0, 120.0}};
    RoadNetwork net = RoadNetwork::create(nodes, arcs, 0, {1}, {});
    RoadNetwork dense = densify_stops(net, 50.0);
    CHECK(dense.nodes().size() == 4);
    CHECK(dense.arcs().size() == 6);
    CHECK(dense.candidate_stops().size() == 3);  // stop 1 plus the 2 splitting points
    for (const Arc& a : dense.arcs()) CHECK(a.length_m == doctest::Approx(40.0));
    // both directions share the splitting points
    std::set<std::pair<NodeId, NodeId>> seen;
    for (const Arc& a : dense.arcs()) seen.insert({std::min(a.tail, a.head), std::max(a.tail, a.head)});
    CHECK(seen.size() == 3);
}

TEST_CASE("densify leaves a segment at the boundary untouched") {
    std::vector<Node> nodes{{0, 0, 0}, {1, 50, 0}};
    std::vector<Arc> arcs{{0, 1, 50.0}, {1, 0, 50.0}};
    RoadNetwork net = RoadNetwork::create(nodes, arcs, 0, {1}, {});
    RoadNetwork dense = densify_stops(net, 50.0);
    CHECK(same_network(net, dense));
}

TEST_CASE("densify keeps total segment length: 101 m into three stretches") {
    std::vector<Node> nodes{{0, 0, 0}, {1, 101, 0}};
    std::vector<Arc> arcs{{0, 1, 101.0}, {1, 0, 101.0}};
    RoadNetwork net = RoadNetwork::create(nodes, arcs, 0, {1}, {});
    RoadNetwork dense = densify_stops(net, 50.0);
    double forward = 0.0;
    int forward_arcs = 0;
    for (const Arc& a : dense.arcs()) {
        forward += a.length_m / 2.0;  // both directions present
        ++forward_arcs;
    }
    CHECK(forward_arcs == 6);
    CHECK(forward == doctest::Approx(101.0).epsilon(1e-12));
    for (const Arc& a : dense.arcs()) CHECK(a.length_m == doctest::Approx(101.0 / 3.0));
}

TEST_CASE("densify is idempotent") {
    ProblemInstance inst = tests::tiny(7, 12, 0.5, 0.0, 1);
    RoadNetwork once = densify_stops(inst.network(), 50.0);
    RoadNetwork twice = densify_stops(once, 50.0);
    CHECK(same_network(once, twice));
}

TEST_CASE("preference list at gamma zero is the demand node itself") {
    std::vector<Node> nodes{{0, 0, 0}, {1, 10, 0}};
    std::vector<Arc> arcs{{0, 1, 10.0}, {1, 0, 10.0}};
    RoadNetwork net = RoadNetwork::create(nodes, arcs, 0, {1}, {1});
    auto built = build_preference_lists(net, 0.0);
    REQUIRE(built.prefs.size() == 1);
    CHECK(built.prefs[0].owner == 1);
    CHECK(built.prefs[0].ranked_stops == std::vector<NodeId>{1});
    CHECK(built.prefs[0].walk_distances == std::vector<double>{0.0});
}

TEST_CASE("gamma zero without a matching candidate stop is uncoverable") {
    std::vector<Node> nodes{{0, 0, 0}, {1, 10, 0}, {2, 20, 0}};
    std::vector<Arc> arcs{{0, 1, 10.0}, {1, 0, 10.0}, {1, 2, 10.0}, {2, 1, 10.0}};
    RoadNetwork net = RoadNetwork::create(nodes, arcs, 0, {2}, {1});
    CHECK_THROWS_AS(build_preference_lists(net, 0.0), UncoverableDemandNodeError);
}

TEST_CASE("walking distances rank stops 10/30/60 and gamma 50 keeps two") {
    ProblemInstance inst = tests::line_walk(50.0);
    const PreferenceList& list = inst.pref(1);
    CHECK(list.ranked_stops == std::vector<NodeId>{2, 3});
    CHECK(list.walk_distances[0] == doctest::Approx(10.0));
    CHECK(list.walk_distances[1] == doctest::Approx(30.0));
    // stop 4 at 60 m is pruned from the candidate set entirely
    CHECK_FALSE(inst.network().is_candidate_stop(4));

    // independent check over the same network: exhaustive undirected paths
    for (std::size_t r = 0; r < list.ranked_stops.size(); ++r) {
        CHECK(list.walk_distances[r] ==
              doctest::Approx(brute_shortest(inst.network(), 1, list.ranked_stops[r], true)));
    }
}

TEST_CASE("equal walking distances break ties by ascending node id") {
    std::vector<Node> nodes{{0, 0, 0}, {1, 10, 0}, {6, 10, 20}, {5, 10, -20}};
    std::vector<Arc> arcs;
    auto both = [&](NodeId a, NodeId b, double len) {
        arcs.push_back(Arc{a, b, len});
        arcs.push_back(Arc{b, a, len});
    };
    both(0, 1, 10.0);
    both(1, 6, 20.0);
    both(1, 5, 20.0);
    RoadNetwork net = RoadNetwork::create(nodes, arcs, 0, {5, 6}, {1});
    auto built = build_preference_lists(net, 25.0);
    CHECK(built.prefs[0].ranked_stops == std::vector<NodeId>{5, 6});
}

TEST_CASE("larger gamma produces element-wise superset preference lists") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        ProblemInstance small = tests::tiny(seed, 14, 0.7, 40.0, 2);
        ProblemInstance big = tests::tiny(seed, 14, 0.7, 120.0, 2);
        for (auto& [i, list] : small.prefs()) {
            const auto& bigger = big.pref(i).ranked_stops;
            // same seed generates the same network, so lists must nest
            std::set<NodeId> bigset(bigger.begin(), bigger.end());
            for (NodeId j : list.ranked_stops) CHECK(bigset.count(j) == 1);
            // and the shared prefix (within gamma_small) keeps its order
            CHECK(std::equal(list.ranked_stops.begin(), list.ranked_stops.end(), bigger.begin()));
        }
    }
}

TEST_SUITE_END();
