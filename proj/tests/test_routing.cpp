#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"

#include "covtour/routing.hpp"
#include "support/toys.hpp"

using namespace covtour;

namespace {

std::vector<Quantity> piece_values(const std::vector<CvrpPiece>& pieces, NodeId stop) {
    std::vector<Quantity> out;
    for (const CvrpPiece& p : pieces)
        if (p.origin == stop) out.push_back(p.demand);
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("routing");

TEST_CASE("the 20/10/5/1 rule splits 76 of 100 into the worked pieces") {
    const auto pieces = split_demands({{7, 76 * kQuantityScale}}, 100 * kQuantityScale);
    std::vector<Quantity> got = piece_values(pieces, 7);
    const std::vector<Quantity> expect{20 * kQuantityScale, 20 * kQuantityScale, 20 * kQuantityScale,
                                       10 * kQuantityScale, 5 * kQuantityScale,  1 * kQuantityScale};
    CHECK(got == expect);
}

TEST_CASE("demands below a tenth of the capacity stay whole") {
    const auto pieces = split_demands({{7, 9 * kQuantityScale}}, 100 * kQuantityScale);
    REQUIRE(pieces.size() == 1);
    CHECK(pieces[0].demand == 9 * kQuantityScale);
}

TEST_CASE("piece counts match an independent evaluation of the recurrences") {
    Rng rng(2024);
    for (int trial = 0; trial < 2000; ++trial) {
        const Quantity q_units = rng.uniform_int(1, 120);
        const Quantity capacity = q_units * kQuantityScale;
        const Quantity d = rng.uniform_int(1, q_units * kQuantityScale);  // centi, <= Q
        const auto pieces = split_demands({{1, d}}, capacity);

        if (10 * d < capacity) {
            REQUIRE(pieces.size() == 1);
            CHECK(pieces[0].demand == d);
            continue;
        }
        // independent recurrence walk: m_c = max{ m : (c/100) Q m <= rest }
        Quantity rest = d;
        std::vector<Quantity> expect;
        for (const Quantity frac : {20, 10, 5, 1}) {
            const Quantity piece = frac * q_units;  // centi-units
            Quantity count = 0;
            while ((count + 1) * piece <= rest) ++count;
            rest -= count * piece;
            for (Quantity c = 0; c < count; ++c) expect.push_back(piece);
        }
        if (rest > 0) expect.push_back(rest);
        CHECK(piece_values(pieces, 1) == expect);
    }
}

TEST_CASE("splitting conserves quantity exactly and respects the bounds") {
    Rng rng(55);
    for (int trial = 0; trial < 500; ++trial) {
        const Quantity q_units = rng.uniform_int(1, 300);
        const Quantity capacity = q_units * kQuantityScale;
        std::map<NodeId, Quantity> loads;
        const int stops = 1 + static_cast<int>(rng.uniform_index(4));
        for (int s = 0; s < stops; ++s) loads[static_cast<NodeId>(s)] = rng.uniform_int(1, capacity);
        const auto pieces = split_demands(loads, capacity);
        std::map<NodeId, Quantity> sums;
        std::map<NodeId, int> tiny_pieces;
        for (const CvrpPiece& p : pieces) {
            sums[p.origin] += p.demand;
            CHECK(5 * p.demand <= capacity);  // <= 0.2 Q
            if (100 * p.demand < capacity) ++tiny_pieces[p.origin];
        }
        CHECK(sums == loads);
        for (auto& [stop, count] : tiny_pieces) CHECK(count <= 1);
    }
}

TEST_CASE("a single piece rides out and back") {
    Rng rng(3);
    CvrpTask task;
    task.pieces = {{5, 2 * kQuantityScale}};
    task.capacity = 10 * kQuantityScale;
    task.fleet = 2;
    task.dist = {{0.0, 7.0}, {9.0, 0.0}};
    const CvrpSolution sol = solve_cvrp(task, rng, 50);
    REQUIRE(sol.feasible);
    REQUIRE(sol.routes.size() == 1);
    CHECK(sol.routes[0] == std::vector<int>{0});
    CHECK(sol.total_cost == doctest::Approx(16.0));
}

TEST_CASE("small tasks are solved to the brute-force optimum") {
    int optimal = 0;
    int total = 0;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        Rng gen(seed * 77);
        CvrpTask task = tests::random_cvrp_task(gen, 3, 10, 2, 4);
        REQUIRE(task.pieces.size() <= 8);
        ++total;
        const double reference = tests::brute_cvrp_cost(task);
        double best = std::numeric_limits<double>::infinity();
        for (std::uint64_t s = 0; s < 4; ++s) {
            Rng rng(seed * 1000 + s);
            const CvrpSolution sol = solve_cvrp(task, rng, 150);
            REQUIRE(sol.feasible);
            CHECK(sol.total_cost >= reference - 1e-6);
            best = std::min(best, sol.total_cost);
        }
        if (best <= reference + 1e-6) ++optimal;
    }
    CHECK(total == 25);
    CHECK(optimal == total);
}

TEST_CASE("solver honors capacity on every seed") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng gen(seed);
        CvrpTask task = tests::random_cvrp_task(gen, 4, 12, 3);
        Rng rng(seed + 99);
        const CvrpSolution sol = solve_cvrp(task, rng, 120);
        REQUIRE(sol.feasible);
        for (const auto& route : sol.routes) {
            Quantity load = 0;
            for (int p : route) load += task.pieces[static_cast<std::size_t>(p)].demand;
            CHECK(load <= task.capacity);
        }
        CHECK(sol.routes.size() <= static_cast<std::size_t>(task.fleet));
    }
}

TEST_CASE("adjacent pieces of one stop cost a zero leg") {
    Rng rng(5);
    CvrpTask task;
    task.pieces = {{4, 2 * kQuantityScale}, {4, 2 * kQuantityScale}};
    task.capacity = 4 * kQuantityScale;
    task.fleet = 1;
    task.dist = {{0.0, 10.0, 10.0}, {10.0, 0.0, 0.0}, {10.0, 0.0, 0.0}};
    const CvrpSolution sol = solve_cvrp(task, rng, 60);
    REQUIRE(sol.feasible);
    REQUIRE(sol.routes.size() == 1);
    CHECK(sol.routes[0].size() == 2);
    CHECK(sol.total_cost == doctest::Approx(20.0));
}

TEST_CASE("solve_cvrp is deterministic per seed") {
    Rng gen(31);
    CvrpTask task = tests::random_cvrp_task(gen, 4, 10, 2);
    Rng a(9), b(9);
    const CvrpSolution sa = solve_cvrp(task, a, 100);
    const CvrpSolution sb = solve_cvrp(task, b, 100);
    CHECK(sa.routes == sb.routes);
    CHECK(sa.total_cost == sb.total_cost);
}

TEST_CASE("merging collapses consecutive pieces of a stop") {
    ProblemInstance toy = tests::toy3();
    SetCover cover;
    cover.stops = {1, 2};
    cover.assigned[1] = {1};
    cover.assigned[2] = {2};

    CvrpTask task;
    task.pieces = {{1, 2 * kQuantityScale}, {1, 1 * kQuantityScale}, {2, 4 * kQuantityScale}};
    task.capacity = toy.capacity();
    task.fleet = toy.m();
    CvrpSolution cvrp;
    cvrp.routes = {{0, 1}, {2}};
    cvrp.feasible = true;
    const Solution sol = merge_to_solution(toy, cover, task, cvrp);
    REQUIRE(sol.tours.size() == 2);
    REQUIRE(sol.tours[0].stops.size() == 1);
    CHECK(sol.tours[0].stops[0].node == 1);
    CHECK(sol.tours[0].stops[0].qty == 3 * kQuantityScale);
    CHECK(check_feasible(toy, sol).feasible());
}

TEST_CASE("pieces of one stop in two routes make a legitimate split") {
    ProblemInstance toy = tests::toy3();
    SetCover cover;
    cover.stops = {2, 3};
    cover.assigned[3] = {1};
    cover.assigned[2] = {2};

    CvrpTask task;
    task.pieces = {{3, 3 * kQuantityScale}, {2, 1 * kQuantityScale}, {2, 3 * kQuantityScale}};
    task.capacity = toy.capacity();
    task.fleet = toy.m();
    CvrpSolution cvrp;
    cvrp.routes = {{0, 1}, {2}};  // stop 2 served by both tours
    cvrp.feasible = true;
    const Solution sol = merge_to_solution(toy, cover, task, cvrp);
    CHECK(check_feasible(toy, sol).feasible());
    int visits_of_2 = 0;
    Quantity total = 0;
    for (const Tour& t : sol.tours) {
        for (const TourStop& s : t.stops) {
            total += s.qty;
            if (s.node == 2) ++visits_of_2;
        }
    }
    CHECK(visits_of_2 == 2);
    CHECK(total == toy.total_demand());
}

TEST_CASE("phase 2 routes a single cover into a feasible best solution") {
    ProblemInstance inst = tests::tiny(61, 10, 0.7, 0.0, 2);
    Rng rng(14);
    TreatedRegistry treated;
    const auto covers = run_phase1(inst, rng, Phase1Options{20, 1}, treated);
    REQUIRE(covers.size() == 1);
    const Phase2Result result = run_phase2(inst, covers, rng, 150, &treated);
    REQUIRE(result.best.has_value());
    CHECK(check_feasible(inst, *result.best).feasible());
    CHECK(result.audits.size() == 1);
    CHECK(result.best->cost.total_s == doctest::Approx(result.audits[0].routed_cost));
    CHECK(treated.contains(covers[0].canonical_key()));
}

TEST_CASE("phase 2 keeps the cheapest routed cover and is monotone") {
    ProblemInstance inst = tests::tiny(62, 13, 0.7, 70.0, 2);
    Rng rng(15);
    TreatedRegistry treated;
    const auto covers = run_phase1(inst, rng, Phase1Options{60, 6}, treated);
    REQUIRE(covers.size() >= 2);
    const Phase2Result result = run_phase2(inst, covers, rng, 150, &treated);
    REQUIRE(result.best.has_value());
    double min_routed = std::numeric_limits<double>::infinity();
    double running = std::numeric_limits<double>::infinity();
    for (const CoverAudit& audit : result.audits) {
        if (audit.feasible) min_routed = std::min(min_routed, audit.routed_cost);
        CHECK(audit.best_so_far <= running + 1e-12);
        running = audit.best_so_far;
    }
    CHECK(result.best->cost.total_s == doctest::Approx(min_routed));
}

TEST_SUITE_END();
