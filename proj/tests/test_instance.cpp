#include <set>

#include "doctest.h"

#include "covtour/instance.hpp"
#include "support/toys.hpp"

using namespace covtour;

TEST_SUITE_BEGIN("instance");

TEST_CASE("derive_fleet ceiling arithmetic") {
    InstanceParams p;
    p.capacity = 300 * kQuantityScale;
    SUBCASE("no buffer") {
        Fleet f = derive_fleet(1000 * kQuantityScale, p);
        CHECK(f.m == 4);
        CHECK(f.capacity == 300 * kQuantityScale);
    }
    SUBCASE("20 percent buffer raises the tour count") {
        p.buffer = 0.2;  // effective capacity 240
        Fleet f = derive_fleet(1000 * kQuantityScale, p);
        CHECK(f.m == 5);
    }
}

TEST_CASE("derive_fleet from a fixed tour count") {
    InstanceParams p;
    p.m = 2;
    Fleet f = derive_fleet(1000 * kQuantityScale, p);
    CHECK(f.capacity == 500 * kQuantityScale);
    CHECK(static_cast<Quantity>(f.m) * f.capacity >= 1000 * kQuantityScale);
}

TEST_CASE("derive_fleet rejects bad parameters") {
    InstanceParams p;
    p.capacity = 300 * kQuantityScale;
    p.buffer = 1.0;
    CHECK_THROWS_AS(derive_fleet(10 * kQuantityScale, p), InvalidParamsError);
    InstanceParams q;
    q.m = 0;
    CHECK_THROWS_AS(derive_fleet(10 * kQuantityScale, q), InvalidParamsError);
    InstanceParams both;
    both.m = 1;
    both.capacity = kQuantityScale;
    CHECK_THROWS_AS(derive_fleet(10 * kQuantityScale, both), InvalidParamsError);
}

TEST_CASE("fleet derivation never undershoots the total demand") {
    Rng rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const Quantity total = rng.uniform_int(1, 5000) * kQuantityScale;
        InstanceParams p;
        if (rng.coin()) {
            p.m = static_cast<int>(rng.uniform_int(1, 8));
        } else {
            p.capacity = rng.uniform_int(1, 400) * kQuantityScale;
            p.buffer = rng.uniform01() * 0.8;
        }
        const Fleet f = derive_fleet(total, p);
        CHECK(static_cast<Quantity>(f.m) * f.capacity >= total);
    }
}

TEST_CASE("minimal two-node instance round-trips") {
    const std::string text = R"({
      "nodes": [{"id": 0, "x": 0.0, "y": 0.0}, {"id": 1, "x": 10.0, "y": 0.0}],
      "arcs": [{"tail": 0, "head": 1, "length_m": 10.0}, {"tail": 1, "head": 0, "length_m": 10.0}],
      "depot": 0,
      "candidate_stops": [1],
      "demands": [{"node": 1, "qty": 2}],
      "params": {"gamma_m": 0.0, "m": 1, "stop_penalty_s": 5.0, "s_col": 1.0, "s_dep": 1.0}
    })";
    ProblemInstance a = load_instance(text);
    const std::string canonical = save_instance(a);
    ProblemInstance b = load_instance(canonical);
    CHECK(save_instance(b) == canonical);
    CHECK(a.digest() == b.digest());
    CHECK(b.m() == 1);
    CHECK(b.capacity() == 2 * kQuantityScale);
    CHECK(b.demand(1) == 2 * kQuantityScale);
}

TEST_CASE("omitted prefs derive exactly like build_preference_lists") {
    ProblemInstance inst = tests::line_walk(50.0);
    auto rebuilt = build_preference_lists(inst.network(), 50.0);
    REQUIRE(rebuilt.prefs.size() == inst.prefs().size());
    for (const PreferenceList& list : rebuilt.prefs) {
        CHECK(inst.pref(list.owner).ranked_stops == list.ranked_stops);
    }
}

TEST_CASE("explicit prefs are honored verbatim") {
    ProblemInstance toy = tests::toy3();
    CHECK(toy.prefs_explicit());
    CHECK(toy.pref(1).ranked_stops == std::vector<NodeId>{1, 3});
    CHECK(toy.pref(2).ranked_stops == std::vector<NodeId>{2});
    const std::string again = save_instance(load_instance(save_instance(toy)));
    CHECK(again == save_instance(toy));
}

TEST_CASE("over-capacity document is rejected naming the invariant") {
    const std::string text = R"({
      "nodes": [{"id": 0, "x": 0.0, "y": 0.0}, {"id": 1, "x": 10.0, "y": 0.0}],
      "arcs": [{"tail": 0, "head": 1, "length_m": 10.0}, {"tail": 1, "head": 0, "length_m": 10.0}],
      "depot": 0,
      "candidate_stops": [1],
      "demands": [{"node": 1, "qty": 50}],
      "params": {"gamma_m": 0.0, "m": 2, "capacity": {"Q": 20}, "stop_penalty_s": 5.0, "s_col": 1.0, "s_dep": 1.0}
    })";
    CHECK_THROWS_WITH_AS(load_instance(text), doctest::Contains("capacity"), ValidationError);
}

TEST_CASE("unknown keys are rejected") {
    const std::string text = R"({
      "nodes": [{"id": 0, "x": 0.0, "y": 0.0}, {"id": 1, "x": 10.0, "y": 0.0}],
      "arcs": [{"tail": 0, "head": 1, "length_m": 10.0}, {"tail": 1, "head": 0, "length_m": 10.0}],
      "depot": 0,
      "candidate_stops": [1],
      "demands": [{"node": 1, "qty": 2}],
      "params": {"gamma_m": 0.0, "m": 1, "stop_penalty_s": 5.0, "s_col": 1.0, "s_dep": 1.0},
      "comment": "nope"
    })";
    CHECK_THROWS_AS(load_instance(text), ParseError);
}

TEST_CASE("zero or negative demands are rejected") {
    const std::string text = R"({
      "nodes": [{"id": 0, "x": 0.0, "y": 0.0}, {"id": 1, "x": 10.0, "y": 0.0}],
      "arcs": [{"tail": 0, "head": 1, "length_m": 10.0}, {"tail": 1, "head": 0, "length_m": 10.0}],
      "depot": 0,
      "candidate_stops": [1],
      "demands": [{"node": 1, "qty": 0}],
      "params": {"gamma_m": 0.0, "m": 1, "stop_penalty_s": 5.0, "s_col": 1.0, "s_dep": 1.0}
    })";
    CHECK_THROWS_AS(load_instance(text), ValidationError);
}

TEST_CASE("generator is deterministic and honors the demand probability") {
    InstanceParams params;
    params.gamma_m = 0.0;
    params.m = 2;
    ProblemInstance a = generate_sparse(10, 1.0, 42, params);
    ProblemInstance b = generate_sparse(10, 1.0, 42, params);
    CHECK(a.demands().size() == 9);  // every non-depot node
    CHECK(save_instance(a) == save_instance(b));
}

TEST_CASE("demand-node fraction stays in the binomial window") {
    InstanceParams params;
    params.gamma_m = 0.0;
    params.m = 4;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        ProblemInstance inst = generate_sparse(300, 1.0 / 3.0, seed, params);
        const double fraction = static_cast<double>(inst.demands().size()) / 299.0;
        CHECK(fraction >= 0.28);
        CHECK(fraction <= 0.39);
    }
}

TEST_CASE("generated instances always reload cleanly") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        InstanceParams params;
        params.gamma_m = (seed % 2 == 0) ? 60.0 : 0.0;
        params.m = 2;
        ProblemInstance inst = generate_sparse(12, 0.5, seed, params);
        ProblemInstance back = load_instance(save_instance(inst));
        CHECK(back.digest() == inst.digest());
        CHECK(back.total_demand() == inst.total_demand());
        CHECK(back.m() == inst.m());
    }
}

TEST_SUITE_END();
