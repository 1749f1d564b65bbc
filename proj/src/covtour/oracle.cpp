#include "covtour/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <optional>
#include <queue>

namespace covtour {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Held-Karp tables over subsets of the global stop list: best[sub][last] is
// the cheapest depot-anchored path visiting exactly `sub` and ending at
// `last`; cycle[sub] closes it back to the depot.
struct HeldKarp {
    int v = 0;
    std::vector<std::vector<double>> best;
    std::vector<std::vector<int>> parent;
    std::vector<double> cycle;
    std::vector<int> cycle_last;

    void build(const std::vector<NodeId>& stops, const TravelCostMatrix& travel, NodeId depot) {
        v = static_cast<int>(stops.size());
        const std::size_t masks = std::size_t{1} << v;
        best.assign(masks, std::vector<double>(static_cast<std::size_t>(v), kInf));
        parent.assign(masks, std::vector<int>(static_cast<std::size_t>(v), -1));
        cycle.assign(masks, kInf);
        cycle_last.assign(masks, -1);
        cycle[0] = 0.0;
        for (int j = 0; j < v; ++j)
            best[std::size_t{1} << j][static_cast<std::size_t>(j)] = travel.cost(depot, stops[static_cast<std::size_t>(j)]);
        for (std::size_t sub = 1; sub < masks; ++sub) {
            for (int last = 0; last < v; ++last) {
                if (!(sub >> last & 1)) continue;
                const double cur = best[sub][static_cast<std::size_t>(last)];
                if (cur == kInf) continue;
                const double close = cur + travel.cost(stops[static_cast<std::size_t>(last)], depot);
                if (close < cycle[sub]) {
                    cycle[sub] = close;
                    cycle_last[sub] = last;
                }
                for (int next = 0; next < v; ++next) {
                    if (sub >> next & 1) continue;
                    const std::size_t nsub = sub | (std::size_t{1} << next);
                    const double cand = cur + travel.cost(stops[static_cast<std::size_t>(last)],
                                                          stops[static_cast<std::size_t>(next)]);
                    if (cand < best[nsub][static_cast<std::size_t>(next)]) {
                        best[nsub][static_cast<std::size_t>(next)] = cand;
                        parent[nsub][static_cast<std::size_t>(next)] = last;
                    }
                }
            }
        }
    }

    // Stop indices in optimal visiting order for subset `sub`.
    std::vector<int> order(std::size_t sub) const {
        std::vector<int> out;
        int last = cycle_last[sub];
        std::size_t cur = sub;
        while (last >= 0) {
            out.push_back(last);
            const int prev = parent[cur][static_cast<std::size_t>(last)];
            cur &= ~(std::size_t{1} << last);
            last = prev;
        }
        std::reverse(out.begin(), out.end());
        return out;
    }
};

// Integral transportation feasibility with one reserved unit per (stop,
// vehicle) pair; returns the allocation in canonical units or nullopt.
std::optional<std::vector<std::vector<Quantity>>> allocate_units(const std::vector<Quantity>& supplies_units,
                                                                 const std::vector<std::vector<int>>& visitors,
                                                                 int m, Quantity cap_units) {
    const int v = static_cast<int>(supplies_units.size());
    std::vector<std::vector<Quantity>> alloc(static_cast<std::size_t>(v),
                                             std::vector<Quantity>(static_cast<std::size_t>(m), 0));
    std::vector<Quantity> vehicle_load(static_cast<std::size_t>(m), 0);
    std::vector<Quantity> remaining(static_cast<std::size_t>(v), 0);
    for (int j = 0; j < v; ++j) {
        const auto& vis = visitors[static_cast<std::size_t>(j)];
        if (supplies_units[static_cast<std::size_t>(j)] < static_cast<Quantity>(vis.size())) return std::nullopt;
        for (int k : vis) {
            alloc[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = 1;
            vehicle_load[static_cast<std::size_t>(k)] += 1;
        }
        remaining[static_cast<std::size_t>(j)] =
            supplies_units[static_cast<std::size_t>(j)] - static_cast<Quantity>(vis.size());
    }
    for (int k = 0; k < m; ++k)
        if (vehicle_load[static_cast<std::size_t>(k)] > cap_units) return std::nullopt;

    // Greedy fill, then augmenting paths stop -> vehicle -> stop -> vehicle.
    for (int j = 0; j < v; ++j) {
        for (int k : visitors[static_cast<std::size_t>(j)]) {
            const Quantity room = cap_units - vehicle_load[static_cast<std::size_t>(k)];
            const Quantity push = std::min(room, remaining[static_cast<std::size_t>(j)]);
            alloc[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] += push;
            vehicle_load[static_cast<std::size_t>(k)] += push;
            remaining[static_cast<std::size_t>(j)] -= push;
        }
    }
    for (int j = 0; j < v; ++j) {
        while (remaining[static_cast<std::size_t>(j)] > 0) {
            // BFS over residual graph: start at stop j, alternate to vehicles
            // with spare cap through stops that can release units.
            std::vector<int> veh_from_stop(static_cast<std::size_t>(m), -1);
            std::vector<int> stop_from_veh(static_cast<std::size_t>(v), -1);
            std::queue<int> stops_q;
            stops_q.push(j);
            std::vector<char> stop_seen(static_cast<std::size_t>(v), 0);
            stop_seen[static_cast<std::size_t>(j)] = 1;
            int free_vehicle = -1;
            while (!stops_q.empty() && free_vehicle < 0) {
                const int js = stops_q.front();
                stops_q.pop();
                for (int k : visitors[static_cast<std::size_t>(js)]) {
                    if (veh_from_stop[static_cast<std::size_t>(k)] >= 0) continue;
                    veh_from_stop[static_cast<std::size_t>(k)] = js;
                    if (vehicle_load[static_cast<std::size_t>(k)] < cap_units) {
                        free_vehicle = k;
                        break;
                    }
                    for (int j2 = 0; j2 < v; ++j2) {
                        if (stop_seen[static_cast<std::size_t>(j2)]) continue;
                        // j2 can release a unit from vehicle k if it carries
                        // more than the reserved one there.
                        if (alloc[static_cast<std::size_t>(j2)][static_cast<std::size_t>(k)] > 1) {
                            stop_seen[static_cast<std::size_t>(j2)] = 1;
                            stop_from_veh[static_cast<std::size_t>(j2)] = k;
                            stops_q.push(j2);
                        }
                    }
                }
            }
            if (free_vehicle < 0) return std::nullopt;
            // Push one unit along the alternating path.
            int k = free_vehicle;
            while (true) {
                const int js = veh_from_stop[static_cast<std::size_t>(k)];
                alloc[static_cast<std::size_t>(js)][static_cast<std::size_t>(k)] += 1;
                vehicle_load[static_cast<std::size_t>(k)] += 1;
                if (js == j) break;
                const int kprev = stop_from_veh[static_cast<std::size_t>(js)];
                alloc[static_cast<std::size_t>(js)][static_cast<std::size_t>(kprev)] -= 1;
                vehicle_load[static_cast<std::size_t>(kprev)] -= 1;
                k = kprev;
            }
            remaining[static_cast<std::size_t>(j)] -= 1;
        }
    }
    return alloc;
}

}  // namespace

OracleResult solve_exact(const ProblemInstance& inst, bool allow_splits, const OracleLimits& limits) {
    const auto& stops = inst.network().candidate_stops();
    const int s = static_cast<int>(stops.size());
    if (s > limits.max_stops)
        throw LimitExceededError("instance has " + std::to_string(s) + " candidate stops, oracle limit is " +
                                 std::to_string(limits.max_stops));
    if (inst.m() > limits.max_m)
        throw LimitExceededError("instance needs m = " + std::to_string(inst.m()) + " tours, oracle limit is " +
                                 std::to_string(limits.max_m));
    if (!inst.integer_demands()) throw LimitExceededError("oracle requires integer demands in canonical units");
    if (inst.total_demand() > limits.max_total_demand)
        throw LimitExceededError("total demand exceeds the oracle limit");

    const int m = inst.m();
    const Quantity cap_units = inst.capacity() / kQuantityScale;
    const NodeId depot = inst.network().depot();
    const double r = inst.stop_penalty_s();

    HeldKarp hk;
    hk.build(stops, inst.travel(), depot);

    std::unordered_map<NodeId, int> stop_bit;
    for (int j = 0; j < s; ++j) stop_bit.emplace(stops[static_cast<std::size_t>(j)], j);
    std::vector<std::size_t> pref_mask;
    std::vector<NodeId> demand_ids;
    for (auto& [i, list] : inst.prefs()) {
        std::size_t mask = 0;
        for (NodeId j : list.ranked_stops) mask |= std::size_t{1} << stop_bit.at(j);
        pref_mask.push_back(mask);
        demand_ids.push_back(i);
    }

    OracleResult result;
    double best_cost = kInf;
    bool found = false;

    struct BestPick {
        std::size_t mask = 0;
        std::vector<int> visited;                  // stop indices with positive load
        std::vector<std::vector<int>> veh_stops;   // per vehicle: visited-list positions
        std::vector<std::vector<Quantity>> alloc;  // [visited pos][vehicle] canonical units
    } best_pick;

    const std::size_t all_masks = std::size_t{1} << s;
    for (std::size_t mask = 1; mask < all_masks; ++mask) {
        bool covers = true;
        for (std::size_t w = 0; w < pref_mask.size(); ++w) {
            if ((mask & pref_mask[w]) == 0) {
                covers = false;
                break;
            }
        }
        if (!covers) continue;

        // Forced quantities under the first-visited rule.
        std::vector<Quantity> load_units(static_cast<std::size_t>(s), 0);
        for (std::size_t w = 0; w < demand_ids.size(); ++w) {
            const auto& list = inst.pref(demand_ids[w]).ranked_stops;
            for (NodeId j : list) {
                const int bit = stop_bit.at(j);
                if (mask >> bit & 1) {
                    load_units[static_cast<std::size_t>(bit)] += inst.demand(demand_ids[w]) / kQuantityScale;
                    break;
                }
            }
        }
        // Skip dominated covers where some selected stop serves nothing: the
        // same solution exists under the subset without that stop.
        bool tight = true;
        std::vector<int> visited;
        for (int j = 0; j < s; ++j) {
            if (!(mask >> j & 1)) continue;
            if (load_units[static_cast<std::size_t>(j)] == 0) {
                tight = false;
                break;
            }
            visited.push_back(j);
        }
        if (!tight) continue;

        const int v = static_cast<int>(visited.size());
        std::vector<Quantity> supplies;
        for (int p = 0; p < v; ++p) supplies.push_back(load_units[static_cast<std::size_t>(visited[static_cast<std::size_t>(p)])]);

        // Enumerate which vehicles visit each stop. Without splits these are
        // set partitions into at most m unlabeled groups (restricted growth
        // strings); with splits every stop picks a nonempty vehicle subset.
        std::vector<int> choice(static_cast<std::size_t>(v), 0);
        const int choices_per_stop = allow_splits ? (1 << m) - 1 : m;

        auto evaluate_choice = [&]() {
            if (++result.explored > limits.max_explored)
                throw LimitExceededError("oracle exploration budget exhausted");
            std::vector<std::vector<int>> veh_stops(static_cast<std::size_t>(m));
            std::vector<std::vector<int>> visitors(static_cast<std::size_t>(v));
            for (int p = 0; p < v; ++p) {
                const int c = choice[static_cast<std::size_t>(p)];
                if (allow_splits) {
                    for (int k = 0; k < m; ++k)
                        if ((c + 1) >> k & 1) {
                            veh_stops[static_cast<std::size_t>(k)].push_back(p);
                            visitors[static_cast<std::size_t>(p)].push_back(k);
                        }
                } else {
                    veh_stops[static_cast<std::size_t>(c)].push_back(p);
                    visitors[static_cast<std::size_t>(p)].push_back(c);
                }
            }
            // Cheap cost bound first, allocation feasibility second.
            double cost = 0.0;
            int stop_events = 0;
            for (int k = 0; k < m; ++k) {
                std::size_t sub = 0;
                for (int p : veh_stops[static_cast<std::size_t>(k)])
                    sub |= std::size_t{1} << visited[static_cast<std::size_t>(p)];
                cost += hk.cycle[sub];
                stop_events += static_cast<int>(veh_stops[static_cast<std::size_t>(k)].size());
            }
            cost += r * stop_events;
            if (cost >= best_cost) return;

            std::optional<std::vector<std::vector<Quantity>>> alloc;
            if (allow_splits) {
                alloc = allocate_units(supplies, visitors, m, cap_units);
                if (!alloc) return;
            } else {
                std::vector<Quantity> veh_load(static_cast<std::size_t>(m), 0);
                for (int p = 0; p < v; ++p)
                    veh_load[static_cast<std::size_t>(visitors[static_cast<std::size_t>(p)][0])] +=
                        supplies[static_cast<std::size_t>(p)];
                for (int k = 0; k < m; ++k)
                    if (veh_load[static_cast<std::size_t>(k)] > cap_units) return;
                alloc.emplace(static_cast<std::size_t>(v), std::vector<Quantity>(static_cast<std::size_t>(m), 0));
                for (int p = 0; p < v; ++p)
                    (*alloc)[static_cast<std::size_t>(p)][static_cast<std::size_t>(visitors[static_cast<std::size_t>(p)][0])] =
                        supplies[static_cast<std::size_t>(p)];
            }

            best_cost = cost;
            found = true;
            best_pick.mask = mask;
            best_pick.visited = visited;
            best_pick.veh_stops = veh_stops;
            best_pick.alloc = std::move(*alloc);
        };

        if (allow_splits) {
            while (true) {
                evaluate_choice();
                int p = 0;
                while (p < v && choice[static_cast<std::size_t>(p)] == choices_per_stop - 1) {
                    choice[static_cast<std::size_t>(p)] = 0;
                    ++p;
                }
                if (p == v) break;
                ++choice[static_cast<std::size_t>(p)];
            }
        } else {
            // Restricted growth strings: choice[p] <= 1 + max(choice[0..p-1]).
            std::vector<int> prefix_max(static_cast<std::size_t>(v), 0);
            while (true) {
                evaluate_choice();
                int p = v - 1;
                for (; p >= 0; --p) {
                    const int bound = p == 0 ? 0 : std::min(m - 1, prefix_max[static_cast<std::size_t>(p - 1)] + 1);
                    if (choice[static_cast<std::size_t>(p)] < bound) break;
                }
                if (p < 0) break;
                ++choice[static_cast<std::size_t>(p)];
                prefix_max[static_cast<std::size_t>(p)] =
                    p == 0 ? choice[0] : std::max(prefix_max[static_cast<std::size_t>(p - 1)], choice[static_cast<std::size_t>(p)]);
                for (int q = p + 1; q < v; ++q) {
                    choice[static_cast<std::size_t>(q)] = 0;
                    prefix_max[static_cast<std::size_t>(q)] = prefix_max[static_cast<std::size_t>(q - 1)];
                }
            }
        }
    }

    if (!found)
        throw InfeasibleError(allow_splits ? "no feasible solution exists"
                                           : "no feasible no-split solution exists");

    // Rebuild the winning solution.
    Solution sol;
    for (int k = 0; k < m; ++k) {
        Tour tour;
        std::size_t sub = 0;
        std::unordered_map<int, int> pos_of_stop;  // stop index -> visited pos
        for (int p : best_pick.veh_stops[static_cast<std::size_t>(k)]) {
            sub |= std::size_t{1} << best_pick.visited[static_cast<std::size_t>(p)];
            pos_of_stop[best_pick.visited[static_cast<std::size_t>(p)]] = p;
        }
        for (int stop_idx : hk.order(sub)) {
            const int p = pos_of_stop.at(stop_idx);
            const Quantity q = best_pick.alloc[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)];
            assert(q > 0);
            tour.stops.push_back(TourStop{stops[static_cast<std::size_t>(stop_idx)], q * kQuantityScale});
        }
        sol.tours.push_back(std::move(tour));
    }
    for (std::size_t w = 0; w < demand_ids.size(); ++w) {
        for (NodeId j : inst.pref(demand_ids[w]).ranked_stops) {
            if (best_pick.mask >> stop_bit.at(j) & 1) {
                sol.assignment[demand_ids[w]] = j;
                break;
            }
        }
    }
    sol.cost = evaluate(inst, sol);
    result.optimum = std::move(sol);
    result.cost = result.optimum.cost.total_s;
    return result;
}

}  // namespace covtour
