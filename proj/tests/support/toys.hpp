#ifndef COVTOUR_TESTS_TOYS_HPP_
#define COVTOUR_TESTS_TOYS_HPP_

#include <string>

#include "covtour/instance.hpp"
#include "covtour/routing.hpp"
#include "covtour/solution.hpp"

namespace covtour::tests {

std::string tests_dir();
std::string fixture_path(const std::string& name);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

// Committed 4-node fixture: square road cycle, depot 0, stops {1,2,3},
// demand at 1 (3 units) and 2 (4 units), m = 2, Q = 4 (derived).
ProblemInstance toy3();

// Line 1-2-3-4 with segment lengths 10/20/30 plus a depot spur and a long
// detour node; demand at node 1, stops {2,3,4} at walking distances 10/30/60.
ProblemInstance line_walk(double gamma);

// Small generated instance suitable for the oracle.
ProblemInstance tiny(std::uint64_t seed, int n, double demand_prob, double gamma, int m);

// Random feasible solution: random cover, sequential capacity packing with
// splits at tour boundaries.
Solution random_feasible_solution(const ProblemInstance& inst, Rng& rng);

// Exhaustive CVRP reference: optimal partition of the pieces into at most
// `fleet` capacity-feasible routes, each ordered by Held-Karp. Only for tiny
// piece counts.
double brute_cvrp_cost(const CvrpTask& task);

// Standalone task on random planar points: up to stop_count stops with loads
// of 1..max_load_units canonical units each, split by the 20/10/5/1 rule.
CvrpTask random_cvrp_task(Rng& rng, int stop_count, Quantity capacity_units, int fleet,
                          Quantity max_load_units = 9);

}  // namespace covtour::tests

#endif
