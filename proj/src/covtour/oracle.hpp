#ifndef COVTOUR_ORACLE_HPP_
#define COVTOUR_ORACLE_HPP_

#include <cstdint>

#include "covtour/solution.hpp"

namespace covtour {

struct OracleLimits {
    int max_stops = 12;
    int max_m = 3;
    Quantity max_total_demand = 40 * kQuantityScale;
    std::uint64_t max_explored = 500'000'000;
};

struct OracleResult {
    Solution optimum;
    double cost = 0.0;
    std::uint64_t explored = 0;  // vehicle-assignment combinations evaluated
};

// Exhaustive reference solver for desk-scale instances: enumerates covering
// stop subsets, derives the forced first-visited quantities, and routes each
// vehicle optimally by Held-Karp. allow_splits additionally enumerates the
// ways of spreading a stop's load over several vehicles (integer canonical
// units). Deterministic. Throws LimitExceededError outside the limits and
// InfeasibleError when no feasible solution exists (possible without splits).
OracleResult solve_exact(const ProblemInstance& inst, bool allow_splits, const OracleLimits& limits = {});

}  // namespace covtour

#endif
