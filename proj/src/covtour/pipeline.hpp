#ifndef COVTOUR_PIPELINE_HPP_
#define COVTOUR_PIPELINE_HPP_

#include <chrono>
#include <optional>

#include "covtour/routing.hpp"
#include "covtour/setcover.hpp"

namespace covtour {

struct SolveOptions {
    std::uint64_t seed = 1;
    int max_iterations = 200;
    int max_length = 50;
    int it_no_improve = 10000;
    int workers = 1;
    std::optional<double> time_limit_s;
};

struct SolveStats {
    int rounds = 0;
    std::size_t covers_routed = 0;
    std::vector<CoverAudit> audits;
    double elapsed_s = 0.0;
};

struct SolveResult {
    std::optional<Solution> best;
    SolveStats stats;
};

// Full two-phase pipeline. Without a time limit it runs one
// phase-1 -> phase-2 round; with one, rounds repeat until the deadline and
// reconstructed treated covers compete at 1.5x their giant cost. workers > 1
// routes covers concurrently (at the price of run-to-run determinism).
SolveResult solve_instance(const ProblemInstance& inst, const SolveOptions& options);

}  // namespace covtour

#endif
