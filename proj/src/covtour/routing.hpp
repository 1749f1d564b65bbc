#ifndef COVTOUR_ROUTING_HPP_
#define COVTOUR_ROUTING_HPP_

#include <map>
#include <optional>
#include <vector>

#include "covtour/setcover.hpp"
#include "covtour/solution.hpp"

namespace covtour {

struct CvrpPiece {
    NodeId origin;    // stop the piece belongs to
    Quantity demand;  // centi-units, > 0
};

// CVRP obtained from the a-priori split of a set cover's stop loads.
struct CvrpTask {
    std::vector<CvrpPiece> pieces;
    // (pieces + 1)^2 travel seconds; index 0 is the depot, piece p is p + 1.
    std::vector<std::vector<double>> dist;
    Quantity capacity = 0;
    int fleet = 1;
};

// 20/10/5/1 rule: demands of at least 0.1 Q decompose greedily into pieces of
// 0.2 Q, 0.1 Q, 0.05 Q, 0.01 Q plus at most one sub-0.01 Q remainder; smaller
// demands stay whole. Capacity must be a whole number of canonical units.
std::vector<CvrpPiece> split_demands(const std::map<NodeId, Quantity>& loads, Quantity capacity);

CvrpTask make_cvrp_task(const ProblemInstance& inst, std::vector<CvrpPiece> pieces);

struct CvrpSolution {
    std::vector<std::vector<int>> routes;  // nonempty routes of piece indices
    double total_cost = 0.0;               // travel only
    bool feasible = false;
};

// Hybrid genetic search: giant-tour chromosomes decoded by an optimal
// capacity-aware split into at most `fleet` routes, improved by
// relocate/swap/2-opt/2-opt* local search, with linearly penalized capacity
// excess, repair, and diversity-aware survivor selection. Stops after
// it_no_improve consecutive non-improving iterations.
CvrpSolution solve_cvrp(const CvrpTask& task, Rng& rng, int it_no_improve);

// Turns CVRP routes back into an m-tour solution: consecutive pieces of one
// stop merge, routes pad with empty tours up to m, the assignment comes from
// the cover.
Solution merge_to_solution(const ProblemInstance& inst, const SetCover& cover, const CvrpTask& task,
                           const CvrpSolution& cvrp);

struct CoverAudit {
    std::vector<NodeId> stops;
    double giant_cost = 0.0;
    double routed_cost = 0.0;
    bool feasible = false;
    double best_so_far = 0.0;
};

struct Phase2Result {
    std::optional<Solution> best;
    std::vector<CoverAudit> audits;
};

// Routes every cover of the stream and keeps the cheapest feasible solution;
// covers are registered as treated before being routed.
Phase2Result run_phase2(const ProblemInstance& inst, const std::vector<SetCover>& covers, Rng& rng,
                        int it_no_improve, TreatedRegistry* treated = nullptr);

}  // namespace covtour

#endif
