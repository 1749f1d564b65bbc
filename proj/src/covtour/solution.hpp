#ifndef COVTOUR_SOLUTION_HPP_
#define COVTOUR_SOLUTION_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "covtour/instance.hpp"

namespace covtour {

struct TourStop {
    NodeId node;
    Quantity qty;

    bool operator==(const TourStop&) const = default;
};

struct Tour {
    std::vector<TourStop> stops;  // depot start/end implicit

    Quantity load() const;
    bool operator==(const Tour&) const = default;
};

struct CostBreakdown {
    double travel_s = 0.0;
    double stop_penalty_s = 0.0;
    double total_s = 0.0;
};

struct Solution {
    std::vector<Tour> tours;               // exactly m entries, possibly empty tours
    std::map<NodeId, NodeId> assignment;   // demand node -> serving stop
    CostBreakdown cost;
};

struct DemandAssignment {
    std::map<NodeId, Quantity> load;       // visited stop -> assigned quantity (> 0)
    std::map<NodeId, NodeId> assignment;   // demand node -> serving stop
    std::vector<NodeId> idle_stops;        // visited stops that received nothing
};

// First-visited-preference rule: each demand node goes to the lowest-rank
// element of its list that is in `visited`. Throws UncoveredError.
DemandAssignment assign_demands(const ProblemInstance& inst, const std::set<NodeId>& visited);

// Total cost of a solution: shortest-path travel over the tour legs plus the
// stop penalty per stop event. Does not require feasibility.
CostBreakdown evaluate(const ProblemInstance& inst, const Solution& sol);

struct FeasibilityReport {
    std::vector<std::string> violations;

    bool feasible() const { return violations.empty(); }
    std::string to_string() const;
};

FeasibilityReport check_feasible(const ProblemInstance& inst, const Solution& sol);

std::string save_solution(const ProblemInstance& inst, const Solution& sol);
// Loads a solution file; when `expected_digest` is non-empty the file's
// instance digest must match.
Solution load_solution(const std::string& text, const std::string& expected_digest = {});
std::string solution_instance_digest(const std::string& text);

std::string export_geojson(const ProblemInstance& inst, const Solution& sol);
std::string export_dot(const ProblemInstance& inst, const Solution& sol);

}  // namespace covtour

#endif
