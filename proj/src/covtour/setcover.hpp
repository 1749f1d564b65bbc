#ifndef COVTOUR_SETCOVER_HPP_
#define COVTOUR_SETCOVER_HPP_

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

#include "covtour/instance.hpp"
#include "covtour/solution.hpp"

namespace covtour {

// Subset of candidate stops covering every demand node, together with the
// demand nodes each stop serves under the first-visited rule.
struct SetCover {
    std::vector<NodeId> stops;                      // ascending
    std::map<NodeId, std::vector<NodeId>> assigned; // W_j; may be empty for stops kept by the giant tour
    double giant_cost = 0.0;

    const std::vector<NodeId>& canonical_key() const { return stops; }
    std::map<NodeId, Quantity> stop_loads(const ProblemInstance& inst) const;
};

// A stop of the cover together with the alternative stops able to cover the
// same assigned demand nodes.
struct AlternativeGroup {
    NodeId owner;
    std::vector<NodeId> members;  // {owner} + alternatives, ascending
};

struct AlternativeGroups {
    std::vector<AlternativeGroup> groups;  // ascending owner
};

// Registry of set covers already routed by phase 2; phase 1 penalizes their
// reconstruction. Thread-safe.
class TreatedRegistry {
public:
    void add(const std::vector<NodeId>& key);
    bool contains(const std::vector<NodeId>& key) const;
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::set<std::vector<NodeId>> keys_;
};

// Bounded best-k container keyed by giant-tour cost, rejecting duplicate
// canonical keys; min and max are O(log n).
class CoverQueue {
public:
    explicit CoverQueue(std::size_t max_length);

    // Inserts unless the cover is a duplicate or the queue is full with a
    // better-or-equal worst element; evicts the current max when full.
    bool offer(SetCover cover);

    std::size_t size() const { return ordered_.size(); }
    std::size_t max_length() const { return max_length_; }
    double min_cost() const;
    double max_cost() const;
    std::vector<SetCover> drain_sorted();  // ascending cost; empties the queue

private:
    using Key = std::vector<NodeId>;
    std::size_t max_length_;
    std::set<std::pair<double, Key>> ordered_;
    std::map<Key, SetCover> covers_;
};

// Randomized greedy set-cover construction with redundancy cleanup
// (uncovered node picked uniformly, covering stop maximizing newly covered
// demand nodes, ties by ascending id).
SetCover construct_set(const ProblemInstance& inst, Rng& rng);

AlternativeGroups compute_alternatives(const ProblemInstance& inst, const SetCover& cover);

struct GiantTour {
    std::vector<NodeId> order;  // visit order, depot implicit at both ends
    SetCover redefined;         // cover redefined to the visited stops, giant_cost set
};

GiantTour build_giant_tour(const ProblemInstance& inst, const SetCover& cover, const AlternativeGroups& groups,
                           Rng& rng);

// Savings of inserting the best member of a group at one end of the giant
// tour: l(depot,G) + l(end,depot) - l(end,candidate) for back insertions and
// the mirrored form for front insertions.
struct InsertionChoice {
    NodeId candidate;
    double savings;
};
InsertionChoice best_group_insertion(const TravelCostMatrix& travel, NodeId depot, NodeId end_node,
                                     const std::vector<NodeId>& members, bool back);

struct Phase1Options {
    int max_iterations = 200;  // consecutive non-improving constructions
    int max_length = 50;       // queue bound
};

using CoverSink = std::function<void(const SetCover&)>;

// Algorithm: construct covers until max_iterations consecutive constructions
// fail to enter the queue; covers already treated by phase 2 compete with
// their giant cost multiplied by 1.5. Emits the queue contents in ascending
// cost order to the sink (if any) and returns them.
std::vector<SetCover> run_phase1(const ProblemInstance& inst, Rng& rng, const Phase1Options& options,
                                 const TreatedRegistry& treated, const CoverSink& sink = {});

}  // namespace covtour

#endif
