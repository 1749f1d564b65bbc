#ifndef COVTOUR_NETWORK_HPP_
#define COVTOUR_NETWORK_HPP_

#include <unordered_map>
#include <vector>

#include "covtour/types.hpp"

namespace covtour {

struct Node {
    NodeId id;
    double x;  // meters, planar
    double y;
};

struct Arc {
    NodeId tail;
    NodeId head;
    double length_m;
};

struct SpeedModel {
    double s_col;  // meters/second on regular arcs
    double s_dep;  // meters/second on arcs incident to the depot
};

// Directed road network with a depot, candidate stopping nodes and demand
// nodes. Immutable after construction; operations that change the topology
// return a new network.
class RoadNetwork {
public:
    // Validates all structural invariants: strong connectivity, positive arc
    // lengths, no duplicate arcs, node-set membership of depot / candidate
    // stops / demand nodes, depot not a candidate stop or demand node.
    static RoadNetwork create(std::vector<Node> nodes, std::vector<Arc> arcs, NodeId depot,
                              std::vector<NodeId> candidate_stops, std::vector<NodeId> demand_nodes);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    NodeId depot() const { return depot_; }
    const std::vector<NodeId>& candidate_stops() const { return candidate_stops_; }
    const std::vector<NodeId>& demand_nodes() const { return demand_nodes_; }

    bool has_node(NodeId id) const { return index_.count(id) != 0; }
    int node_index(NodeId id) const;
    const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(node_index(id))]; }
    bool is_candidate_stop(NodeId id) const;
    bool is_demand_node(NodeId id) const;

    // Outgoing (arc index) lists by dense node index.
    const std::vector<std::vector<int>>& out_arcs() const { return out_arcs_; }

    // Returns a copy with the candidate stop set replaced (used by
    // preference-list pruning). The new set must be a subset of the nodes.
    RoadNetwork with_candidate_stops(std::vector<NodeId> stops) const;

private:
    RoadNetwork() = default;
    void build_adjacency();

    std::vector<Node> nodes_;
    std::vector<Arc> arcs_;
    NodeId depot_ = 0;
    std::vector<NodeId> candidate_stops_;  // sorted ascending
    std::vector<NodeId> demand_nodes_;     // sorted ascending
    std::unordered_map<NodeId, int> index_;
    std::vector<std::vector<int>> out_arcs_;
};

// Shortest travel times (seconds) between every ordered pair of terminals
// ({depot} union candidate_stops), with enough predecessor data to expand any
// entry back into the arc sequence that realizes it.
class TravelCostMatrix {
public:
    static TravelCostMatrix compute(const RoadNetwork& network, const SpeedModel& speeds);

    double cost(NodeId from, NodeId to) const;
    const std::vector<NodeId>& terminals() const { return terminals_; }

    // Arc sequence realizing cost(from, to); empty when from == to.
    std::vector<Arc> expand(NodeId from, NodeId to) const;

    // Travel time of a single arc under the speed model used at build time.
    double arc_seconds(const Arc& arc) const;

private:
    const RoadNetwork* network_ = nullptr;
    SpeedModel speeds_{1.0, 1.0};
    std::vector<NodeId> terminals_;
    std::unordered_map<NodeId, int> terminal_index_;
    std::vector<std::vector<double>> cost_;    // [terminal][node dense index]
    std::vector<std::vector<int>> parent_arc_; // [terminal][node dense index] -> arc index or -1
};

// Splits every road segment longer than max_gap into equal-length stretches
// of at most max_gap, registering the splitting points as candidate stops.
// Both directions of a two-way segment (equal lengths) share the new points.
RoadNetwork densify_stops(const RoadNetwork& network, double max_gap_m);

struct PreferenceList {
    NodeId owner = 0;
    std::vector<NodeId> ranked_stops;    // increasing walking distance, ties by id
    std::vector<double> walk_distances;  // meters, parallel to ranked_stops
};

struct PreferenceBuildResult {
    RoadNetwork network;  // candidate stops pruned to the union of the lists
    std::vector<PreferenceList> prefs;
};

// Builds the preference list of every demand node: all candidate stops within
// walking distance gamma over the undirected road graph, closest first.
// Throws UncoverableDemandNodeError if some demand node ends up with an empty
// list.
PreferenceBuildResult build_preference_lists(const RoadNetwork& network, double gamma_m);

// Undirected shortest-path distances (meters) from one source to all nodes,
// by dense node index. Used for walking distances; exposed for tests.
std::vector<double> walking_distances(const RoadNetwork& network, NodeId source);

}  // namespace covtour

#endif
