#include "covtour/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>

namespace covtour {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<NodeId> sorted_unique(std::vector<NodeId> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

}  // namespace

int RoadNetwork::node_index(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw ValidationError("unknown node id " + std::to_string(id));
    return it->second;
}

bool RoadNetwork::is_candidate_stop(NodeId id) const {
    return std::binary_search(candidate_stops_.begin(), candidate_stops_.end(), id);
}

bool RoadNetwork::is_demand_node(NodeId id) const {
    return std::binary_search(demand_nodes_.begin(), demand_nodes_.end(), id);
}

void RoadNetwork::build_adjacency() {
    index_.clear();
    index_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!index_.emplace(nodes_[i].id, static_cast<int>(i)).second)
            throw ValidationError("duplicate node id " + std::to_string(nodes_[i].id));
    }
    out_arcs_.assign(nodes_.size(), {});
    for (std::size_t a = 0; a < arcs_.size(); ++a) {
        out_arcs_[static_cast<std::size_t>(node_index(arcs_[a].tail))].push_back(static_cast<int>(a));
    }
}

RoadNetwork RoadNetwork::create(std::vector<Node> nodes, std::vector<Arc> arcs, NodeId depot,
                                std::vector<NodeId> candidate_stops, std::vector<NodeId> demand_nodes) {
    RoadNetwork net;
    net.nodes_ = std::move(nodes);
    net.arcs_ = std::move(arcs);
    net.depot_ = depot;
    net.candidate_stops_ = sorted_unique(std::move(candidate_stops));
    net.demand_nodes_ = sorted_unique(std::move(demand_nodes));
    net.build_adjacency();

    if (!net.has_node(depot)) throw ValidationError("depot " + std::to_string(depot) + " is not a node");
    for (NodeId j : net.candidate_stops_)
        if (!net.has_node(j)) throw ValidationError("candidate stop " + std::to_string(j) + " is not a node");
    for (NodeId i : net.demand_nodes_)
        if (!net.has_node(i)) throw ValidationError("demand node " + std::to_string(i) + " is not a node");
    if (net.is_candidate_stop(depot)) throw ValidationError("depot cannot be a candidate stop");
    if (net.is_demand_node(depot)) throw ValidationError("depot cannot be a demand node");

    std::set<std::pair<NodeId, NodeId>> seen;
    for (const Arc& a : net.arcs_) {
        if (!net.has_node(a.tail) || !net.has_node(a.head))
            throw ValidationError("arc endpoints must be nodes");
        if (a.tail == a.head) throw ValidationError("self-loop arc at node " + std::to_string(a.tail));
        if (!(a.length_m > 0.0)) throw ValidationError("non-positive arc length on (" + std::to_string(a.tail) +
                                                       ", " + std::to_string(a.head) + ")");
        if (!seen.emplace(a.tail, a.head).second)
            throw ValidationError("duplicate arc (" + std::to_string(a.tail) + ", " + std::to_string(a.head) + ")");
    }

    // Strong connectivity: depot reaches everything forward and backward.
    auto bfs = [&](bool forward) {
        std::vector<char> vis(net.nodes_.size(), 0);
        std::vector<std::vector<int>> adj(net.nodes_.size());
        for (const Arc& a : net.arcs_) {
            int u = net.node_index(forward ? a.tail : a.head);
            int v = net.node_index(forward ? a.head : a.tail);
            adj[static_cast<std::size_t>(u)].push_back(v);
        }
        std::queue<int> q;
        int s = net.node_index(net.depot_);
        vis[static_cast<std::size_t>(s)] = 1;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj[static_cast<std::size_t>(u)])
                if (!vis[static_cast<std::size_t>(v)]) {
                    vis[static_cast<std::size_t>(v)] = 1;
                    q.push(v);
                }
        }
        return vis;
    };
    auto fwd = bfs(true);
    auto bwd = bfs(false);
    for (std::size_t i = 0; i < net.nodes_.size(); ++i) {
        if (!fwd[i]) throw UnreachableError(net.depot_, net.nodes_[i].id);
        if (!bwd[i]) throw UnreachableError(net.nodes_[i].id, net.depot_);
    }
    return net;
}

RoadNetwork RoadNetwork::with_candidate_stops(std::vector<NodeId> stops) const {
    RoadNetwork net(*this);
    net.candidate_stops_ = sorted_unique(std::move(stops));
    for (NodeId j : net.candidate_stops_)
        if (!net.has_node(j)) throw ValidationError("candidate stop " + std::to_string(j) + " is not a node");
    if (net.is_candidate_stop(net.depot_)) throw ValidationError("depot cannot be a candidate stop");
    return net;
}

double TravelCostMatrix::arc_seconds(const Arc& arc) const {
    const bool depot_arc = arc.tail == network_->depot() || arc.head == network_->depot();
    return arc.length_m / (depot_arc ? speeds_.s_dep : speeds_.s_col);
}

TravelCostMatrix TravelCostMatrix::compute(const RoadNetwork& network, const SpeedModel& speeds) {
    if (!(speeds.s_col > 0.0) || !(speeds.s_dep > 0.0)) throw ValidationError("speeds must be positive");
    TravelCostMatrix m;
    m.network_ = &network;
    m.speeds_ = speeds;
    m.terminals_.push_back(network.depot());
    for (NodeId j : network.candidate_stops()) m.terminals_.push_back(j);
    for (std::size_t t = 0; t < m.terminals_.size(); ++t)
        m.terminal_index_.emplace(m.terminals_[t], static_cast<int>(t));

    const std::size_t n = network.nodes().size();
    m.cost_.assign(m.terminals_.size(), std::vector<double>(n, kInf));
    m.parent_arc_.assign(m.terminals_.size(), std::vector<int>(n, -1));

    for (std::size_t t = 0; t < m.terminals_.size(); ++t) {
        auto& dist = m.cost_[t];
        auto& parent = m.parent_arc_[t];
        const int src = network.node_index(m.terminals_[t]);
        using Entry = std::pair<double, int>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
        dist[static_cast<std::size_t>(src)] = 0.0;
        heap.emplace(0.0, src);
        while (!heap.empty()) {
            auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[static_cast<std::size_t>(u)]) continue;
            for (int ai : network.out_arcs()[static_cast<std::size_t>(u)]) {
                const Arc& a = network.arcs()[static_cast<std::size_t>(ai)];
                const int v = network.node_index(a.head);
                const double nd = d + m.arc_seconds(a);
                if (nd < dist[static_cast<std::size_t>(v)]) {
                    dist[static_cast<std::size_t>(v)] = nd;
                    parent[static_cast<std::size_t>(v)] = ai;
                    heap.emplace(nd, v);
                }
            }
        }
        for (std::size_t v = 0; v < n; ++v)
            if (dist[v] == kInf) throw UnreachableError(m.terminals_[t], network.nodes()[v].id);
    }
    return m;
}

double TravelCostMatrix::cost(NodeId from, NodeId to) const {
    auto it = terminal_index_.find(from);
    if (it == terminal_index_.end()) throw ValidationError("node " + std::to_string(from) + " is not a terminal");
    return cost_[static_cast<std::size_t>(it->second)][static_cast<std::size_t>(network_->node_index(to))];
}

std::vector<Arc> TravelCostMatrix::expand(NodeId from, NodeId to) const {
    auto it = terminal_index_.find(from);
    if (it == terminal_index_.end()) throw ValidationError("node " + std::to_string(from) + " is not a terminal");
    const auto& parent = parent_arc_[static_cast<std::size_t>(it->second)];
    std::vector<Arc> path;
    int v = network_->node_index(to);
    const int src = network_->node_index(from);
    while (v != src) {
        const int ai = parent[static_cast<std::size_t>(v)];
        if (ai < 0) throw UnreachableError(from, to);
        const Arc& a = network_->arcs()[static_cast<std::size_t>(ai)];
        path.push_back(a);
        v = network_->node_index(a.tail);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

RoadNetwork densify_stops(const RoadNetwork& network, double max_gap_m) {
    if (!(max_gap_m > 0.0)) throw ValidationError("max_gap must be positive");

    NodeId next_id = 0;
    for (const Node& n : network.nodes()) next_id = std::max(next_id, n.id);
    ++next_id;

    // Segments keyed by unordered endpoint pair; a two-way segment of equal
    // length in both directions shares its splitting points.
    struct Seg {
        bool fwd = false;  // arc (lo, hi) present
        bool bwd = false;  // arc (hi, lo) present
        double len_fwd = 0.0;
        double len_bwd = 0.0;
    };
    std::map<std::pair<NodeId, NodeId>, Seg> segments;
    for (const Arc& a : network.arcs()) {
        const NodeId lo = std::min(a.tail, a.head);
        const NodeId hi = std::max(a.tail, a.head);
        Seg& s = segments[{lo, hi}];
        if (a.tail == lo) {
            s.fwd = true;
            s.len_fwd = a.length_m;
        } else {
            s.bwd = true;
            s.len_bwd = a.length_m;
        }
    }

    std::vector<Node> nodes = network.nodes();
    std::vector<NodeId> candidates = network.candidate_stops();
    std::vector<Arc> arcs;

    auto pieces_for = [&](double len) {
        if (len <= max_gap_m * (1.0 + 1e-12)) return 1;
        return static_cast<int>(std::ceil(len / max_gap_m - 1e-12));
    };

    auto emit_chain = [&](NodeId from, NodeId to, const std::vector<NodeId>& mids, double len, int k) {
        const double piece = len / k;
        NodeId prev = from;
        for (int i = 0; i < k; ++i) {
            const NodeId nxt = (i + 1 == k) ? to : mids[static_cast<std::size_t>(i)];
            arcs.push_back(Arc{prev, nxt, piece});
            prev = nxt;
        }
    };

    for (auto& [key, seg] : segments) {
        const auto [lo, hi] = key;
        const bool shared = seg.fwd && seg.bwd && seg.len_fwd == seg.len_bwd;
        auto make_mids = [&](int k) {
            std::vector<NodeId> mids;
            const Node& a = network.node(lo);
            const Node& b = network.node(hi);
            for (int i = 1; i < k; ++i) {
                const double t = static_cast<double>(i) / k;
                const NodeId id = next_id++;
                nodes.push_back(Node{id, a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
                candidates.push_back(id);
                mids.push_back(id);
            }
            return mids;
        };
        if (shared) {
            const int k = pieces_for(seg.len_fwd);
            const std::vector<NodeId> mids = make_mids(k);
            emit_chain(lo, hi, mids, seg.len_fwd, k);
            std::vector<NodeId> rmids(mids.rbegin(), mids.rend());
            emit_chain(hi, lo, rmids, seg.len_bwd, k);
        } else {
            if (seg.fwd) {
                const int k = pieces_for(seg.len_fwd);
                emit_chain(lo, hi, make_mids(k), seg.len_fwd, k);
            }
            if (seg.bwd) {
                const int k = pieces_for(seg.len_bwd);
                std::vector<NodeId> mids = make_mids(k);
                std::reverse(mids.begin(), mids.end());
                emit_chain(hi, lo, mids, seg.len_bwd, k);
            }
        }
    }

    return RoadNetwork::create(std::move(nodes), std::move(arcs), network.depot(), std::move(candidates),
                               network.demand_nodes());
}

std::vector<double> walking_distances(const RoadNetwork& network, NodeId source) {
    const std::size_t n = network.nodes().size();
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const Arc& a : network.arcs()) {
        const int u = network.node_index(a.tail);
        const int v = network.node_index(a.head);
        adj[static_cast<std::size_t>(u)].emplace_back(v, a.length_m);
        adj[static_cast<std::size_t>(v)].emplace_back(u, a.length_m);
    }
    std::vector<double> dist(n, kInf);
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    const int s = network.node_index(source);
    dist[static_cast<std::size_t>(s)] = 0.0;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[static_cast<std::size_t>(u)]) continue;
        for (auto [v, w] : adj[static_cast<std::size_t>(u)]) {
            if (d + w < dist[static_cast<std::size_t>(v)]) {
                dist[static_cast<std::size_t>(v)] = d + w;
                heap.emplace(d + w, v);
            }
        }
    }
    return dist;
}

PreferenceBuildResult build_preference_lists(const RoadNetwork& network, double gamma_m) {
    if (gamma_m < 0.0) throw ValidationError("gamma must be non-negative");

    std::vector<PreferenceList> prefs;
    std::vector<NodeId> used;
    for (NodeId i : network.demand_nodes()) {
        const auto dist = walking_distances(network, i);
        std::vector<std::pair<double, NodeId>> reachable;
        for (NodeId j : network.candidate_stops()) {
            const double d = dist[static_cast<std::size_t>(network.node_index(j))];
            if (d <= gamma_m) reachable.emplace_back(d, j);
        }
        std::sort(reachable.begin(), reachable.end());
        if (reachable.empty()) throw UncoverableDemandNodeError(i);
        PreferenceList list;
        list.owner = i;
        for (auto& [d, j] : reachable) {
            list.ranked_stops.push_back(j);
            list.walk_distances.push_back(d);
        }
        used.insert(used.end(), list.ranked_stops.begin(), list.ranked_stops.end());
        prefs.push_back(std::move(list));
    }

    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    PreferenceBuildResult res{network.with_candidate_stops(std::move(used)), std::move(prefs)};
    return res;
}

}  // namespace covtour
