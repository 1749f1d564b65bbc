#include "covtour/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>

#include "json.hpp"

namespace covtour {

namespace {

using json = nlohmann::ordered_json;

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) throw ParseError("unknown key \"" + it.key() + "\" in " + where);
    }
}

json must_get(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ParseError("missing key \"" + key + "\" in " + where);
    return obj.at(key);
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

Quantity quantity_from_units(double units, const std::string& what) {
    const double scaled = units * static_cast<double>(kQuantityScale);
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-6)
        throw ValidationError(what + " = " + std::to_string(units) + " is finer than the 0.01-unit quantity grid");
    return static_cast<Quantity>(rounded);
}

Fleet derive_fleet(Quantity total_demand, const InstanceParams& params) {
    if (total_demand <= 0) throw InvalidParamsError("total demand must be positive");
    if (params.buffer < 0.0 || params.buffer >= 1.0) throw InvalidParamsError("buffer must lie in [0, 1)");
    if (params.m.has_value() == params.capacity.has_value())
        throw InvalidParamsError("exactly one of m and capacity must be given");

    if (params.m) {
        const int m = *params.m;
        if (m <= 0) throw InvalidParamsError("m must be positive");
        // Q = ceil(total / m) in canonical units.
        const Quantity q_units = (total_demand + static_cast<Quantity>(m) * kQuantityScale - 1) /
                                 (static_cast<Quantity>(m) * kQuantityScale);
        return Fleet{m, q_units * kQuantityScale};
    }

    const Quantity q = *params.capacity;
    if (q <= 0) throw InvalidParamsError("capacity must be positive");
    if (q % kQuantityScale != 0 || q < kQuantityScale)
        throw InvalidParamsError("capacity must be a positive whole number of canonical units");
    const long double effective = static_cast<long double>(q) * (1.0L - static_cast<long double>(params.buffer));
    auto m = static_cast<std::int64_t>(std::ceil(static_cast<long double>(total_demand) / effective));
    while (static_cast<long double>(m) * effective < static_cast<long double>(total_demand)) ++m;
    while (m > 1 && static_cast<long double>(m - 1) * effective >= static_cast<long double>(total_demand)) --m;
    if (m > 1000000) throw InvalidParamsError("derived fleet size is absurdly large");
    return Fleet{static_cast<int>(m), q};
}

ProblemInstance ProblemInstance::assemble(RoadNetwork base_network, std::map<NodeId, Quantity> demands,
                                          std::optional<std::vector<PreferenceList>> explicit_prefs,
                                          const InstanceParams& params) {
    if (demands.empty()) throw ValidationError("instance has no demand nodes");
    for (auto& [i, d] : demands) {
        if (!base_network.has_node(i)) throw ValidationError("demand node " + std::to_string(i) + " is not a node");
        if (d <= 0) throw ValidationError("demand at node " + std::to_string(i) + " must be positive");
    }

    ProblemInstance inst;
    inst.demands_ = std::move(demands);
    inst.gamma_m_ = params.gamma_m;
    inst.stop_penalty_s_ = params.stop_penalty_s;
    inst.speeds_ = SpeedModel{params.s_col, params.s_dep};
    inst.buffer_ = params.buffer;
    if (params.m && params.capacity)
        inst.fleet_spec_ = FleetSpec::Pinned;
    else
        inst.fleet_spec_ = params.capacity ? FleetSpec::CapacityPrimary : FleetSpec::MPrimary;

    RoadNetwork net = std::move(base_network);
    if (explicit_prefs) {
        inst.prefs_explicit_ = true;
        std::vector<NodeId> used;
        for (auto& list : *explicit_prefs) {
            if (!inst.demands_.count(list.owner))
                throw ValidationError("preference list owner " + std::to_string(list.owner) + " is not a demand node");
            if (list.ranked_stops.empty()) throw UncoverableDemandNodeError(list.owner);
            for (NodeId j : list.ranked_stops) {
                if (!net.is_candidate_stop(j))
                    throw ValidationError("preference entry " + std::to_string(j) + " is not a candidate stop");
            }
            // Walk distances are informative for explicit lists; not bounded by gamma.
            const auto dist = walking_distances(net, list.owner);
            list.walk_distances.clear();
            for (NodeId j : list.ranked_stops)
                list.walk_distances.push_back(dist[static_cast<std::size_t>(net.node_index(j))]);
            used.insert(used.end(), list.ranked_stops.begin(), list.ranked_stops.end());
            if (inst.prefs_.count(list.owner))
                throw ValidationError("duplicate preference list for node " + std::to_string(list.owner));
            inst.prefs_.emplace(list.owner, std::move(list));
        }
        std::sort(used.begin(), used.end());
        used.erase(std::unique(used.begin(), used.end()), used.end());
        net = net.with_candidate_stops(std::move(used));
    } else {
        auto built = build_preference_lists(net, params.gamma_m);
        net = std::move(built.network);
        for (auto& list : built.prefs) inst.prefs_.emplace(list.owner, std::move(list));
    }
    for (auto& [i, d] : inst.demands_) {
        if (!inst.prefs_.count(i)) throw UncoverableDemandNodeError(i);
    }

    Quantity total = 0;
    for (auto& [i, d] : inst.demands_) total += d;
    if (inst.fleet_spec_ == FleetSpec::Pinned) {
        if (params.buffer != 0.0) throw ValidationError("buffer requires a capacity-primary fleet");
        if (*params.m <= 0) throw InvalidParamsError("m must be positive");
        if (*params.capacity < kQuantityScale || *params.capacity % kQuantityScale != 0)
            throw InvalidParamsError("capacity must be a positive whole number of canonical units");
        inst.m_ = *params.m;
        inst.capacity_ = *params.capacity;
    } else {
        const Fleet fleet = derive_fleet(total, params);
        inst.m_ = fleet.m;
        inst.capacity_ = fleet.capacity;
    }

    if (total > static_cast<Quantity>(inst.m_) * inst.capacity_)
        throw ValidationError("capacity: total demand exceeds m * Q");

    inst.network_ = std::make_shared<const RoadNetwork>(std::move(net));
    inst.travel_ = TravelCostMatrix::compute(*inst.network_, inst.speeds_);
    inst.digest_ = fnv1a_hex(save_instance(inst));
    return inst;
}

Quantity ProblemInstance::total_demand() const {
    Quantity t = 0;
    for (auto& [i, d] : demands_) t += d;
    return t;
}

bool ProblemInstance::integer_demands() const {
    for (auto& [i, d] : demands_)
        if (d % kQuantityScale != 0) return false;
    return true;
}

ProblemInstance load_instance(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    try {
        require_keys(doc, {"nodes", "arcs", "depot", "candidate_stops", "demands", "prefs", "params"}, "document");

        std::vector<Node> nodes;
        for (const auto& jn : must_get(doc, "nodes", "document")) {
            require_keys(jn, {"id", "x", "y"}, "node");
            nodes.push_back(Node{jn.at("id").get<NodeId>(), jn.at("x").get<double>(), jn.at("y").get<double>()});
        }
        std::vector<Arc> arcs;
        for (const auto& ja : must_get(doc, "arcs", "document")) {
            require_keys(ja, {"tail", "head", "length_m"}, "arc");
            arcs.push_back(Arc{ja.at("tail").get<NodeId>(), ja.at("head").get<NodeId>(),
                               ja.at("length_m").get<double>()});
        }
        const NodeId depot = must_get(doc, "depot", "document").get<NodeId>();

        std::map<NodeId, Quantity> demands;
        for (const auto& jd : must_get(doc, "demands", "document")) {
            require_keys(jd, {"node", "qty"}, "demand");
            const NodeId i = jd.at("node").get<NodeId>();
            if (demands.count(i)) throw ValidationError("duplicate demand for node " + std::to_string(i));
            demands[i] = quantity_from_units(jd.at("qty").get<double>(), "demand qty");
        }
        std::vector<NodeId> demand_nodes;
        for (auto& [i, d] : demands) demand_nodes.push_back(i);

        const json jparams = must_get(doc, "params", "document");
        require_keys(jparams, {"gamma_m", "m", "capacity", "stop_penalty_s", "s_col", "s_dep"}, "params");
        InstanceParams params;
        params.gamma_m = must_get(jparams, "gamma_m", "params").get<double>();
        params.stop_penalty_s = must_get(jparams, "stop_penalty_s", "params").get<double>();
        params.s_col = must_get(jparams, "s_col", "params").get<double>();
        params.s_dep = must_get(jparams, "s_dep", "params").get<double>();
        if (jparams.contains("m")) params.m = jparams.at("m").get<int>();
        if (jparams.contains("capacity")) {
            const json jcap = jparams.at("capacity");
            require_keys(jcap, {"Q", "buffer"}, "capacity");
            params.capacity = quantity_from_units(must_get(jcap, "Q", "capacity").get<double>(), "capacity Q");
            if (jcap.contains("buffer")) params.buffer = jcap.at("buffer").get<double>();
        }
        if (!params.m && !params.capacity)
            throw ValidationError("params must give m or capacity");

        RoadNetwork net = [&] {
            if (doc.contains("candidate_stops")) {
                std::vector<NodeId> stops;
                for (const auto& js : doc.at("candidate_stops")) stops.push_back(js.get<NodeId>());
                return RoadNetwork::create(std::move(nodes), std::move(arcs), depot, std::move(stops), demand_nodes);
            }
            // No explicit candidates: densify at the 50 m default and let
            // every non-depot node be a candidate.
            RoadNetwork raw = RoadNetwork::create(std::move(nodes), std::move(arcs), depot, {}, demand_nodes);
            RoadNetwork dense = densify_stops(raw, 50.0);
            std::vector<NodeId> stops;
            for (const Node& n : dense.nodes())
                if (n.id != depot) stops.push_back(n.id);
            return dense.with_candidate_stops(std::move(stops));
        }();

        std::optional<std::vector<PreferenceList>> prefs;
        if (doc.contains("prefs")) {
            prefs.emplace();
            for (auto it = doc.at("prefs").begin(); it != doc.at("prefs").end(); ++it) {
                PreferenceList list;
                const std::string& key = it.key();
                auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), list.owner);
                if (ec != std::errc{} || p != key.data() + key.size())
                    throw ParseError("prefs key \"" + key + "\" is not a node id");
                for (const auto& js : it.value()) list.ranked_stops.push_back(js.get<NodeId>());
                prefs->push_back(std::move(list));
            }
        }

        return ProblemInstance::assemble(std::move(net), std::move(demands), std::move(prefs), params);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed instance document: ") + e.what());
    }
}

std::string save_instance(const ProblemInstance& inst) {
    json doc;
    json jnodes = json::array();
    for (const Node& n : inst.network().nodes()) jnodes.push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}});
    doc["nodes"] = std::move(jnodes);
    json jarcs = json::array();
    for (const Arc& a : inst.network().arcs())
        jarcs.push_back({{"tail", a.tail}, {"head", a.head}, {"length_m", a.length_m}});
    doc["arcs"] = std::move(jarcs);
    doc["depot"] = inst.network().depot();
    doc["candidate_stops"] = inst.network().candidate_stops();
    json jdem = json::array();
    for (auto& [i, d] : inst.demands()) jdem.push_back({{"node", i}, {"qty", quantity_to_units(d)}});
    doc["demands"] = std::move(jdem);
    if (inst.prefs_explicit()) {
        json jprefs = json::object();
        for (auto& [i, list] : inst.prefs()) jprefs[std::to_string(i)] = list.ranked_stops;
        doc["prefs"] = std::move(jprefs);
    }
    json jparams;
    jparams["gamma_m"] = inst.gamma_m();
    if (inst.fleet_spec() != FleetSpec::CapacityPrimary) jparams["m"] = inst.m();
    if (inst.fleet_spec() != FleetSpec::MPrimary) {
        json jcap;
        jcap["Q"] = quantity_to_units(inst.capacity());
        if (inst.buffer() != 0.0) jcap["buffer"] = inst.buffer();
        jparams["capacity"] = std::move(jcap);
    }
    jparams["stop_penalty_s"] = inst.stop_penalty_s();
    jparams["s_col"] = inst.speeds().s_col;
    jparams["s_dep"] = inst.speeds().s_dep;
    doc["params"] = std::move(jparams);
    return doc.dump(2) + "\n";
}

ProblemInstance generate_sparse(int n_nodes, double demand_prob, std::uint64_t seed, const InstanceParams& params) {
    if (n_nodes < 3) throw InvalidParamsError("need at least 3 nodes");
    if (!(demand_prob > 0.0) || demand_prob > 1.0) throw InvalidParamsError("demand_prob must lie in (0, 1]");

    Rng rng(seed);
    const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_nodes))));
    const double spacing = 100.0;

    std::vector<Node> nodes;
    for (int k = 0; k < n_nodes; ++k) {
        const int gx = k % side;
        const int gy = k / side;
        const double jx = (rng.uniform01() - 0.5) * 60.0;
        const double jy = (rng.uniform01() - 0.5) * 60.0;
        nodes.push_back(Node{static_cast<NodeId>(k), gx * spacing + jx, gy * spacing + jy});
    }

    // Grid edges kept with probability 0.85, then a repair pass restores
    // connectivity over the skipped ones.
    std::vector<std::pair<int, int>> kept;
    std::vector<std::pair<int, int>> skipped;
    for (int k = 0; k < n_nodes; ++k) {
        const int gx = k % side;
        const int right = k + 1;
        const int down = k + side;
        if (gx + 1 < side && right < n_nodes) {
            (rng.uniform01() < 0.85 ? kept : skipped).emplace_back(k, right);
        }
        if (down < n_nodes) {
            (rng.uniform01() < 0.85 ? kept : skipped).emplace_back(k, down);
        }
    }
    std::vector<int> parent(static_cast<std::size_t>(n_nodes));
    for (int k = 0; k < n_nodes; ++k) parent[static_cast<std::size_t>(k)] = k;
    std::function<int(int)> find = [&](int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<std::size_t>(a)] = b;
        return true;
    };
    for (auto& [u, v] : kept) unite(u, v);
    for (auto& [u, v] : skipped)
        if (find(u) != find(v)) {
            unite(u, v);
            kept.emplace_back(u, v);
        }

    std::sort(kept.begin(), kept.end());
    std::vector<Arc> arcs;
    for (auto& [u, v] : kept) {
        const Node& a = nodes[static_cast<std::size_t>(u)];
        const Node& b = nodes[static_cast<std::size_t>(v)];
        const double len = std::hypot(a.x - b.x, a.y - b.y);
        arcs.push_back(Arc{a.id, b.id, len});
        arcs.push_back(Arc{b.id, a.id, len});
    }

    std::map<NodeId, Quantity> demands;
    for (int k = 1; k < n_nodes; ++k) {
        if (rng.uniform01() < demand_prob)
            demands[static_cast<NodeId>(k)] = rng.uniform_int(1, 9) * kQuantityScale;
    }
    if (demands.empty()) demands[1] = rng.uniform_int(1, 9) * kQuantityScale;

    std::vector<NodeId> demand_nodes;
    for (auto& [i, d] : demands) demand_nodes.push_back(i);
    std::vector<NodeId> candidates;
    for (int k = 1; k < n_nodes; ++k) candidates.push_back(static_cast<NodeId>(k));

    RoadNetwork net = RoadNetwork::create(std::move(nodes), std::move(arcs), 0, std::move(candidates),
                                          std::move(demand_nodes));
    return ProblemInstance::assemble(std::move(net), std::move(demands), std::nullopt, params);
}

}  // namespace covtour
