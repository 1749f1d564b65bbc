#include "covtour/solution.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace covtour {

namespace {
using json = nlohmann::ordered_json;
}

Quantity Tour::load() const {
    Quantity q = 0;
    for (const TourStop& s : stops) q += s.qty;
    return q;
}

DemandAssignment assign_demands(const ProblemInstance& inst, const std::set<NodeId>& visited) {
    for (NodeId j : visited) {
        if (!inst.network().is_candidate_stop(j))
            throw ValidationError("visited node " + std::to_string(j) + " is not a candidate stop");
    }
    DemandAssignment out;
    for (auto& [i, list] : inst.prefs()) {
        const NodeId* serving = nullptr;
        for (const NodeId& j : list.ranked_stops) {
            if (visited.count(j)) {
                serving = &j;
                break;
            }
        }
        if (!serving) throw UncoveredError(i);
        out.assignment[i] = *serving;
        out.load[*serving] += inst.demand(i);
    }
    for (NodeId j : visited) {
        if (!out.load.count(j)) out.idle_stops.push_back(j);
    }
    for (auto it = out.load.begin(); it != out.load.end();) {
        it = it->second == 0 ? out.load.erase(it) : std::next(it);
    }
    return out;
}

CostBreakdown evaluate(const ProblemInstance& inst, const Solution& sol) {
    CostBreakdown cost;
    const NodeId depot = inst.network().depot();
    std::size_t stop_events = 0;
    for (const Tour& tour : sol.tours) {
        if (tour.stops.empty()) continue;
        stop_events += tour.stops.size();
        NodeId prev = depot;
        for (const TourStop& s : tour.stops) {
            cost.travel_s += inst.travel().cost(prev, s.node);
            prev = s.node;
        }
        cost.travel_s += inst.travel().cost(prev, depot);
    }
    cost.stop_penalty_s = inst.stop_penalty_s() * static_cast<double>(stop_events);
    cost.total_s = cost.travel_s + cost.stop_penalty_s;
    return cost;
}

std::string FeasibilityReport::to_string() const {
    if (violations.empty()) return "feasible";
    std::ostringstream os;
    for (const auto& v : violations) os << v << "\n";
    return os.str();
}

FeasibilityReport check_feasible(const ProblemInstance& inst, const Solution& sol) {
    FeasibilityReport report;
    auto add = [&](const std::string& v) { report.violations.push_back(v); };

    // (e) tour count
    if (static_cast<int>(sol.tours.size()) != inst.m())
        add("tour count: solution has " + std::to_string(sol.tours.size()) + " tours, instance requires " +
            std::to_string(inst.m()));

    std::set<NodeId> visited;
    std::map<NodeId, Quantity> served;
    for (std::size_t k = 0; k < sol.tours.size(); ++k) {
        const Tour& tour = sol.tours[k];
        for (std::size_t n = 0; n < tour.stops.size(); ++n) {
            const TourStop& s = tour.stops[n];
            if (!inst.network().is_candidate_stop(s.node))
                add("structure: tour " + std::to_string(k) + " stops at non-candidate node " + std::to_string(s.node));
            if (s.qty < 0) add("structure: negative quantity at node " + std::to_string(s.node));
            if (n > 0 && tour.stops[n - 1].node == s.node)
                add("structure: consecutive duplicate stop " + std::to_string(s.node) + " in tour " + std::to_string(k));
            visited.insert(s.node);
            served[s.node] += s.qty;
        }
        // (c) capacity
        if (tour.load() > inst.capacity())
            add("capacity: tour " + std::to_string(k) + " load " + std::to_string(tour.load()) + " exceeds Q " +
                std::to_string(inst.capacity()));
    }

    // (a) coverage and (b) first-visited-preference consistency
    std::map<NodeId, Quantity> required;
    for (auto& [i, list] : inst.prefs()) {
        auto it = sol.assignment.find(i);
        if (it == sol.assignment.end()) {
            add("coverage: demand node " + std::to_string(i) + " is unassigned");
            continue;
        }
        const NodeId assigned = it->second;
        const NodeId* first_visited = nullptr;
        for (const NodeId& j : list.ranked_stops) {
            if (visited.count(j)) {
                first_visited = &j;
                break;
            }
        }
        const bool in_list = std::find(list.ranked_stops.begin(), list.ranked_stops.end(), assigned) !=
                             list.ranked_stops.end();
        if (!in_list || !visited.count(assigned)) {
            add("coverage: demand node " + std::to_string(i) + " assigned to " + std::to_string(assigned) +
                " which is not a visited stop of its preference list");
        } else if (first_visited && *first_visited != assigned) {
            add("preference: demand node " + std::to_string(i) + " assigned to " + std::to_string(assigned) +
                " but " + std::to_string(*first_visited) + " is the first visited stop of its list");
        }
        required[assigned] += inst.demand(i);
    }
    for (auto it = sol.assignment.begin(); it != sol.assignment.end(); ++it) {
        if (!inst.prefs().count(it->first))
            add("coverage: assignment contains unknown demand node " + std::to_string(it->first));
    }

    // (d) per-stop quantity conservation
    for (NodeId j : visited) {
        const Quantity got = served.count(j) ? served.at(j) : 0;
        const Quantity want = required.count(j) ? required.at(j) : 0;
        if (got != want)
            add("conservation: stop " + std::to_string(j) + " serves " + std::to_string(got) +
                " centi-units, assigned demand is " + std::to_string(want));
    }
    for (auto& [j, want] : required) {
        if (!visited.count(j))
            add("conservation: stop " + std::to_string(j) + " has assigned demand but is never visited");
    }
    return report;
}

std::string save_solution(const ProblemInstance& inst, const Solution& sol) {
    json doc;
    doc["instance_digest"] = inst.digest();
    json jtours = json::array();
    for (const Tour& tour : sol.tours) {
        json jt = json::array();
        for (const TourStop& s : tour.stops) jt.push_back({{"node", s.node}, {"qty", quantity_to_units(s.qty)}});
        jtours.push_back(std::move(jt));
    }
    doc["tours"] = std::move(jtours);
    json jassign = json::object();
    for (auto& [i, j] : sol.assignment) jassign[std::to_string(i)] = j;
    doc["assignment"] = std::move(jassign);
    doc["cost"] = {{"travel_s", sol.cost.travel_s},
                   {"stop_penalty_s", sol.cost.stop_penalty_s},
                   {"total_s", sol.cost.total_s}};
    return doc.dump(2) + "\n";
}

namespace {

json parse_solution_doc(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid solution JSON: ") + e.what());
    }
}

}  // namespace

std::string solution_instance_digest(const std::string& text) {
    const json doc = parse_solution_doc(text);
    if (!doc.contains("instance_digest")) return {};
    return doc.at("instance_digest").get<std::string>();
}

Solution load_solution(const std::string& text, const std::string& expected_digest) {
    const json doc = parse_solution_doc(text);
    try {
        if (!expected_digest.empty()) {
            const std::string got = doc.value("instance_digest", std::string{});
            if (got != expected_digest)
                throw ValidationError("solution was produced for a different instance (digest mismatch)");
        }
        Solution sol;
        for (const auto& jt : doc.at("tours")) {
            Tour tour;
            for (const auto& js : jt)
                tour.stops.push_back(TourStop{js.at("node").get<NodeId>(),
                                              quantity_from_units(js.at("qty").get<double>(), "tour qty")});
            sol.tours.push_back(std::move(tour));
        }
        if (doc.contains("assignment")) {
            for (auto it = doc.at("assignment").begin(); it != doc.at("assignment").end(); ++it) {
                NodeId i;
                const std::string& key = it.key();
                auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), i);
                if (ec != std::errc{} || p != key.data() + key.size())
                    throw ParseError("assignment key \"" + key + "\" is not a node id");
                sol.assignment[i] = it.value().get<NodeId>();
            }
        }
        if (doc.contains("cost")) {
            sol.cost.travel_s = doc.at("cost").value("travel_s", 0.0);
            sol.cost.stop_penalty_s = doc.at("cost").value("stop_penalty_s", 0.0);
            sol.cost.total_s = doc.at("cost").value("total_s", 0.0);
        }
        return sol;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed solution document: ") + e.what());
    }
}

std::string export_geojson(const ProblemInstance& inst, const Solution& sol) {
    json features = json::array();
    const NodeId depot = inst.network().depot();
    for (std::size_t k = 0; k < sol.tours.size(); ++k) {
        const Tour& tour = sol.tours[k];
        if (tour.stops.empty()) continue;
        json coords = json::array();
        auto push_node = [&](NodeId id) {
            const Node& n = inst.network().node(id);
            coords.push_back({n.x, n.y});
        };
        NodeId prev = depot;
        push_node(depot);
        for (const TourStop& s : tour.stops) {
            for (const Arc& a : inst.travel().expand(prev, s.node)) push_node(a.head);
            prev = s.node;
        }
        for (const Arc& a : inst.travel().expand(prev, depot)) push_node(a.head);
        features.push_back({{"type", "Feature"},
                            {"geometry", {{"type", "LineString"}, {"coordinates", std::move(coords)}}},
                            {"properties", {{"tour", k}}}});
    }
    for (std::size_t k = 0; k < sol.tours.size(); ++k) {
        for (const TourStop& s : sol.tours[k].stops) {
            const Node& n = inst.network().node(s.node);
            features.push_back({{"type", "Feature"},
                                {"geometry", {{"type", "Point"}, {"coordinates", {n.x, n.y}}}},
                                {"properties", {{"node", s.node}, {"qty", quantity_to_units(s.qty)}, {"tour", k}}}});
        }
    }
    json doc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
    return doc.dump(2) + "\n";
}

std::string export_dot(const ProblemInstance& inst, const Solution& sol) {
    static const char* kPalette[] = {"red",    "blue",   "forestgreen", "orange", "purple",
                                     "brown",  "teal",   "magenta",     "gray40", "olive"};
    std::ostringstream os;
    os << "digraph tours {\n";
    os << "  node [shape=circle];\n";
    os << "  " << inst.network().depot() << " [shape=box, label=\"depot\"];\n";
    for (std::size_t k = 0; k < sol.tours.size(); ++k) {
        const Tour& tour = sol.tours[k];
        if (tour.stops.empty()) continue;
        const char* color = kPalette[k % (sizeof kPalette / sizeof kPalette[0])];
        for (const TourStop& s : tour.stops)
            os << "  " << s.node << " [color=" << color << ", label=\"" << s.node << "\\n"
               << quantity_to_units(s.qty) << "\"];\n";
        NodeId prev = inst.network().depot();
        for (const TourStop& s : tour.stops) {
            os << "  " << prev << " -> " << s.node << " [color=" << color << "];\n";
            prev = s.node;
        }
        os << "  " << prev << " -> " << inst.network().depot() << " [color=" << color << "];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace covtour
