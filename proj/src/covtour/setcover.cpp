#include "covtour/setcover.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace covtour {

std::map<NodeId, Quantity> SetCover::stop_loads(const ProblemInstance& inst) const {
    std::map<NodeId, Quantity> loads;
    for (auto& [j, ws] : assigned) {
        Quantity q = 0;
        for (NodeId i : ws) q += inst.demand(i);
        if (q > 0) loads[j] = q;
    }
    return loads;
}

void TreatedRegistry::add(const std::vector<NodeId>& key) {
    std::lock_guard<std::mutex> lock(mu_);
    keys_.insert(key);
}

bool TreatedRegistry::contains(const std::vector<NodeId>& key) const {
    std::lock_guard<std::mutex> lock(mu_);
    return keys_.count(key) != 0;
}

std::size_t TreatedRegistry::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return keys_.size();
}

CoverQueue::CoverQueue(std::size_t max_length) : max_length_(max_length) {
    if (max_length_ == 0) throw InvalidParamsError("queue length must be positive");
}

double CoverQueue::min_cost() const {
    if (ordered_.empty()) return std::numeric_limits<double>::infinity();
    return ordered_.begin()->first;
}

double CoverQueue::max_cost() const {
    if (ordered_.empty()) return std::numeric_limits<double>::infinity();
    return ordered_.rbegin()->first;
}

bool CoverQueue::offer(SetCover cover) {
    const Key& key = cover.canonical_key();
    if (covers_.count(key)) return false;
    if (ordered_.size() >= max_length_) {
        if (!(cover.giant_cost < ordered_.rbegin()->first)) return false;
        covers_.erase(ordered_.rbegin()->second);
        ordered_.erase(std::prev(ordered_.end()));
    }
    ordered_.emplace(cover.giant_cost, key);
    covers_.emplace(key, std::move(cover));
    assert(ordered_.size() == covers_.size() && ordered_.size() <= max_length_);
    return true;
}

std::vector<SetCover> CoverQueue::drain_sorted() {
    std::vector<SetCover> out;
    out.reserve(ordered_.size());
    for (auto& [cost, key] : ordered_) out.push_back(std::move(covers_.at(key)));
    ordered_.clear();
    covers_.clear();
    return out;
}

SetCover construct_set(const ProblemInstance& inst, Rng& rng) {
    // Reverse index: stop -> demand nodes whose list contains it.
    std::map<NodeId, std::vector<NodeId>> coverers;
    for (auto& [i, list] : inst.prefs())
        for (NodeId j : list.ranked_stops) coverers[j].push_back(i);

    std::vector<NodeId> uncovered;
    for (auto& [i, d] : inst.demands()) uncovered.push_back(i);
    std::set<NodeId> selected;

    while (!uncovered.empty()) {
        const NodeId picked = uncovered[rng.uniform_index(uncovered.size())];
        NodeId best = -1;
        std::size_t best_count = 0;
        for (NodeId j : inst.pref(picked).ranked_stops) {
            std::size_t count = 0;
            for (NodeId i : coverers.at(j))
                if (std::binary_search(uncovered.begin(), uncovered.end(), i)) ++count;
            if (best == -1 || count > best_count || (count == best_count && j < best)) {
                best = j;
                best_count = count;
            }
        }
        selected.insert(best);
        std::vector<NodeId> still;
        for (NodeId i : uncovered) {
            const auto& cov = coverers.find(best)->second;
            if (!std::binary_search(cov.begin(), cov.end(), i)) still.push_back(i);
        }
        uncovered = std::move(still);
    }

    // Redundancy cleanup in ascending id order: drop any stop whose removal
    // keeps the set a cover.
    std::map<NodeId, int> hits;  // demand node -> number of selected stops in its list
    for (auto& [i, list] : inst.prefs()) {
        int c = 0;
        for (NodeId j : list.ranked_stops) c += selected.count(j) ? 1 : 0;
        hits[i] = c;
    }
    for (auto it = selected.begin(); it != selected.end();) {
        const NodeId j = *it;
        bool removable = true;
        for (NodeId i : coverers.at(j)) {
            if (hits.at(i) <= 1) {
                removable = false;
                break;
            }
        }
        if (removable) {
            for (NodeId i : coverers.at(j)) --hits.at(i);
            it = selected.erase(it);
        } else {
            ++it;
        }
    }

    SetCover cover;
    cover.stops.assign(selected.begin(), selected.end());
    const DemandAssignment da = assign_demands(inst, selected);
    for (NodeId j : cover.stops) cover.assigned[j] = {};
    for (auto& [i, j] : da.assignment) cover.assigned.at(j).push_back(i);
    return cover;
}

AlternativeGroups compute_alternatives(const ProblemInstance& inst, const SetCover& cover) {
    AlternativeGroups out;
    for (auto& [j, ws] : cover.assigned) {
        if (ws.empty()) continue;  // nothing to cover, group dropped
        // Intersection of the preference lists of the demand nodes served at j.
        std::map<NodeId, std::size_t> tally;
        for (NodeId i : ws)
            for (NodeId jp : inst.pref(i).ranked_stops) ++tally[jp];
        AlternativeGroup group;
        group.owner = j;
        for (auto& [jp, count] : tally)
            if (count == ws.size()) group.members.push_back(jp);
        // The owner always qualifies (it serves these nodes); keep members sorted.
        assert(std::binary_search(group.members.begin(), group.members.end(), j));
        out.groups.push_back(std::move(group));
    }
    return out;
}

InsertionChoice best_group_insertion(const TravelCostMatrix& travel, NodeId depot, NodeId end_node,
                                     const std::vector<NodeId>& members, bool back) {
    NodeId cand = members.front();
    double cand_dist = back ? travel.cost(end_node, cand) : travel.cost(cand, end_node);
    double depot_link = back ? travel.cost(depot, cand) : travel.cost(cand, depot);
    for (NodeId mem : members) {
        const double d = back ? travel.cost(end_node, mem) : travel.cost(mem, end_node);
        if (d < cand_dist) {
            cand = mem;
            cand_dist = d;
        }
        const double dl = back ? travel.cost(depot, mem) : travel.cost(mem, depot);
        depot_link = std::min(depot_link, dl);
    }
    const double closing = back ? travel.cost(end_node, depot) : travel.cost(depot, end_node);
    return InsertionChoice{cand, depot_link + closing - cand_dist};
}

GiantTour build_giant_tour(const ProblemInstance& inst, const SetCover& cover, const AlternativeGroups& groups,
                           Rng& rng) {
    if (groups.groups.empty()) throw InvalidParamsError("giant tour needs at least one group");
    const TravelCostMatrix& travel = inst.travel();
    const NodeId depot = inst.network().depot();

    std::vector<char> consumed(groups.groups.size(), 0);
    std::set<NodeId> covered;  // demand nodes covered by inserted stops
    std::map<NodeId, std::vector<NodeId>> coverers;
    for (auto& [i, list] : inst.prefs())
        for (NodeId j : list.ranked_stops) coverers[j].push_back(i);

    std::vector<NodeId> tour;
    auto insert_node = [&](NodeId node, bool back) {
        if (back)
            tour.push_back(node);
        else
            tour.insert(tour.begin(), node);
        for (std::size_t g = 0; g < groups.groups.size(); ++g) {
            const auto& mem = groups.groups[g].members;
            if (std::binary_search(mem.begin(), mem.end(), node)) consumed[g] = 1;
        }
        auto it = coverers.find(node);
        if (it != coverers.end())
            for (NodeId i : it->second) covered.insert(i);
    };

    insert_node(cover.stops[rng.uniform_index(cover.stops.size())], true);

    while (covered.size() < inst.demands().size()) {
        const bool back = rng.coin();
        const NodeId end_node = back ? tour.back() : tour.front();
        NodeId best_cand = -1;
        double best_savings = -std::numeric_limits<double>::infinity();
        bool any = false;
        for (std::size_t g = 0; g < groups.groups.size(); ++g) {
            if (consumed[g]) continue;
            const InsertionChoice choice = best_group_insertion(travel, depot, end_node,
                                                                groups.groups[g].members, back);
            if (!any || choice.savings > best_savings ||
                (choice.savings == best_savings && choice.candidate < best_cand)) {
                best_cand = choice.candidate;
                best_savings = choice.savings;
                any = true;
            }
        }
        assert(any && "unconsumed groups must remain while coverage is incomplete");
        insert_node(best_cand, back);
    }

    GiantTour out;
    out.order = tour;
    std::set<NodeId> visited(tour.begin(), tour.end());
    const DemandAssignment da = assign_demands(inst, visited);
    out.redefined.stops.assign(visited.begin(), visited.end());
    for (NodeId j : out.redefined.stops) out.redefined.assigned[j] = {};
    for (auto& [i, j] : da.assignment) out.redefined.assigned.at(j).push_back(i);

    double cost = travel.cost(depot, tour.front());
    for (std::size_t t = 0; t + 1 < tour.size(); ++t) cost += travel.cost(tour[t], tour[t + 1]);
    cost += travel.cost(tour.back(), depot);
    cost += inst.stop_penalty_s() * static_cast<double>(tour.size());
    out.redefined.giant_cost = cost;
    return out;
}

std::vector<SetCover> run_phase1(const ProblemInstance& inst, Rng& rng, const Phase1Options& options,
                                 const TreatedRegistry& treated, const CoverSink& sink) {
    if (options.max_iterations < 1 || options.max_length < 1)
        throw InvalidParamsError("phase-1 limits must be positive");

    CoverQueue queue(static_cast<std::size_t>(options.max_length));
    int failures = 0;
    while (failures < options.max_iterations) {
        SetCover cover = construct_set(inst, rng);
        const AlternativeGroups groups = compute_alternatives(inst, cover);
        GiantTour giant = build_giant_tour(inst, cover, groups, rng);
        SetCover candidate = std::move(giant.redefined);
        if (treated.contains(candidate.canonical_key())) candidate.giant_cost *= 1.5;
        if (queue.offer(std::move(candidate)))
            failures = 0;
        else
            ++failures;
    }

    std::vector<SetCover> covers = queue.drain_sorted();
    if (sink)
        for (const SetCover& c : covers) sink(c);
    return covers;
}

}  // namespace covtour
