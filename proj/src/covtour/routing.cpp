#include "covtour/routing.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

namespace covtour {

std::vector<CvrpPiece> split_demands(const std::map<NodeId, Quantity>& loads, Quantity capacity) {
    if (capacity < kQuantityScale || capacity % kQuantityScale != 0)
        throw InvalidParamsError("capacity must be a positive whole number of canonical units");
    const Quantity p20 = capacity / 5;
    const Quantity p10 = capacity / 10;
    const Quantity p5 = capacity / 20;
    const Quantity p1 = capacity / 100;

    std::vector<CvrpPiece> pieces;
    for (auto& [stop, demand] : loads) {
        if (demand <= 0) throw InvalidParamsError("stop loads must be positive");
        if (demand * 10 < capacity) {  // below 0.1 Q: keep whole
            pieces.push_back(CvrpPiece{stop, demand});
            continue;
        }
        Quantity rest = demand;
        const Quantity m20 = rest / p20;
        rest -= m20 * p20;
        const Quantity m10 = rest / p10;
        rest -= m10 * p10;
        const Quantity m5 = rest / p5;
        rest -= m5 * p5;
        const Quantity m1 = rest / p1;
        rest -= m1 * p1;
        for (Quantity n = 0; n < m20; ++n) pieces.push_back(CvrpPiece{stop, p20});
        for (Quantity n = 0; n < m10; ++n) pieces.push_back(CvrpPiece{stop, p10});
        for (Quantity n = 0; n < m5; ++n) pieces.push_back(CvrpPiece{stop, p5});
        for (Quantity n = 0; n < m1; ++n) pieces.push_back(CvrpPiece{stop, p1});
        if (rest > 0) pieces.push_back(CvrpPiece{stop, rest});  // remainder < 0.01 Q
    }
    return pieces;
}

CvrpTask make_cvrp_task(const ProblemInstance& inst, std::vector<CvrpPiece> pieces) {
    CvrpTask task;
    task.pieces = std::move(pieces);
    task.capacity = inst.capacity();
    task.fleet = inst.m();
    const NodeId depot = inst.network().depot();
    const std::size_t n = task.pieces.size() + 1;
    task.dist.assign(n, std::vector<double>(n, 0.0));
    auto node_of = [&](std::size_t idx) { return idx == 0 ? depot : task.pieces[idx - 1].origin; };
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            task.dist[a][b] = (a == b) ? 0.0 : inst.travel().cost(node_of(a), node_of(b));
    return task;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Individual {
    std::vector<int> perm;                 // giant tour of piece indices
    std::vector<std::vector<int>> routes;  // decoded routes
    double travel = 0.0;
    Quantity excess = 0;  // total capacity excess over all routes
    std::uint64_t stamp = 0;

    bool feasible() const { return excess == 0; }
    double penalized(double penalty) const { return travel + penalty * static_cast<double>(excess); }
};

class HgsSolver {
public:
    HgsSolver(const CvrpTask& task, Rng& rng, int it_no_improve)
        : task_(task), rng_(rng), it_no_improve_(it_no_improve) {
        double total = 0.0;
        int legs = 0;
        const std::size_t n = task.pieces.size() + 1;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (a != b) {
                    total += task.dist[a][b];
                    ++legs;
                }
        // Initial excess penalty: average leg cost per capacity unit.
        base_penalty_ = std::max(1e-6, total / std::max(1, legs) / static_cast<double>(task.capacity));
        penalty_ = base_penalty_;
    }

    CvrpSolution run();

private:
    double d(int a, int b) const {
        return task_.dist[static_cast<std::size_t>(a + 1)][static_cast<std::size_t>(b + 1)];
    }
    double d_depot_to(int b) const { return task_.dist[0][static_cast<std::size_t>(b + 1)]; }
    double d_to_depot(int a) const { return task_.dist[static_cast<std::size_t>(a + 1)][0]; }
    Quantity piece_demand(int p) const { return task_.pieces[static_cast<std::size_t>(p)].demand; }

    double route_travel(const std::vector<int>& route) const;
    Quantity route_load(const std::vector<int>& route) const;
    void decode_split(Individual& ind) const;
    void local_search(Individual& ind, double penalty) const;
    void evaluate_routes(Individual& ind) const;
    Individual make_random() ;
    Individual make_greedy();
    void educate(Individual& ind);
    Individual crossover_ox(const Individual& a, const Individual& b);
    void insert_individual(Individual ind);
    const Individual& tournament_pick();
    void trim_pool(std::vector<Individual>& pool, std::size_t target);
    static double broken_pairs(const Individual& a, const Individual& b);
    double diversity_in_pool(const Individual& ind, const std::vector<Individual>& pool) const;

    const CvrpTask& task_;
    Rng& rng_;
    int it_no_improve_;
    double base_penalty_;
    double penalty_;
    std::uint64_t stamp_counter_ = 0;
    std::vector<Individual> feasible_pool_;
    std::vector<Individual> infeasible_pool_;
    std::optional<Individual> best_;
};

double HgsSolver::route_travel(const std::vector<int>& route) const {
    if (route.empty()) return 0.0;
    double c = d_depot_to(route.front());
    for (std::size_t i = 0; i + 1 < route.size(); ++i) c += d(route[i], route[i + 1]);
    c += d_to_depot(route.back());
    return c;
}

Quantity HgsSolver::route_load(const std::vector<int>& route) const {
    Quantity q = 0;
    for (int p : route) q += piece_demand(p);
    return q;
}

void HgsSolver::evaluate_routes(Individual& ind) const {
    ind.travel = 0.0;
    ind.excess = 0;
    for (auto& r : ind.routes) {
        ind.travel += route_travel(r);
        ind.excess += std::max<Quantity>(0, route_load(r) - task_.capacity);
    }
}

// Optimal segmentation of the giant tour into at most `fleet` routes under
// the penalized objective (loads above twice the capacity are pruned; pieces
// are at most 0.2 Q so this never cuts off every transition).
void HgsSolver::decode_split(Individual& ind) const {
    const int n = static_cast<int>(ind.perm.size());
    const int m = task_.fleet;
    std::vector<std::vector<double>> v(static_cast<std::size_t>(m) + 1,
                                       std::vector<double>(static_cast<std::size_t>(n) + 1, kInf));
    std::vector<std::vector<int>> pred(static_cast<std::size_t>(m) + 1,
                                       std::vector<int>(static_cast<std::size_t>(n) + 1, -1));
    v[0][0] = 0.0;
    for (int k = 1; k <= m; ++k) {
        for (int i = 0; i < n; ++i) {
            const double base = v[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i)];
            if (base == kInf) continue;
            // empty route: carry the value forward
            if (base < v[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]) {
                v[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = base;
                pred[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = i;
            }
            Quantity load = 0;
            double travel = 0.0;
            for (int j = i; j < n; ++j) {
                const int piece = ind.perm[static_cast<std::size_t>(j)];
                load += piece_demand(piece);
                travel += (j == i) ? d_depot_to(piece) : d(ind.perm[static_cast<std::size_t>(j - 1)], piece);
                if (load > 2 * task_.capacity) break;
                const double cost = base + travel + d_to_depot(piece) +
                                    penalty_ * static_cast<double>(std::max<Quantity>(0, load - task_.capacity));
                auto& slot = v[static_cast<std::size_t>(k)][static_cast<std::size_t>(j + 1)];
                if (cost < slot) {
                    slot = cost;
                    pred[static_cast<std::size_t>(k)][static_cast<std::size_t>(j + 1)] = i;
                }
            }
        }
        // carry empty-route value at the end position as well
        if (v[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(n)] <
            v[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)]) {
            v[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] =
                v[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(n)];
            pred[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] = n;
        }
    }
    if (v[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] == kInf)
        throw InfeasibleError("split decoding found no segmentation (demand far above fleet capacity)");

    ind.routes.clear();
    int pos = n;
    int k = m;
    while (k > 0) {
        const int from = pred[static_cast<std::size_t>(k)][static_cast<std::size_t>(pos)];
        assert(from >= 0);
        if (from < pos) {
            std::vector<int> route(ind.perm.begin() + from, ind.perm.begin() + pos);
            ind.routes.push_back(std::move(route));
        }
        pos = from;
        --k;
    }
    std::reverse(ind.routes.begin(), ind.routes.end());
    evaluate_routes(ind);
}

// Relocate, inter/intra swap, intra 2-opt and inter 2-opt* to a local
// minimum of the penalized objective.
void HgsSolver::local_search(Individual& ind, double penalty) const {
    auto& routes = ind.routes;
    auto route_cost = [&](const std::vector<int>& r) {
        return route_travel(r) +
               penalty * static_cast<double>(std::max<Quantity>(0, route_load(r) - task_.capacity));
    };

    bool improved = true;
    while (improved) {
        improved = false;

        // relocate: move one piece to any position of any route
        for (std::size_t ra = 0; ra < routes.size() && !improved; ++ra) {
            for (std::size_t ia = 0; ia < routes[ra].size() && !improved; ++ia) {
                const double before_a = route_cost(routes[ra]);
                const int piece = routes[ra][ia];
                for (std::size_t rb = 0; rb < routes.size() && !improved; ++rb) {
                    const double before = (ra == rb) ? before_a : before_a + route_cost(routes[rb]);
                    for (std::size_t ib = 0; ib <= routes[rb].size() && !improved; ++ib) {
                        if (ra == rb && (ib == ia || ib == ia + 1)) continue;
                        auto na = routes[ra];
                        auto nb = routes[rb];
                        if (ra == rb) {
                            na.erase(na.begin() + static_cast<std::ptrdiff_t>(ia));
                            const std::size_t target = ib > ia ? ib - 1 : ib;
                            na.insert(na.begin() + static_cast<std::ptrdiff_t>(target), piece);
                            if (route_cost(na) < before - 1e-9) {
                                routes[ra] = std::move(na);
                                improved = true;
                            }
                        } else {
                            na.erase(na.begin() + static_cast<std::ptrdiff_t>(ia));
                            nb.insert(nb.begin() + static_cast<std::ptrdiff_t>(ib), piece);
                            if (route_cost(na) + route_cost(nb) < before - 1e-9) {
                                routes[ra] = std::move(na);
                                routes[rb] = std::move(nb);
                                improved = true;
                            }
                        }
                    }
                }
            }
        }
        if (improved) continue;

        // swap: exchange two pieces (intra and inter route)
        for (std::size_t ra = 0; ra < routes.size() && !improved; ++ra) {
            for (std::size_t ia = 0; ia < routes[ra].size() && !improved; ++ia) {
                for (std::size_t rb = ra; rb < routes.size() && !improved; ++rb) {
                    const std::size_t start = (ra == rb) ? ia + 1 : 0;
                    for (std::size_t ib = start; ib < routes[rb].size() && !improved; ++ib) {
                        const double before = (ra == rb) ? route_cost(routes[ra])
                                                         : route_cost(routes[ra]) + route_cost(routes[rb]);
                        auto na = routes[ra];
                        auto nb = routes[rb];
                        if (ra == rb) {
                            std::swap(na[ia], na[ib]);
                            if (route_cost(na) < before - 1e-9) {
                                routes[ra] = std::move(na);
                                improved = true;
                            }
                        } else {
                            std::swap(na[ia], nb[ib]);
                            if (route_cost(na) + route_cost(nb) < before - 1e-9) {
                                routes[ra] = std::move(na);
                                routes[rb] = std::move(nb);
                                improved = true;
                            }
                        }
                    }
                }
            }
        }
        if (improved) continue;

        // intra-route 2-opt: reverse a segment
        for (std::size_t ra = 0; ra < routes.size() && !improved; ++ra) {
            auto& r = routes[ra];
            if (r.size() < 3) continue;
            const double before = route_cost(r);
            for (std::size_t i = 0; i < r.size() && !improved; ++i) {
                for (std::size_t j = i + 1; j < r.size() && !improved; ++j) {
                    auto nr = r;
                    std::reverse(nr.begin() + static_cast<std::ptrdiff_t>(i),
                                 nr.begin() + static_cast<std::ptrdiff_t>(j) + 1);
                    if (route_cost(nr) < before - 1e-9) {
                        r = std::move(nr);
                        improved = true;
                    }
                }
            }
        }
        if (improved) continue;

        // inter-route 2-opt*: exchange route tails
        for (std::size_t ra = 0; ra + 1 < routes.size() && !improved; ++ra) {
            for (std::size_t rb = ra + 1; rb < routes.size() && !improved; ++rb) {
                const double before = route_cost(routes[ra]) + route_cost(routes[rb]);
                for (std::size_t cut_a = 0; cut_a <= routes[ra].size() && !improved; ++cut_a) {
                    for (std::size_t cut_b = 0; cut_b <= routes[rb].size() && !improved; ++cut_b) {
                        if (cut_a == routes[ra].size() && cut_b == routes[rb].size()) continue;
                        if (cut_a == 0 && cut_b == 0) continue;
                        std::vector<int> na(routes[ra].begin(),
                                            routes[ra].begin() + static_cast<std::ptrdiff_t>(cut_a));
                        na.insert(na.end(), routes[rb].begin() + static_cast<std::ptrdiff_t>(cut_b),
                                  routes[rb].end());
                        std::vector<int> nb(routes[rb].begin(),
                                            routes[rb].begin() + static_cast<std::ptrdiff_t>(cut_b));
                        nb.insert(nb.end(), routes[ra].begin() + static_cast<std::ptrdiff_t>(cut_a),
                                  routes[ra].end());
                        if (route_cost(na) + route_cost(nb) < before - 1e-9) {
                            routes[ra] = std::move(na);
                            routes[rb] = std::move(nb);
                            improved = true;
                        }
                    }
                }
            }
        }
    }

    // drop emptied routes
    routes.erase(std::remove_if(routes.begin(), routes.end(), [](const auto& r) { return r.empty(); }),
                 routes.end());
    evaluate_routes(ind);
    // keep the chromosome in sync with the routes
    ind.perm.clear();
    for (auto& r : routes) ind.perm.insert(ind.perm.end(), r.begin(), r.end());
}

Individual HgsSolver::make_random() {
    Individual ind;
    ind.perm.resize(task_.pieces.size());
    std::iota(ind.perm.begin(), ind.perm.end(), 0);
    for (std::size_t i = ind.perm.size(); i > 1; --i)
        std::swap(ind.perm[i - 1], ind.perm[rng_.uniform_index(i)]);
    return ind;
}

Individual HgsSolver::make_greedy() {
    Individual ind;
    std::vector<char> used(task_.pieces.size(), 0);
    int current = -1;  // depot
    for (std::size_t step = 0; step < task_.pieces.size(); ++step) {
        int best = -1;
        double best_d = kInf;
        for (std::size_t p = 0; p < task_.pieces.size(); ++p) {
            if (used[p]) continue;
            const double dd = current < 0 ? d_depot_to(static_cast<int>(p)) : d(current, static_cast<int>(p));
            if (dd < best_d) {
                best_d = dd;
                best = static_cast<int>(p);
            }
        }
        used[static_cast<std::size_t>(best)] = 1;
        ind.perm.push_back(best);
        current = best;
    }
    return ind;
}

void HgsSolver::educate(Individual& ind) {
    decode_split(ind);
    local_search(ind, penalty_);
    if (!ind.feasible()) {
        // repair with a stiffer penalty
        Individual repaired = ind;
        local_search(repaired, penalty_ * 10.0);
        penalty_ = std::min(penalty_ * 1.2, base_penalty_ * 1e6);
        if (repaired.feasible()) ind = std::move(repaired);
    } else {
        penalty_ = std::max(penalty_ * 0.85, base_penalty_ * 1e-3);
    }
}

Individual HgsSolver::crossover_ox(const Individual& a, const Individual& b) {
    const std::size_t n = a.perm.size();
    Individual child;
    if (n == 1) {
        child.perm = a.perm;
        return child;
    }
    std::size_t lo = rng_.uniform_index(n);
    std::size_t hi = rng_.uniform_index(n);
    if (lo > hi) std::swap(lo, hi);
    std::vector<char> taken(n, 0);
    child.perm.assign(n, -1);
    for (std::size_t i = lo; i <= hi; ++i) {
        child.perm[i] = a.perm[i];
        taken[static_cast<std::size_t>(a.perm[i])] = 1;
    }
    // Fill the cyclic positions outside [lo, hi] with b's genes in b's order,
    // starting right after the copied window.
    std::size_t fill = (hi + 1) % n;
    for (std::size_t step = 0; step < n && fill != lo; ++step) {
        const int gene = b.perm[(hi + 1 + step) % n];
        if (taken[static_cast<std::size_t>(gene)]) continue;
        child.perm[fill] = gene;
        taken[static_cast<std::size_t>(gene)] = 1;
        fill = (fill + 1) % n;
    }
    return child;
}

double HgsSolver::broken_pairs(const Individual& a, const Individual& b) {
    // fraction of successor pairs of a (depot-anchored giant tour) not present in b
    const std::size_t n = a.perm.size();
    if (n <= 1) return 0.0;
    std::vector<int> succ_b(n + 1, -1);
    int prev = static_cast<int>(n);  // virtual depot gene
    for (int gene : b.perm) {
        succ_b[static_cast<std::size_t>(prev)] = gene;
        prev = gene;
    }
    int broken = 0;
    prev = static_cast<int>(n);
    for (int gene : a.perm) {
        if (succ_b[static_cast<std::size_t>(prev)] != gene) ++broken;
        prev = gene;
    }
    return static_cast<double>(broken) / static_cast<double>(n);
}

double HgsSolver::diversity_in_pool(const Individual& ind, const std::vector<Individual>& pool) const {
    if (pool.size() <= 1) return 1.0;
    std::vector<double> dists;
    for (const Individual& other : pool) {
        if (&other == &ind) continue;
        dists.push_back(broken_pairs(ind, other));
    }
    std::sort(dists.begin(), dists.end());
    const std::size_t k = std::min<std::size_t>(2, dists.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += dists[i];
    return sum / static_cast<double>(k);
}

void HgsSolver::trim_pool(std::vector<Individual>& pool, std::size_t target) {
    while (pool.size() > target) {
        // biased fitness: rank by penalized cost and by diversity contribution
        const std::size_t n = pool.size();
        std::vector<std::size_t> by_cost(n);
        std::iota(by_cost.begin(), by_cost.end(), 0);
        std::stable_sort(by_cost.begin(), by_cost.end(), [&](std::size_t x, std::size_t y) {
            const double cx = pool[x].penalized(penalty_);
            const double cy = pool[y].penalized(penalty_);
            if (cx != cy) return cx < cy;
            return pool[x].stamp < pool[y].stamp;
        });
        std::vector<double> div(n);
        for (std::size_t i = 0; i < n; ++i) div[i] = diversity_in_pool(pool[i], pool);
        std::vector<std::size_t> by_div(n);
        std::iota(by_div.begin(), by_div.end(), 0);
        std::stable_sort(by_div.begin(), by_div.end(), [&](std::size_t x, std::size_t y) {
            if (div[x] != div[y]) return div[x] > div[y];
            return pool[x].stamp < pool[y].stamp;
        });
        std::vector<double> fitness(n, 0.0);
        constexpr double kDiversityWeight = 0.6;
        for (std::size_t r = 0; r < n; ++r) {
            fitness[by_cost[r]] += static_cast<double>(r);
            fitness[by_div[r]] += kDiversityWeight * static_cast<double>(r);
        }
        // clones (zero distance to some other) go first
        std::size_t worst = 0;
        double worst_key = -kInf;
        for (std::size_t i = 0; i < n; ++i) {
            const bool clone = div[i] == 0.0;
            const double key = (clone ? 1e9 : 0.0) + fitness[i];
            if (key > worst_key) {
                worst_key = key;
                worst = i;
            }
        }
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(worst));
    }
}

void HgsSolver::insert_individual(Individual ind) {
    ind.stamp = stamp_counter_++;
    const bool feas = ind.feasible();
    if (feas) {
        if (!best_ || ind.travel < best_->travel) best_ = ind;
        feasible_pool_.push_back(std::move(ind));
        trim_pool(feasible_pool_, 20);
    } else {
        infeasible_pool_.push_back(std::move(ind));
        trim_pool(infeasible_pool_, 20);
    }
}

const Individual& HgsSolver::tournament_pick() {
    const std::size_t total = feasible_pool_.size() + infeasible_pool_.size();
    auto at = [&](std::size_t i) -> const Individual& {
        return i < feasible_pool_.size() ? feasible_pool_[i] : infeasible_pool_[i - feasible_pool_.size()];
    };
    const Individual& a = at(rng_.uniform_index(total));
    const Individual& b = at(rng_.uniform_index(total));
    return a.penalized(penalty_) <= b.penalized(penalty_) ? a : b;
}

CvrpSolution HgsSolver::run() {
    Quantity total = 0;
    for (const CvrpPiece& p : task_.pieces) total += p.demand;
    if (total > static_cast<Quantity>(task_.fleet) * task_.capacity)
        throw InfeasibleError("total piece demand exceeds fleet capacity");

    {
        Individual greedy = make_greedy();
        educate(greedy);
        insert_individual(std::move(greedy));
    }
    const std::size_t init_pop = 8;
    for (std::size_t i = 0; i < init_pop; ++i) {
        Individual ind = make_random();
        educate(ind);
        insert_individual(std::move(ind));
    }

    int stall = 0;
    double best_seen = best_ ? best_->travel : kInf;
    while (stall < it_no_improve_) {
        Individual child = crossover_ox(tournament_pick(), tournament_pick());
        educate(child);
        insert_individual(std::move(child));
        const double now = best_ ? best_->travel : kInf;
        if (now < best_seen - 1e-9) {
            best_seen = now;
            stall = 0;
        } else {
            ++stall;
        }
    }

    CvrpSolution out;
    if (best_) {
        out.routes = best_->routes;
        out.total_cost = best_->travel;
        out.feasible = true;
    }
    return out;
}

}  // namespace

CvrpSolution solve_cvrp(const CvrpTask& task, Rng& rng, int it_no_improve) {
    if (task.pieces.empty()) return CvrpSolution{{}, 0.0, true};
    if (it_no_improve < 1) throw InvalidParamsError("it_no_improve must be positive");
    HgsSolver solver(task, rng, it_no_improve);
    return solver.run();
}

Solution merge_to_solution(const ProblemInstance& inst, const SetCover& cover, const CvrpTask& task,
                           const CvrpSolution& cvrp) {
    Solution sol;
    for (const auto& route : cvrp.routes) {
        Tour tour;
        for (int p : route) {
            const CvrpPiece& piece = task.pieces[static_cast<std::size_t>(p)];
            if (!tour.stops.empty() && tour.stops.back().node == piece.origin)
                tour.stops.back().qty += piece.demand;
            else
                tour.stops.push_back(TourStop{piece.origin, piece.demand});
        }
        if (!tour.stops.empty()) sol.tours.push_back(std::move(tour));
    }
    while (static_cast<int>(sol.tours.size()) < inst.m()) sol.tours.emplace_back();

    for (auto& [j, ws] : cover.assigned)
        for (NodeId i : ws) sol.assignment[i] = j;
    sol.cost = evaluate(inst, sol);
    return sol;
}

Phase2Result run_phase2(const ProblemInstance& inst, const std::vector<SetCover>& covers, Rng& rng,
                        int it_no_improve, TreatedRegistry* treated) {
    Phase2Result result;
    double best_cost = kInf;
    for (const SetCover& cover : covers) {
        if (treated) treated->add(cover.canonical_key());
        const auto loads = cover.stop_loads(inst);
        CvrpTask task = make_cvrp_task(inst, split_demands(loads, inst.capacity()));
        const CvrpSolution cvrp = solve_cvrp(task, rng, it_no_improve);
        CoverAudit audit;
        audit.stops = cover.stops;
        audit.giant_cost = cover.giant_cost;
        audit.feasible = cvrp.feasible;
        if (cvrp.feasible) {
            Solution sol = merge_to_solution(inst, cover, task, cvrp);
            audit.routed_cost = sol.cost.total_s;
            if (sol.cost.total_s < best_cost) {
                best_cost = sol.cost.total_s;
                result.best = std::move(sol);
            }
        }
        audit.best_so_far = best_cost;
        result.audits.push_back(std::move(audit));
    }
    return result;
}

}  // namespace covtour
