#include "covtour/pipeline.hpp"

#include <atomic>
#include <limits>
#include <mutex>
#include <thread>

namespace covtour {

namespace {

using Clock = std::chrono::steady_clock;

bool expired(const std::optional<Clock::time_point>& deadline) {
    return deadline && Clock::now() >= *deadline;
}

}  // namespace

SolveResult solve_instance(const ProblemInstance& inst, const SolveOptions& options) {
    if (options.workers < 1) throw InvalidParamsError("workers must be positive");
    const auto start = Clock::now();
    std::optional<Clock::time_point> deadline;
    if (options.time_limit_s)
        deadline = start + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(*options.time_limit_s));

    Rng rng(options.seed);
    TreatedRegistry treated;
    SolveResult result;
    double best_cost = std::numeric_limits<double>::infinity();

    auto consider = [&](Solution sol) {
        if (sol.cost.total_s < best_cost) {
            best_cost = sol.cost.total_s;
            result.best = std::move(sol);
        }
    };

    while (true) {
        ++result.stats.rounds;
        const Phase1Options p1{options.max_iterations, options.max_length};
        const std::vector<SetCover> covers = run_phase1(inst, rng, p1, treated);
        if (covers.empty()) break;

        if (options.workers == 1) {
            for (const SetCover& cover : covers) {
                if (expired(deadline) && result.best) break;
                treated.add(cover.canonical_key());
                CvrpTask task = make_cvrp_task(inst, split_demands(cover.stop_loads(inst), inst.capacity()));
                const CvrpSolution cvrp = solve_cvrp(task, rng, options.it_no_improve);
                CoverAudit audit;
                audit.stops = cover.stops;
                audit.giant_cost = cover.giant_cost;
                audit.feasible = cvrp.feasible;
                if (cvrp.feasible) {
                    Solution sol = merge_to_solution(inst, cover, task, cvrp);
                    audit.routed_cost = sol.cost.total_s;
                    consider(std::move(sol));
                }
                audit.best_so_far = best_cost;
                ++result.stats.covers_routed;
                result.stats.audits.push_back(std::move(audit));
            }
        } else {
            std::atomic<std::size_t> next{0};
            std::mutex mu;
            std::vector<CoverAudit> audits(covers.size());
            std::vector<char> routed(covers.size(), 0);
            std::vector<std::thread> pool;
            for (int w = 0; w < options.workers; ++w) {
                pool.emplace_back([&, w] {
                    Rng wrng(options.seed * 1000003ULL + static_cast<std::uint64_t>(w) * 97 +
                             static_cast<std::uint64_t>(result.stats.rounds));
                    while (true) {
                        const std::size_t idx = next.fetch_add(1);
                        if (idx >= covers.size()) break;
                        if (expired(deadline)) break;
                        const SetCover& cover = covers[idx];
                        treated.add(cover.canonical_key());
                        CvrpTask task =
                            make_cvrp_task(inst, split_demands(cover.stop_loads(inst), inst.capacity()));
                        const CvrpSolution cvrp = solve_cvrp(task, wrng, options.it_no_improve);
                        CoverAudit audit;
                        audit.stops = cover.stops;
                        audit.giant_cost = cover.giant_cost;
                        audit.feasible = cvrp.feasible;
                        std::optional<Solution> sol;
                        if (cvrp.feasible) {
                            sol = merge_to_solution(inst, cover, task, cvrp);
                            audit.routed_cost = sol->cost.total_s;
                        }
                        std::lock_guard<std::mutex> lock(mu);
                        if (sol) consider(std::move(*sol));
                        audit.best_so_far = best_cost;
                        audits[idx] = std::move(audit);
                        routed[idx] = 1;
                    }
                });
            }
            for (auto& t : pool) t.join();
            for (std::size_t i = 0; i < covers.size(); ++i) {
                if (!routed[i]) continue;
                ++result.stats.covers_routed;
                result.stats.audits.push_back(std::move(audits[i]));
            }
        }

        if (!deadline || expired(deadline)) break;
    }

    result.stats.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

}  // namespace covtour
