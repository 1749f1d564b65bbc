// Command-line front end: generate, validate, solve, export-milp, decode,
// oracle, compare.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "covtour/instance.hpp"
#include "covtour/milp.hpp"
#include "covtour/oracle.hpp"
#include "covtour/pipeline.hpp"
#include "covtour/solution.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitInfeasible = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw covtour::ParseError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw covtour::ValidationError("cannot write " + path);
    out << bytes;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("COVTOUR_SEED")) {
        return static_cast<std::uint64_t>(std::strtoull(env, nullptr, 10));
    }
    return 1;
}

double parse_time_limit(std::string text) {
    if (!text.empty() && text.back() == 's') text.pop_back();
    try {
        return std::stod(text);
    } catch (const std::exception&) {
        throw covtour::InvalidParamsError("bad time limit \"" + text + "\"");
    }
}

void apply_preset(covtour::InstanceParams& params, const std::string& preset) {
    if (preset == "small") {
        params.s_col = 1.0;
        params.s_dep = 1.0;
        params.stop_penalty_s = 5.0;
    } else if (preset == "real") {
        params.s_col = 2.0;
        params.s_dep = 14.0;
        params.stop_penalty_s = 5.0;
    } else {
        throw covtour::InvalidParamsError("unknown preset \"" + preset + "\"");
    }
}

void print_cost(const covtour::CostBreakdown& cost) {
    std::cout << "travel_s       " << cost.travel_s << "\n";
    std::cout << "stop_penalty_s " << cost.stop_penalty_s << "\n";
    std::cout << "total_s        " << cost.total_s << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"covtour: capacitated multi-vehicle covering tour solver for road networks"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate a sparse random instance");
    int gen_nodes = 50;
    double gen_prob = 0.5;
    std::uint64_t gen_seed = default_seed();
    double gen_gamma = 0.0;
    int gen_m = 0;
    double gen_capacity = 0.0;
    double gen_buffer = 0.0;
    std::string gen_preset = "small";
    std::string gen_out;
    gen->add_option("--nodes", gen_nodes, "node count")->required();
    gen->add_option("--demand-prob", gen_prob, "probability that a node has demand")->required();
    gen->add_option("--seed", gen_seed, "rng seed");
    gen->add_option("--gamma", gen_gamma, "maximum walking distance [m]");
    auto* opt_m = gen->add_option("--m", gen_m, "tour count (capacity derived)");
    auto* opt_q = gen->add_option("--capacity", gen_capacity, "vehicle capacity (tour count derived)");
    gen->add_option("--buffer", gen_buffer, "capacity buffer fraction");
    gen->add_option("--preset", gen_preset, "parameter preset: small | real");
    gen->add_option("--out", gen_out, "output instance file")->required();
    opt_m->excludes(opt_q);
    opt_q->excludes(opt_m);

    // validate
    auto* val = app.add_subcommand("validate", "load an instance and report its shape");
    std::string val_path;
    val->add_option("instance", val_path, "instance file")->required();

    // solve
    auto* solve = app.add_subcommand("solve", "run the two-phase heuristic");
    std::string solve_path, solve_out, solve_geojson, solve_dot, solve_time;
    covtour::SolveOptions solve_opts;
    solve_opts.seed = default_seed();
    solve->add_option("instance", solve_path, "instance file")->required();
    solve->add_option("--seed", solve_opts.seed, "rng seed");
    solve->add_option("--max-iterations", solve_opts.max_iterations, "phase-1 non-improving budget");
    solve->add_option("--max-length", solve_opts.max_length, "best-cover queue bound");
    solve->add_option("--it-no-improve", solve_opts.it_no_improve, "CVRP stall budget");
    solve->add_option("--workers", solve_opts.workers, "phase-2 consumers");
    solve->add_option("--time-limit", solve_time, "wall-clock limit, e.g. 30s");
    solve->add_option("--out", solve_out, "solution file");
    solve->add_option("--geojson", solve_geojson, "GeoJSON export path");
    solve->add_option("--dot", solve_dot, "graphviz export path");

    // export-milp
    auto* exp = app.add_subcommand("export-milp", "write a formulation as LP text");
    std::string exp_path, exp_form, exp_out, exp_vi = "on";
    exp->add_option("instance", exp_path, "instance file")->required();
    exp->add_option("--formulation", exp_form, "rn-ws | rn-nos | cg-ws | cg-nos")->required();
    exp->add_option("--valid-ineq", exp_vi, "emit the split-bound valid inequality (RN-wS): on | off");
    exp->add_option("--out", exp_out, "output LP file")->required();

    // decode
    auto* dec = app.add_subcommand("decode", "turn a solver assignment into a solution file");
    std::string dec_path, dec_form, dec_assignment, dec_out, dec_vi = "on";
    dec->add_option("instance", dec_path, "instance file")->required();
    dec->add_option("--formulation", dec_form, "rn-ws | rn-nos | cg-ws | cg-nos")->required();
    dec->add_option("--assignment", dec_assignment, "solver output: one \"name value\" per line")->required();
    dec->add_option("--valid-ineq", dec_vi, "whether the model carried the valid inequality: on | off");
    dec->add_option("--out", dec_out, "solution file");

    // oracle
    auto* ora = app.add_subcommand("oracle", "exact reference solver for tiny instances");
    std::string ora_path, ora_out, ora_splits = "on";
    covtour::OracleLimits ora_limits;
    ora->add_option("instance", ora_path, "instance file")->required();
    ora->add_option("--splits", ora_splits, "allow split collection: on | off");
    ora->add_option("--out", ora_out, "solution file");
    ora->add_option("--max-stops", ora_limits.max_stops, "stop-count limit");
    ora->add_option("--max-m", ora_limits.max_m, "tour-count limit");

    // compare
    auto* cmp = app.add_subcommand("compare", "relative difference of two solution files");
    std::string cmp_instance, cmp_a, cmp_b;
    cmp->add_option("--instance", cmp_instance, "instance file")->required();
    cmp->add_option("solution", cmp_a, "solution under test")->required();
    cmp->add_option("reference", cmp_b, "reference solution")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*gen) {
            covtour::InstanceParams params;
            apply_preset(params, gen_preset);
            params.gamma_m = gen_gamma;
            params.buffer = gen_buffer;
            if (opt_m->count())
                params.m = gen_m;
            else if (opt_q->count())
                params.capacity = covtour::quantity_from_units(gen_capacity, "capacity");
            else
                throw covtour::InvalidParamsError("one of --m / --capacity is required");
            const covtour::ProblemInstance inst = covtour::generate_sparse(gen_nodes, gen_prob, gen_seed, params);
            write_file(gen_out, covtour::save_instance(inst));
            std::cout << "instance " << inst.digest() << ": " << inst.network().nodes().size() << " nodes, "
                      << inst.network().arcs().size() << " arcs, " << inst.demands().size() << " demand nodes, "
                      << inst.network().candidate_stops().size() << " candidate stops, m = " << inst.m()
                      << ", Q = " << covtour::quantity_to_units(inst.capacity()) << "\n";
        } else if (*val) {
            const covtour::ProblemInstance inst = covtour::load_instance(read_file(val_path));
            std::cout << "ok: instance " << inst.digest() << "\n";
            std::cout << "nodes " << inst.network().nodes().size() << ", arcs " << inst.network().arcs().size()
                      << ", candidate stops " << inst.network().candidate_stops().size() << ", demand nodes "
                      << inst.demands().size() << "\n";
            std::cout << "m " << inst.m() << ", Q " << covtour::quantity_to_units(inst.capacity()) << ", gamma "
                      << inst.gamma_m() << " m, r " << inst.stop_penalty_s() << " s\n";
        } else if (*solve) {
            const covtour::ProblemInstance inst = covtour::load_instance(read_file(solve_path));
            if (!solve_time.empty()) solve_opts.time_limit_s = parse_time_limit(solve_time);
            const covtour::SolveResult result = covtour::solve_instance(inst, solve_opts);
            std::cout << "phase 1/2: " << result.stats.rounds << " round(s), " << result.stats.covers_routed
                      << " cover(s) routed, " << result.stats.elapsed_s << " s\n";
            if (!result.best) {
                std::cout << "no feasible solution found\n";
                return kExitInfeasible;
            }
            const covtour::Solution& best = *result.best;
            print_cost(best.cost);
            const covtour::FeasibilityReport report = covtour::check_feasible(inst, best);
            if (!report.feasible()) {
                std::cout << "infeasible result:\n" << report.to_string();
                return kExitInfeasible;
            }
            if (!solve_out.empty()) write_file(solve_out, covtour::save_solution(inst, best));
            if (!solve_geojson.empty()) write_file(solve_geojson, covtour::export_geojson(inst, best));
            if (!solve_dot.empty()) write_file(solve_dot, covtour::export_dot(inst, best));
        } else if (*exp) {
            const covtour::ProblemInstance inst = covtour::load_instance(read_file(exp_path));
            const covtour::Formulation f = covtour::formulation_from_flag(exp_form);
            const covtour::MilpModel model = covtour::build_formulation(inst, f, exp_vi != "off");
            write_file(exp_out, covtour::export_lp(model));
            std::cout << model.tag << ": " << model.variables().size() << " variables, "
                      << model.constraints().size() << " constraints\n";
        } else if (*dec) {
            const covtour::ProblemInstance inst = covtour::load_instance(read_file(dec_path));
            const covtour::Formulation f = covtour::formulation_from_flag(dec_form);
            const covtour::MilpModel model = covtour::build_formulation(inst, f, dec_vi != "off");
            const covtour::VariableAssignment assignment = covtour::parse_assignment(read_file(dec_assignment));
            const auto violations = covtour::check_assignment(model, assignment);
            for (const std::string& v : violations) std::cout << "violation: " << v << "\n";
            const covtour::Solution sol = covtour::decode_solution(inst, f, assignment);
            const double raw = covtour::objective_value(model, assignment);
            std::cout << "raw objective     " << raw << "\n";
            std::cout << "decoded evaluate  " << sol.cost.total_s << "\n";
            if (!dec_out.empty()) write_file(dec_out, covtour::save_solution(inst, sol));
            if (!violations.empty()) return kExitInfeasible;
            if (sol.cost.total_s > raw + 1e-6) {
                std::cout << "cross-check failed: decoded cost exceeds the raw objective\n";
                return kExitInfeasible;
            }
        } else if (*ora) {
            const covtour::ProblemInstance inst = covtour::load_instance(read_file(ora_path));
            const covtour::OracleResult result = covtour::solve_exact(inst, ora_splits != "off", ora_limits);
            std::cout << "explored " << result.explored << " combination(s)\n";
            print_cost(result.optimum.cost);
            if (!ora_out.empty()) write_file(ora_out, covtour::save_solution(inst, result.optimum));
        } else if (*cmp) {
            const covtour::ProblemInstance inst = covtour::load_instance(read_file(cmp_instance));
            const std::string text_a = read_file(cmp_a);
            const std::string text_b = read_file(cmp_b);
            const covtour::Solution a = covtour::load_solution(text_a, inst.digest());
            const covtour::Solution b = covtour::load_solution(text_b, inst.digest());
            const covtour::CostBreakdown cost_a = covtour::evaluate(inst, a);
            const covtour::CostBreakdown cost_b = covtour::evaluate(inst, b);
            const bool feas_a = covtour::check_feasible(inst, a).feasible();
            const bool feas_b = covtour::check_feasible(inst, b).feasible();
            const double rel = (cost_a.total_s - cost_b.total_s) / cost_b.total_s;
            std::cout << cmp_a << ": total_s " << cost_a.total_s << (feas_a ? " (feasible)" : " (INFEASIBLE)")
                      << "\n";
            std::cout << cmp_b << ": total_s " << cost_b.total_s << (feas_b ? " (feasible)" : " (INFEASIBLE)")
                      << "\n";
            std::cout << "relative difference " << rel * 100.0 << "%\n";
        }
    } catch (const covtour::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const covtour::LimitExceededError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const covtour::DecodeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const covtour::UncoveredError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
