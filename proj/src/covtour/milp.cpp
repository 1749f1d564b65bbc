#include "covtour/milp.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

namespace covtour {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
    char buf[48];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string vn(const char* prefix, std::initializer_list<long long> ids) {
    std::string s(prefix);
    for (long long id : ids) {
        s += '_';
        s += std::to_string(id);
    }
    return s;
}

}  // namespace

std::string formulation_name(Formulation f) {
    switch (f) {
        case Formulation::RnWs: return "RN-wS";
        case Formulation::RnNoS: return "RN-noS";
        case Formulation::CgWs: return "CG-wS";
        case Formulation::CgNoS: return "CG-noS";
    }
    return "?";
}

Formulation formulation_from_flag(const std::string& flag) {
    if (flag == "rn-ws") return Formulation::RnWs;
    if (flag == "rn-nos") return Formulation::RnNoS;
    if (flag == "cg-ws") return Formulation::CgWs;
    if (flag == "cg-nos") return Formulation::CgNoS;
    throw InvalidParamsError("unknown formulation \"" + flag + "\" (rn-ws|rn-nos|cg-ws|cg-nos)");
}

int MilpModel::add_variable(const std::string& name, VarType type, double lb, double ub) {
    const int id = static_cast<int>(vars_.size());
    if (!index_.emplace(name, id).second) throw ValidationError("duplicate variable " + name);
    vars_.push_back(MilpVariable{name, type, lb, ub});
    return id;
}

int MilpModel::var(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ValidationError("unknown variable " + name);
    return it->second;
}

void MilpModel::objective_term(int var, double coef) { objective_.push_back(MilpTerm{var, coef}); }

MilpConstraint& MilpModel::add_constraint(const std::string& name, Sense sense, double rhs) {
    constraints_.push_back(MilpConstraint{name, {}, sense, rhs});
    return constraints_.back();
}

namespace {

// Common ingredients shared by the formulation builders.
struct BuildContext {
    const ProblemInstance& inst;
    std::vector<NodeId> all_nodes;    // sorted
    std::vector<NodeId> stops;        // sorted candidate stops
    std::vector<NodeId> demand_ids;   // sorted demand nodes
    std::vector<std::pair<NodeId, NodeId>> arcs;  // sorted (tail, head)
    std::vector<double> arc_cost;     // seconds, parallel to arcs
    double capacity_units;
    double r;

    explicit BuildContext(const ProblemInstance& instance, bool customer_graph) : inst(instance) {
        stops = inst.network().candidate_stops();
        for (auto& [i, d] : inst.demands()) demand_ids.push_back(i);
        capacity_units = quantity_to_units(inst.capacity());
        r = inst.stop_penalty_s();
        if (customer_graph) {
            all_nodes.push_back(inst.network().depot());
            all_nodes.insert(all_nodes.end(), stops.begin(), stops.end());
            std::sort(all_nodes.begin(), all_nodes.end());
            for (NodeId a : all_nodes)
                for (NodeId b : all_nodes)
                    if (a != b) {
                        arcs.emplace_back(a, b);
                        arc_cost.push_back(inst.travel().cost(a, b));
                    }
        } else {
            for (const Node& n : inst.network().nodes()) all_nodes.push_back(n.id);
            std::sort(all_nodes.begin(), all_nodes.end());
            std::vector<std::pair<std::pair<NodeId, NodeId>, double>> tmp;
            for (const Arc& a : inst.network().arcs())
                tmp.push_back({{a.tail, a.head}, inst.travel().arc_seconds(a)});
            std::sort(tmp.begin(), tmp.end());
            for (auto& [key, c] : tmp) {
                arcs.push_back(key);
                arc_cost.push_back(c);
            }
        }
    }

    // Demand nodes whose preference list contains j, with demands in units.
    std::vector<std::pair<NodeId, double>> coverers(NodeId j) const {
        std::vector<std::pair<NodeId, double>> out;
        for (NodeId i : demand_ids) {
            const auto& list = inst.pref(i).ranked_stops;
            if (std::find(list.begin(), list.end(), j) != list.end())
                out.emplace_back(i, quantity_to_units(inst.demand(i)));
        }
        return out;
    }
};

// Variable blocks shared by the three vehicle-indexed formulations.
void declare_vehicle_indexed_vars(MilpModel& model, const BuildContext& ctx, int m) {
    for (auto& [t, h] : ctx.arcs)
        for (int k = 1; k <= m; ++k) model.add_variable(vn("x", {t, h, k}), VarType::IntegerNonNeg, 0.0, kInf);
    for (NodeId j : ctx.stops)
        for (int k = 1; k <= m; ++k) model.add_variable(vn("y", {j, k}), VarType::Binary, 0.0, 1.0);
    for (NodeId i : ctx.demand_ids)
        for (NodeId j : ctx.stops) model.add_variable(vn("z", {i, j}), VarType::Binary, 0.0, 1.0);
    for (NodeId j : ctx.stops)
        for (int k = 1; k <= m; ++k) model.add_variable(vn("q", {j, k}), VarType::Continuous, 0.0, kInf);
    for (auto& [t, h] : ctx.arcs)
        for (int k = 1; k <= m; ++k) model.add_variable(vn("f", {t, h, k}), VarType::Continuous, 0.0, kInf);
}

void objective_vehicle_indexed(MilpModel& model, const BuildContext& ctx, int m) {
    for (int k = 1; k <= m; ++k)
        for (std::size_t a = 0; a < ctx.arcs.size(); ++a)
            model.objective_term(model.var(vn("x", {ctx.arcs[a].first, ctx.arcs[a].second, k})), ctx.arc_cost[a]);
    for (int k = 1; k <= m; ++k)
        for (NodeId j : ctx.stops) model.objective_term(model.var(vn("y", {j, k})), ctx.r);
}

void coverage_constraints(MilpModel& model, const BuildContext& ctx) {
    for (NodeId i : ctx.demand_ids) {
        auto& c = model.add_constraint(vn("cover", {i}), Sense::EQ, 1.0);
        for (NodeId j : ctx.inst.pref(i).ranked_stops) c.terms.push_back({model.var(vn("z", {i, j})), 1.0});
    }
}

// First-visited-preference constraints; `sum_y_over_k` gives the strengthened
// no-split form summing y over vehicles.
void preference_constraints(MilpModel& model, const BuildContext& ctx, int m, bool sum_y_over_k) {
    for (NodeId i : ctx.demand_ids) {
        const auto& list = ctx.inst.pref(i).ranked_stops;
        for (std::size_t rank = 0; rank < list.size(); ++rank) {
            const NodeId j = list[rank];
            auto worse_terms = [&](MilpConstraint& c) {
                for (std::size_t rr = rank + 1; rr < list.size(); ++rr)
                    c.terms.push_back({model.var(vn("z", {i, list[rr]})), 1.0});
            };
            if (sum_y_over_k) {
                auto& c = model.add_constraint(vn("pref", {i, j}), Sense::LE, 1.0);
                worse_terms(c);
                for (int k = 1; k <= m; ++k) c.terms.push_back({model.var(vn("y", {j, k})), 1.0});
            } else {
                for (int k = 1; k <= m; ++k) {
                    auto& c = model.add_constraint(vn("pref", {i, j, k}), Sense::LE, 1.0);
                    worse_terms(c);
                    c.terms.push_back({model.var(vn("y", {j, k})), 1.0});
                }
            }
        }
    }
}

void quantity_constraints(MilpModel& model, const BuildContext& ctx, int m) {
    for (NodeId j : ctx.stops) {
        auto& c = model.add_constraint(vn("qty", {j}), Sense::EQ, 0.0);
        for (auto& [i, d] : ctx.coverers(j)) c.terms.push_back({model.var(vn("z", {i, j})), d});
        for (int k = 1; k <= m; ++k) c.terms.push_back({model.var(vn("q", {j, k})), -1.0});
    }
}

void capacity_constraints(MilpModel& model, const BuildContext& ctx, int m) {
    for (int k = 1; k <= m; ++k) {
        auto& c = model.add_constraint(vn("cap", {k}), Sense::LE, ctx.capacity_units);
        for (NodeId j : ctx.stops) c.terms.push_back({model.var(vn("q", {j, k})), 1.0});
    }
}

void degree_constraints(MilpModel& model, const BuildContext& ctx, int m) {
    for (NodeId h : ctx.all_nodes) {
        for (int k = 1; k <= m; ++k) {
            auto& c = model.add_constraint(vn("deg", {h, k}), Sense::EQ, 0.0);
            for (auto& [t, hh] : ctx.arcs) {
                if (hh == h) c.terms.push_back({model.var(vn("x", {t, hh, k})), 1.0});
                if (t == h) c.terms.push_back({model.var(vn("x", {t, hh, k})), -1.0});
            }
        }
    }
}

void flow_constraints(MilpModel& model, const BuildContext& ctx, int m) {
    const NodeId depot = ctx.inst.network().depot();
    for (NodeId h : ctx.all_nodes) {
        if (h == depot) continue;
        const bool is_stop = std::binary_search(ctx.stops.begin(), ctx.stops.end(), h);
        for (int k = 1; k <= m; ++k) {
            auto& c = model.add_constraint(vn("flow", {h, k}), Sense::EQ, 0.0);
            for (auto& [t, hh] : ctx.arcs) {
                if (t == h) c.terms.push_back({model.var(vn("f", {t, hh, k})), 1.0});
                if (hh == h) c.terms.push_back({model.var(vn("f", {t, hh, k})), -1.0});
            }
            if (is_stop) c.terms.push_back({model.var(vn("q", {h, k})), -1.0});
        }
    }
    for (int k = 1; k <= m; ++k) {
        auto& c = model.add_constraint(vn("dflow", {k}), Sense::EQ, 0.0);
        for (auto& [t, hh] : ctx.arcs)
            if (hh == depot) c.terms.push_back({model.var(vn("f", {t, hh, k})), 1.0});
        for (NodeId j : ctx.stops) c.terms.push_back({model.var(vn("q", {j, k})), -1.0});
    }
}

void linking_constraints(MilpModel& model, const BuildContext& ctx, int m) {
    for (NodeId j : ctx.stops) {
        for (int k = 1; k <= m; ++k) {
            auto& c = model.add_constraint(vn("qlink", {j, k}), Sense::LE, 0.0);
            c.terms.push_back({model.var(vn("q", {j, k})), 1.0});
            c.terms.push_back({model.var(vn("y", {j, k})), -ctx.capacity_units});
        }
    }
    for (auto& [t, h] : ctx.arcs) {
        for (int k = 1; k <= m; ++k) {
            auto& c = model.add_constraint(vn("flink", {t, h, k}), Sense::LE, 0.0);
            c.terms.push_back({model.var(vn("f", {t, h, k})), 1.0});
            c.terms.push_back({model.var(vn("x", {t, h, k})), -ctx.capacity_units});
        }
    }
}

}  // namespace

MilpModel build_rn_ws(const ProblemInstance& inst, bool with_valid_ineq) {
    BuildContext ctx(inst, false);
    const int m = inst.m();
    MilpModel model;
    model.tag = formulation_name(Formulation::RnWs);
    model.instance_digest = inst.digest();

    declare_vehicle_indexed_vars(model, ctx, m);
    if (with_valid_ineq)
        for (NodeId j : ctx.stops) model.add_variable(vn("s", {j}), VarType::Binary, 0.0, 1.0);

    objective_vehicle_indexed(model, ctx, m);
    coverage_constraints(model, ctx);
    preference_constraints(model, ctx, m, false);
    quantity_constraints(model, ctx, m);
    capacity_constraints(model, ctx, m);
    for (NodeId j : ctx.stops) {
        for (int k = 1; k <= m; ++k) {
            auto& c = model.add_constraint(vn("stop", {j, k}), Sense::GE, 0.0);
            for (auto& [t, h] : ctx.arcs)
                if (h == j) c.terms.push_back({model.var(vn("x", {t, h, k})), 1.0});
            c.terms.push_back({model.var(vn("y", {j, k})), -1.0});
        }
    }
    degree_constraints(model, ctx, m);
    flow_constraints(model, ctx, m);
    linking_constraints(model, ctx, m);

    if (with_valid_ineq) {
        for (NodeId j : ctx.stops) {
            auto& ub = model.add_constraint(vn("svi_ub", {j}), Sense::LE, 0.0);
            ub.terms.push_back({model.var(vn("s", {j})), 1.0});
            for (int k = 1; k <= m; ++k) ub.terms.push_back({model.var(vn("y", {j, k})), -1.0});
            for (int k = 1; k <= m; ++k) {
                auto& lb = model.add_constraint(vn("svi_lb", {j, k}), Sense::GE, 0.0);
                lb.terms.push_back({model.var(vn("s", {j})), 1.0});
                lb.terms.push_back({model.var(vn("y", {j, k})), -1.0});
            }
        }
        auto& c = model.add_constraint("split_bound", Sense::LE, static_cast<double>(m - 1));
        for (NodeId j : ctx.stops)
            for (int k = 1; k <= m; ++k) c.terms.push_back({model.var(vn("y", {j, k})), 1.0});
        for (NodeId j : ctx.stops) c.terms.push_back({model.var(vn("s", {j})), -1.0});
    }
    return model;
}

MilpModel build_rn_nos(const ProblemInstance& inst) {
    BuildContext ctx(inst, false);
    const int m = inst.m();
    MilpModel model;
    model.tag = formulation_name(Formulation::RnNoS);
    model.instance_digest = inst.digest();

    declare_vehicle_indexed_vars(model, ctx, m);
    objective_vehicle_indexed(model, ctx, m);
    coverage_constraints(model, ctx);
    preference_constraints(model, ctx, m, true);
    for (NodeId j : ctx.stops) {
        auto& c = model.add_constraint(vn("nosplit", {j}), Sense::LE, 1.0);
        for (int k = 1; k <= m; ++k) c.terms.push_back({model.var(vn("y", {j, k})), 1.0});
    }
    quantity_constraints(model, ctx, m);
    capacity_constraints(model, ctx, m);
    for (NodeId j : ctx.stops) {
        for (int k = 1; k <= m; ++k) {
            auto& c = model.add_constraint(vn("stop", {j, k}), Sense::GE, 0.0);
            for (auto& [t, h] : ctx.arcs)
                if (h == j) c.terms.push_back({model.var(vn("x", {t, h, k})), 1.0});
            c.terms.push_back({model.var(vn("y", {j, k})), -1.0});
        }
    }
    degree_constraints(model, ctx, m);
    flow_constraints(model, ctx, m);
    linking_constraints(model, ctx, m);
    return model;
}

MilpModel build_cg_ws(const ProblemInstance& inst) {
    BuildContext ctx(inst, true);
    const int m = inst.m();
    MilpModel model;
    model.tag = formulation_name(Formulation::CgWs);
    model.instance_digest = inst.digest();

    declare_vehicle_indexed_vars(model, ctx, m);
    objective_vehicle_indexed(model, ctx, m);
    coverage_constraints(model, ctx);
    preference_constraints(model, ctx, m, false);
    quantity_constraints(model, ctx, m);
    capacity_constraints(model, ctx, m);
    // Passing through a customer-graph node means stopping there: outgoing
    // degree equals y.
    for (NodeId j : ctx.stops) {
        for (int k = 1; k <= m; ++k) {
            auto& c = model.add_constraint(vn("stop", {j, k}), Sense::EQ, 0.0);
            for (auto& [t, h] : ctx.arcs)
                if (t == j) c.terms.push_back({model.var(vn("x", {t, h, k})), 1.0});
            c.terms.push_back({model.var(vn("y", {j, k})), -1.0});
        }
    }
    degree_constraints(model, ctx, m);
    flow_constraints(model, ctx, m);
    linking_constraints(model, ctx, m);
    return model;
}

MilpModel build_cg_nos(const ProblemInstance& inst) {
    BuildContext ctx(inst, true);
    const int m = inst.m();
    const NodeId depot = inst.network().depot();
    MilpModel model;
    model.tag = formulation_name(Formulation::CgNoS);
    model.instance_digest = inst.digest();

    for (auto& [t, h] : ctx.arcs) model.add_variable(vn("x", {t, h}), VarType::Binary, 0.0, 1.0);
    for (NodeId j : ctx.stops) model.add_variable(vn("y", {j}), VarType::Binary, 0.0, 1.0);
    for (NodeId i : ctx.demand_ids)
        for (NodeId j : ctx.stops) model.add_variable(vn("z", {i, j}), VarType::Binary, 0.0, 1.0);
    for (NodeId j : ctx.stops) model.add_variable(vn("q", {j}), VarType::Continuous, 0.0, kInf);
    for (auto& [t, h] : ctx.arcs) model.add_variable(vn("f", {t, h}), VarType::Continuous, 0.0, kInf);

    for (NodeId j : ctx.stops) model.objective_term(model.var(vn("y", {j})), ctx.r);
    for (std::size_t a = 0; a < ctx.arcs.size(); ++a)
        model.objective_term(model.var(vn("x", {ctx.arcs[a].first, ctx.arcs[a].second})), ctx.arc_cost[a]);

    coverage_constraints(model, ctx);
    for (NodeId i : ctx.demand_ids) {
        const auto& list = ctx.inst.pref(i).ranked_stops;
        for (std::size_t rank = 0; rank < list.size(); ++rank) {
            auto& c = model.add_constraint(vn("pref", {i, list[rank]}), Sense::LE, 1.0);
            for (std::size_t rr = rank + 1; rr < list.size(); ++rr)
                c.terms.push_back({model.var(vn("z", {i, list[rr]})), 1.0});
            c.terms.push_back({model.var(vn("y", {list[rank]})), 1.0});
        }
    }
    for (NodeId j : ctx.stops) {
        auto& c = model.add_constraint(vn("qty", {j}), Sense::EQ, 0.0);
        for (auto& [i, d] : ctx.coverers(j)) c.terms.push_back({model.var(vn("z", {i, j})), d});
        c.terms.push_back({model.var(vn("q", {j})), -1.0});
    }
    for (NodeId j : ctx.stops) {
        auto& c = model.add_constraint(vn("stop", {j}), Sense::EQ, 0.0);
        for (auto& [t, h] : ctx.arcs)
            if (t == j) c.terms.push_back({model.var(vn("x", {t, h})), 1.0});
        c.terms.push_back({model.var(vn("y", {j})), -1.0});
    }
    for (NodeId h : ctx.all_nodes) {
        auto& c = model.add_constraint(vn("deg", {h}), Sense::EQ, 0.0);
        for (auto& [t, hh] : ctx.arcs) {
            if (hh == h) c.terms.push_back({model.var(vn("x", {t, hh})), 1.0});
            if (t == h) c.terms.push_back({model.var(vn("x", {t, hh})), -1.0});
        }
    }
    {
        auto& c = model.add_constraint("depot_out", Sense::EQ, static_cast<double>(m));
        for (auto& [t, h] : ctx.arcs)
            if (t == depot) c.terms.push_back({model.var(vn("x", {t, h})), 1.0});
    }
    for (NodeId j : ctx.stops) {
        auto& c = model.add_constraint(vn("flow", {j}), Sense::EQ, 0.0);
        for (auto& [t, h] : ctx.arcs) {
            if (t == j) c.terms.push_back({model.var(vn("f", {t, h})), 1.0});
            if (h == j) c.terms.push_back({model.var(vn("f", {t, h})), -1.0});
        }
        c.terms.push_back({model.var(vn("q", {j})), -1.0});
    }
    {
        auto& c = model.add_constraint("dflow", Sense::EQ, 0.0);
        for (auto& [t, h] : ctx.arcs) {
            if (h == depot) c.terms.push_back({model.var(vn("f", {t, h})), 1.0});
            if (t == depot) c.terms.push_back({model.var(vn("f", {t, h})), -1.0});
        }
        for (NodeId j : ctx.stops) c.terms.push_back({model.var(vn("q", {j})), -1.0});
    }
    for (NodeId j : ctx.stops) {
        auto& c = model.add_constraint(vn("qlink", {j}), Sense::LE, 0.0);
        c.terms.push_back({model.var(vn("q", {j})), 1.0});
        c.terms.push_back({model.var(vn("y", {j})), -ctx.capacity_units});
    }
    for (auto& [t, h] : ctx.arcs) {
        auto& c = model.add_constraint(vn("flink", {t, h}), Sense::LE, 0.0);
        c.terms.push_back({model.var(vn("f", {t, h})), 1.0});
        c.terms.push_back({model.var(vn("x", {t, h})), -ctx.capacity_units});
    }
    return model;
}

MilpModel build_formulation(const ProblemInstance& inst, Formulation f, bool with_valid_ineq) {
    switch (f) {
        case Formulation::RnWs: return build_rn_ws(inst, with_valid_ineq);
        case Formulation::RnNoS: return build_rn_nos(inst);
        case Formulation::CgWs: return build_cg_ws(inst);
        case Formulation::CgNoS: return build_cg_nos(inst);
    }
    throw InvalidParamsError("bad formulation");
}

namespace {

std::string expression_text(const MilpModel& model, const std::vector<MilpTerm>& terms) {
    std::string out;
    bool first = true;
    for (const MilpTerm& t : terms) {
        const double c = t.coef;
        const std::string& name = model.variables()[static_cast<std::size_t>(t.var)].name;
        if (first) {
            if (c == 1.0)
                out += name;
            else if (c == -1.0)
                out += "- " + name;
            else
                out += num(c) + " " + name;
            first = false;
        } else {
            const double a = std::abs(c);
            out += (c < 0.0) ? " - " : " + ";
            if (a == 1.0)
                out += name;
            else
                out += num(a) + " " + name;
        }
    }
    return out;
}

void emit_wrapped(std::string& out, const std::string& line) {
    constexpr std::size_t kWidth = 200;
    if (line.size() + 1 <= kWidth) {
        out += " " + line + "\n";
        return;
    }
    std::size_t begin = 0;
    bool first = true;
    while (begin < line.size()) {
        std::size_t end = std::min(line.size(), begin + kWidth - 4);
        if (end < line.size()) {
            const std::size_t brk = line.rfind(" + ", end);
            const std::size_t brk2 = line.rfind(" - ", end);
            std::size_t cut = std::string::npos;
            if (brk != std::string::npos && brk > begin) cut = brk;
            if (brk2 != std::string::npos && brk2 > begin && (cut == std::string::npos || brk2 > cut)) cut = brk2;
            if (cut != std::string::npos && cut > begin) end = cut;
        }
        out += (first ? " " : "   ") + line.substr(begin, end - begin) + "\n";
        begin = end;
        if (begin < line.size() && line[begin] == ' ') ++begin;  // leading space of " + ..."
        first = false;
    }
}

const char* sense_text(Sense s) {
    switch (s) {
        case Sense::LE: return "<=";
        case Sense::GE: return ">=";
        case Sense::EQ: return "=";
    }
    return "?";
}

}  // namespace

std::string export_lp(const MilpModel& model) {
    std::string out;
    out += "\\ formulation: " + model.tag + "\n";
    out += "\\ instance: " + model.instance_digest + "\n";
    out += "Minimize\n";
    emit_wrapped(out, "obj: " + expression_text(model, model.objective()));
    out += "Subject To\n";
    for (const MilpConstraint& c : model.constraints()) {
        emit_wrapped(out, c.name + ": " + expression_text(model, c.terms) + " " + sense_text(c.sense) + " " +
                              num(c.rhs));
    }
    std::vector<const MilpVariable*> sorted;
    for (const MilpVariable& v : model.variables()) sorted.push_back(&v);
    std::sort(sorted.begin(), sorted.end(),
              [](const MilpVariable* a, const MilpVariable* b) { return a->name < b->name; });
    out += "Bounds\n";
    for (const MilpVariable* v : sorted) {
        if (v->type != VarType::Continuous) continue;
        if (v->ub == kInf)
            out += " " + num(v->lb) + " <= " + v->name + "\n";
        else
            out += " " + num(v->lb) + " <= " + v->name + " <= " + num(v->ub) + "\n";
    }
    out += "Generals\n";
    for (const MilpVariable* v : sorted)
        if (v->type == VarType::IntegerNonNeg) out += " " + v->name + "\n";
    out += "Binary\n";
    for (const MilpVariable* v : sorted)
        if (v->type == VarType::Binary) out += " " + v->name + "\n";
    out += "End\n";
    return out;
}

namespace {

bool is_number_token(const std::string& tok) {
    return !tok.empty() && (std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '.' ||
                            ((tok[0] == '-' || tok[0] == '+') && tok.size() > 1));
}

double parse_number(const std::string& tok) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size()) throw ParseError("bad number \"" + tok + "\" in LP file");
    return v;
}

// expr tokens -> terms; returns the index just past the expression.
std::size_t parse_terms(MilpModel& model, const std::vector<std::string>& toks, std::size_t pos,
                        std::vector<MilpTerm>& terms) {
    double sign = 1.0;
    std::optional<double> coef;
    auto ensure_var = [&](const std::string& name) {
        if (!model.has_var(name)) model.add_variable(name, VarType::Continuous, 0.0, kInf);
        return model.var(name);
    };
    while (pos < toks.size()) {
        const std::string& tok = toks[pos];
        if (tok == "<=" || tok == ">=" || tok == "=") break;
        if (tok == "+") {
            sign = 1.0;
        } else if (tok == "-") {
            sign = -1.0;
        } else if (is_number_token(tok)) {
            coef = parse_number(tok);
        } else {
            terms.push_back(MilpTerm{ensure_var(tok), sign * coef.value_or(1.0)});
            sign = 1.0;
            coef.reset();
        }
        ++pos;
    }
    return pos;
}

}  // namespace

MilpModel parse_lp(const std::string& text) {
    MilpModel model;
    std::vector<std::pair<std::string, std::string>> logical;  // (section, line)
    {
        std::istringstream is(text);
        std::string line;
        std::string section;
        while (std::getline(is, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            if (line.empty()) continue;
            if (line[0] == '\\') {
                const std::string meta = line.substr(1);
                const auto colon = meta.find(':');
                if (colon != std::string::npos) {
                    std::string key = meta.substr(0, colon);
                    std::string val = meta.substr(colon + 1);
                    auto trim = [](std::string& s) {
                        while (!s.empty() && s.front() == ' ') s.erase(s.begin());
                        while (!s.empty() && s.back() == ' ') s.pop_back();
                    };
                    trim(key);
                    trim(val);
                    if (key == "formulation") model.tag = val;
                    if (key == "instance") model.instance_digest = val;
                }
                continue;
            }
            if (line[0] != ' ') {
                section = line;
                if (section == "End") break;
                continue;
            }
            if (line.rfind("   ", 0) == 0) {
                if (logical.empty()) throw ParseError("continuation line before any logical line");
                logical.back().second += " " + line.substr(3);
            } else {
                logical.emplace_back(section, line.substr(1));
            }
        }
    }

    for (auto& [section, line] : logical) {
        std::vector<std::string> toks;
        {
            std::istringstream ls(line);
            std::string t;
            while (ls >> t) toks.push_back(t);
        }
        if (toks.empty()) continue;
        if (section == "Minimize") {
            if (toks[0] != "obj:") throw ParseError("objective must be named obj");
            std::vector<MilpTerm> terms;
            parse_terms(model, toks, 1, terms);
            for (const MilpTerm& t : terms) model.objective_term(t.var, t.coef);
        } else if (section == "Subject To") {
            if (toks[0].empty() || toks[0].back() != ':')
                throw ParseError("constraint line without name: " + line);
            const std::string name = toks[0].substr(0, toks[0].size() - 1);
            std::vector<MilpTerm> terms;
            const std::size_t pos = parse_terms(model, toks, 1, terms);
            if (pos + 2 != toks.size()) throw ParseError("malformed constraint: " + line);
            Sense sense;
            if (toks[pos] == "<=")
                sense = Sense::LE;
            else if (toks[pos] == ">=")
                sense = Sense::GE;
            else if (toks[pos] == "=")
                sense = Sense::EQ;
            else
                throw ParseError("bad sense in: " + line);
            auto& c = model.add_constraint(name, sense, parse_number(toks[pos + 1]));
            c.terms = std::move(terms);
        } else if (section == "Bounds") {
            // forms: "lo <= var" or "lo <= var <= ub"
            if (toks.size() == 3 && toks[1] == "<=") {
                const int v = model.has_var(toks[2]) ? model.var(toks[2])
                                                     : model.add_variable(toks[2], VarType::Continuous, 0.0, kInf);
                model.variable(v).lb = parse_number(toks[0]);
            } else if (toks.size() == 5 && toks[1] == "<=" && toks[3] == "<=") {
                const int v = model.has_var(toks[2]) ? model.var(toks[2])
                                                     : model.add_variable(toks[2], VarType::Continuous, 0.0, kInf);
                auto& mv = model.variable(v);
                mv.lb = parse_number(toks[0]);
                mv.ub = parse_number(toks[4]);
            } else {
                throw ParseError("unsupported bound line: " + line);
            }
        } else if (section == "Generals" || section == "Binary") {
            for (const std::string& name : toks) {
                const int v = model.has_var(name) ? model.var(name)
                                                  : model.add_variable(name, VarType::Continuous, 0.0, kInf);
                auto& mv = model.variable(v);
                mv.type = section == "Binary" ? VarType::Binary : VarType::IntegerNonNeg;
                if (mv.type == VarType::Binary) {
                    mv.lb = 0.0;
                    mv.ub = 1.0;
                }
            }
        } else {
            throw ParseError("content outside a known LP section: " + line);
        }
    }
    return model;
}

VariableAssignment parse_assignment(const std::string& text) {
    VariableAssignment out;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string name;
        if (!(ls >> name)) continue;
        double value;
        if (!(ls >> value)) throw ParseError("line " + std::to_string(lineno) + ": expected \"name value\"");
        std::string extra;
        if (ls >> extra) throw ParseError("line " + std::to_string(lineno) + ": trailing content \"" + extra + "\"");
        out[name] = value;
    }
    return out;
}

double objective_value(const MilpModel& model, const VariableAssignment& assignment) {
    double total = 0.0;
    for (const MilpTerm& t : model.objective()) {
        auto it = assignment.find(model.variables()[static_cast<std::size_t>(t.var)].name);
        if (it != assignment.end()) total += t.coef * it->second;
    }
    return total;
}

std::vector<std::string> check_assignment(const MilpModel& model, const VariableAssignment& assignment, double tol) {
    std::vector<std::string> out;
    auto value = [&](int var) {
        auto it = assignment.find(model.variables()[static_cast<std::size_t>(var)].name);
        return it == assignment.end() ? 0.0 : it->second;
    };
    for (const MilpVariable& v : model.variables()) {
        const auto it = assignment.find(v.name);
        const double x = it == assignment.end() ? 0.0 : it->second;
        if (x < v.lb - tol || x > v.ub + tol)
            out.push_back("bounds: " + v.name + " = " + num(x) + " outside [" + num(v.lb) + ", " + num(v.ub) + "]");
        if (v.type != VarType::Continuous && std::abs(x - std::round(x)) > tol)
            out.push_back("integrality: " + v.name + " = " + num(x));
    }
    std::set<std::string> known;
    for (const MilpVariable& v : model.variables()) known.insert(v.name);
    for (auto& [name, x] : assignment)
        if (!known.count(name)) out.push_back("unknown variable: " + name);
    for (const MilpConstraint& c : model.constraints()) {
        double lhs = 0.0;
        for (const MilpTerm& t : c.terms) lhs += t.coef * value(t.var);
        const bool bad = (c.sense == Sense::LE && lhs > c.rhs + tol) || (c.sense == Sense::GE && lhs < c.rhs - tol) ||
                         (c.sense == Sense::EQ && std::abs(lhs - c.rhs) > tol);
        if (bad)
            out.push_back("constraint " + c.name + ": lhs = " + num(lhs) + " " + sense_text(c.sense) + " " +
                          num(c.rhs) + " violated");
    }
    return out;
}

namespace {

// Arc-level walk bookkeeping for the flow encoding: traverse the tour legs,
// accumulating the collected load, dumping it whenever the depot is reached.
void encode_rn_vehicle(const ProblemInstance& inst, const Tour& tour, int k, VariableAssignment& a) {
    if (tour.stops.empty()) return;
    const NodeId depot = inst.network().depot();
    double load = 0.0;
    NodeId cur = depot;
    auto traverse = [&](NodeId target, double pickup_after) {
        for (const Arc& arc : inst.travel().expand(cur, target)) {
            a[vn("x", {arc.tail, arc.head, k})] += 1.0;
            a[vn("f", {arc.tail, arc.head, k})] += load;
            if (arc.head == depot) load = 0.0;
        }
        cur = target;
        load += pickup_after;
    };
    for (const TourStop& s : tour.stops) traverse(s.node, quantity_to_units(s.qty));
    traverse(depot, 0.0);
}

void encode_cg_vehicle(const ProblemInstance& inst, const Tour& tour, int k, bool with_k, VariableAssignment& a) {
    if (tour.stops.empty()) return;
    const NodeId depot = inst.network().depot();
    double load = 0.0;
    NodeId cur = depot;
    auto leg = [&](NodeId target, double pickup_after) {
        if (with_k) {
            a[vn("x", {cur, target, k})] += 1.0;
            a[vn("f", {cur, target, k})] += load;
        } else {
            a[vn("x", {cur, target})] += 1.0;
            a[vn("f", {cur, target})] += load;
        }
        cur = target;
        if (target == depot) load = 0.0;
        load += pickup_after;
    };
    for (const TourStop& s : tour.stops) leg(s.node, quantity_to_units(s.qty));
    leg(depot, 0.0);
}

}  // namespace

VariableAssignment encode_solution(const ProblemInstance& inst, const MilpModel& model, const Solution& sol) {
    Formulation f;
    if (model.tag == "RN-wS")
        f = Formulation::RnWs;
    else if (model.tag == "RN-noS")
        f = Formulation::RnNoS;
    else if (model.tag == "CG-wS")
        f = Formulation::CgWs;
    else if (model.tag == "CG-noS")
        f = Formulation::CgNoS;
    else
        throw ValidationError("model has no recognizable formulation tag");

    if (static_cast<int>(sol.tours.size()) != inst.m())
        throw ValidationError("solution must have exactly m tours to encode");
    if (f == Formulation::CgNoS) {
        for (const Tour& t : sol.tours)
            if (t.stops.empty())
                throw ValidationError("CG-noS forces the depot out-degree to m; all m tours must be nonempty");
    }

    VariableAssignment a;
    for (const MilpVariable& v : model.variables()) a[v.name] = 0.0;

    for (int k = 1; k <= inst.m(); ++k) {
        const Tour& tour = sol.tours[static_cast<std::size_t>(k - 1)];
        switch (f) {
            case Formulation::RnWs:
            case Formulation::RnNoS: encode_rn_vehicle(inst, tour, k, a); break;
            case Formulation::CgWs: encode_cg_vehicle(inst, tour, k, true, a); break;
            case Formulation::CgNoS: encode_cg_vehicle(inst, tour, k, false, a); break;
        }
        for (const TourStop& s : tour.stops) {
            if (f == Formulation::CgNoS) {
                a[vn("y", {s.node})] = 1.0;
                a[vn("q", {s.node})] += quantity_to_units(s.qty);
            } else {
                a[vn("y", {s.node, k})] = 1.0;
                a[vn("q", {s.node, k})] += quantity_to_units(s.qty);
            }
        }
    }
    for (auto& [i, j] : sol.assignment) a[vn("z", {i, j})] = 1.0;
    if (f == Formulation::RnWs && model.has_var(vn("s", {inst.network().candidate_stops().front()}))) {
        for (const Tour& tour : sol.tours)
            for (const TourStop& s : tour.stops) a[vn("s", {s.node})] = 1.0;
    }

    for (auto& [name, value] : a) {
        if (!model.has_var(name))
            throw ValidationError("encoding produced variable " + name + " absent from the model");
        (void)value;
    }
    return a;
}

namespace {

struct ParsedVars {
    // key: encoded tuple -> value
    std::map<std::tuple<NodeId, NodeId, int>, long long> x;  // arc traversals per vehicle
    std::map<std::pair<NodeId, int>, double> y;
    std::map<std::pair<NodeId, int>, double> q;
    std::map<std::pair<NodeId, NodeId>, double> z;  // (demand, stop)
};

std::vector<long long> split_ids(const std::string& name) {
    std::vector<long long> out;
    std::size_t pos = name.find('_');
    while (pos != std::string::npos) {
        const std::size_t next = name.find('_', pos + 1);
        const std::string part = name.substr(pos + 1, next == std::string::npos ? next : next - pos - 1);
        long long v = 0;
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc{} || p != part.data() + part.size())
            throw ParseError("variable name \"" + name + "\" has a non-numeric index");
        out.push_back(v);
        pos = next;
    }
    return out;
}

ParsedVars parse_vars(const VariableAssignment& assignment, bool vehicle_indexed, double tol) {
    ParsedVars out;
    for (auto& [name, value] : assignment) {
        if (name.empty()) continue;
        const char kind = name[0];
        const auto ids = split_ids(name);
        auto expect = [&](std::size_t n) {
            if (ids.size() != n)
                throw ParseError("variable \"" + name + "\" has " + std::to_string(ids.size()) +
                                 " indices, expected " + std::to_string(n));
        };
        switch (kind) {
            case 'x': {
                expect(vehicle_indexed ? 3 : 2);
                const long long rounded = std::llround(value);
                if (std::abs(value - static_cast<double>(rounded)) > tol || rounded < 0)
                    throw DecodeError("variable " + name + " = " + num(value) + " is not a traversal count");
                if (rounded == 0) break;
                const int k = vehicle_indexed ? static_cast<int>(ids[2]) : 1;
                out.x[{static_cast<NodeId>(ids[0]), static_cast<NodeId>(ids[1]), k}] = rounded;
                break;
            }
            case 'y': {
                expect(vehicle_indexed ? 2 : 1);
                const int k = vehicle_indexed ? static_cast<int>(ids[1]) : 1;
                out.y[{static_cast<NodeId>(ids[0]), k}] = value;
                break;
            }
            case 'q': {
                expect(vehicle_indexed ? 2 : 1);
                const int k = vehicle_indexed ? static_cast<int>(ids[1]) : 1;
                out.q[{static_cast<NodeId>(ids[0]), k}] = value;
                break;
            }
            case 'z': {
                expect(2);
                out.z[{static_cast<NodeId>(ids[0]), static_cast<NodeId>(ids[1])}] = value;
                break;
            }
            case 'f':
            case 's': break;  // flow and split indicators are not needed to rebuild tours
            default: throw ParseError("unknown variable \"" + name + "\" in assignment");
        }
    }
    return out;
}

// Eulerian circuit from `start` over the weak component containing it;
// deterministic (successors consumed in ascending order). Returns the node
// walk including both endpoints, or an empty walk when `start` has no arcs.
std::vector<NodeId> euler_walk(const std::multiset<std::pair<NodeId, NodeId>>& arcs, NodeId start, int vehicle) {
    std::map<NodeId, long long> degree;  // out - in
    std::map<NodeId, std::vector<NodeId>> succ;
    for (auto& [t, h] : arcs) {
        degree[t] += 1;
        degree[h] -= 1;
        succ[t].push_back(h);
    }
    for (auto& [node, d] : degree)
        if (d != 0) throw NotEulerianError(vehicle);
    if (!succ.count(start)) return {};
    for (auto& [node, heads] : succ) std::sort(heads.begin(), heads.end());

    std::map<NodeId, std::size_t> cursor;
    std::vector<NodeId> stack{start};
    std::vector<NodeId> walk;
    while (!stack.empty()) {
        const NodeId v = stack.back();
        auto& cur = cursor[v];
        auto it = succ.find(v);
        if (it != succ.end() && cur < it->second.size()) {
            stack.push_back(it->second[cur]);
            ++cur;
        } else {
            walk.push_back(v);
            stack.pop_back();
        }
    }
    std::reverse(walk.begin(), walk.end());
    return walk;
}

// Weak-connectivity component of `start` over the arc support.
std::set<NodeId> depot_component(const std::multiset<std::pair<NodeId, NodeId>>& arcs, NodeId start) {
    std::map<NodeId, std::vector<NodeId>> nbr;
    for (auto& [t, h] : arcs) {
        nbr[t].push_back(h);
        nbr[h].push_back(t);
    }
    std::set<NodeId> seen;
    if (!nbr.count(start)) return seen;
    std::vector<NodeId> stack{start};
    seen.insert(start);
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (NodeId w : nbr[v])
            if (seen.insert(w).second) stack.push_back(w);
    }
    return seen;
}

}  // namespace

Solution decode_solution(const ProblemInstance& inst, Formulation f, const VariableAssignment& assignment) {
    constexpr double tol = 1e-6;
    const bool vehicle_indexed = f != Formulation::CgNoS;
    const ParsedVars vars = parse_vars(assignment, vehicle_indexed, tol);
    const NodeId depot = inst.network().depot();
    const int vehicles = vehicle_indexed ? inst.m() : 1;

    Solution sol;
    for (int k = 1; k <= vehicles; ++k) {
        std::multiset<std::pair<NodeId, NodeId>> arcs;
        for (auto& [key, count] : vars.x) {
            const auto& [t, h, kk] = key;
            if (kk != k) continue;
            for (long long c = 0; c < count; ++c) arcs.emplace(t, h);
        }
        {
            std::map<NodeId, long long> degree;
            for (auto& [t, h] : arcs) {
                degree[t] += 1;
                degree[h] -= 1;
            }
            for (auto& [node, d] : degree)
                if (d != 0) throw NotEulerianError(k);
        }
        const std::set<NodeId> comp = depot_component(arcs, depot);
        // A stop serving demand outside the depot component cannot be reached.
        for (auto& [key, qv] : vars.q) {
            if (key.second != k || qv <= tol) continue;
            if (!comp.count(key.first)) throw DisconnectedError(k, key.first);
        }
        std::multiset<std::pair<NodeId, NodeId>> comp_arcs;
        for (auto& [t, h] : arcs)
            if (comp.count(t)) comp_arcs.emplace(t, h);
        // Degree balance must hold on the kept component.
        const std::vector<NodeId> walk = euler_walk(comp_arcs, depot, k);

        if (f == Formulation::CgNoS) {
            // Split the single walk into tours at every depot return.
            Tour current;
            for (std::size_t w = 1; w < walk.size(); ++w) {
                const NodeId node = walk[w];
                if (node == depot) {
                    if (!current.stops.empty()) sol.tours.push_back(std::move(current));
                    current = Tour{};
                    continue;
                }
                auto yit = vars.y.find({node, 1});
                if (yit == vars.y.end() || std::abs(yit->second - 1.0) > tol) continue;
                auto qit = vars.q.find({node, 1});
                const Quantity qty =
                    qit == vars.q.end() ? 0 : std::llround(qit->second * static_cast<double>(kQuantityScale));
                if (qty <= 0) continue;
                current.stops.push_back(TourStop{node, qty});
            }
        } else {
            Tour tour;
            std::set<NodeId> recorded;
            for (std::size_t w = 0; w < walk.size(); ++w) {
                const NodeId node = walk[w];
                if (node == depot || recorded.count(node)) continue;
                auto yit = vars.y.find({node, k});
                if (yit == vars.y.end() || std::abs(yit->second - 1.0) > tol) continue;
                recorded.insert(node);
                auto qit = vars.q.find({node, k});
                const Quantity qty =
                    qit == vars.q.end() ? 0 : std::llround(qit->second * static_cast<double>(kQuantityScale));
                if (qty <= 0) continue;  // zero-quantity stops are pruned
                tour.stops.push_back(TourStop{node, qty});
            }
            sol.tours.push_back(std::move(tour));
        }
    }
    while (static_cast<int>(sol.tours.size()) < inst.m()) sol.tours.emplace_back();

    for (auto& [key, zv] : vars.z) {
        if (std::abs(zv - 1.0) <= tol) sol.assignment[key.first] = key.second;
    }
    sol.cost = evaluate(inst, sol);
    return sol;
}

}  // namespace covtour
