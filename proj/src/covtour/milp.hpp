#ifndef COVTOUR_MILP_HPP_
#define COVTOUR_MILP_HPP_

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "covtour/solution.hpp"

namespace covtour {

enum class Formulation { RnWs, RnNoS, CgWs, CgNoS };

std::string formulation_name(Formulation f);        // "RN-wS", ...
Formulation formulation_from_flag(const std::string& flag);  // "rn-ws", ...

enum class VarType { Binary, IntegerNonNeg, Continuous };

struct MilpVariable {
    std::string name;
    VarType type;
    double lb = 0.0;
    double ub = 0.0;  // +inf for unbounded
};

struct MilpTerm {
    int var;
    double coef;
};

enum class Sense { LE, GE, EQ };

struct MilpConstraint {
    std::string name;
    std::vector<MilpTerm> terms;
    Sense sense;
    double rhs;
};

class MilpModel {
public:
    std::string tag;             // formulation display name
    std::string instance_digest;

    int add_variable(const std::string& name, VarType type, double lb, double ub);
    int var(const std::string& name) const;
    bool has_var(const std::string& name) const { return index_.count(name) != 0; }
    void objective_term(int var, double coef);
    MilpConstraint& add_constraint(const std::string& name, Sense sense, double rhs);

    const std::vector<MilpVariable>& variables() const { return vars_; }
    MilpVariable& variable(int id) { return vars_[static_cast<std::size_t>(id)]; }
    const std::vector<MilpTerm>& objective() const { return objective_; }
    const std::vector<MilpConstraint>& constraints() const { return constraints_; }

private:
    std::vector<MilpVariable> vars_;
    std::vector<MilpTerm> objective_;
    std::vector<MilpConstraint> constraints_;
    std::unordered_map<std::string, int> index_;
};

// The four formulations. Variable naming: x_{tail}_{head}_{k}, y_{j}_{k},
// z_{i}_{j}, q_{j}_{k}, f_{tail}_{head}_{k}, s_{j} (vehicle index dropped in
// CG-noS). Quantities in canonical units, costs in seconds.
MilpModel build_rn_ws(const ProblemInstance& inst, bool with_valid_ineq = true);
MilpModel build_rn_nos(const ProblemInstance& inst);
MilpModel build_cg_ws(const ProblemInstance& inst);
MilpModel build_cg_nos(const ProblemInstance& inst);
MilpModel build_formulation(const ProblemInstance& inst, Formulation f, bool with_valid_ineq = true);

// Deterministic LP text (CPLEX-style dialect); same model twice gives
// identical bytes.
std::string export_lp(const MilpModel& model);
// Reads back the dialect written by export_lp.
MilpModel parse_lp(const std::string& text);

using VariableAssignment = std::map<std::string, double>;

// "name value" per line, '#' comments.
VariableAssignment parse_assignment(const std::string& text);

double objective_value(const MilpModel& model, const VariableAssignment& assignment);
// Empty result means the assignment satisfies all constraints, bounds and
// integrality requirements within the tolerance.
std::vector<std::string> check_assignment(const MilpModel& model, const VariableAssignment& assignment,
                                          double tol = 1e-6);

// Writes the solution as model variables (every declared variable is set).
VariableAssignment encode_solution(const ProblemInstance& inst, const MilpModel& model, const Solution& sol);

// Rebuilds tours from a solver assignment: per-vehicle Eulerian cycle through
// the depot component (Hierholzer), unused components dropped, stops taken
// where y = 1, quantities from q, assignment from z.
Solution decode_solution(const ProblemInstance& inst, Formulation f, const VariableAssignment& assignment);

}  // namespace covtour

#endif
