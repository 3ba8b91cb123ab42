#include "miniver/analysis/path_formula.hpp"

namespace miniver {

std::string ssa_name(const std::string& var, int idx) { return var + "@" + std::to_string(idx); }

Formula instantiate(const Formula& plain, const SsaState& ssa) {
    std::map<std::string, std::string> renaming;
    for (const auto& v : plain.variables()) renaming[v] = ssa_name(v, ssa.current(v));
    return plain.renamed(renaming);
}

Formula deinstantiate(const Formula& over_ssa, const SsaState& ssa, const std::set<std::string>& variables) {
    std::map<std::string, std::string> renaming;
    for (const auto& v : variables) renaming[ssa_name(v, ssa.current(v))] = v;
    return over_ssa.renamed(renaming);
}

Formula ssa_edge_constraint(SsaState& ssa, const CfaEdge& e, std::vector<std::string>* inputs) {
    switch (e.op) {
        case CfaEdge::Op::Assign: {
            std::map<std::string, std::string> renaming;
            for (const auto& [v, c] : e.expr.coeffs) renaming[v] = ssa_name(v, ssa.current(v));
            LinExpr rhs = e.expr.renamed(renaming);
            LinExpr lhs = LinExpr::var(ssa_name(e.var, ssa.fresh(e.var)));
            return Formula::compare(lhs, CmpOp::Eq, rhs);
        }
        case CfaEdge::Op::Havoc: {
            int idx = ssa.fresh(e.var);
            if (inputs) inputs->push_back(ssa_name(e.var, idx));
            return Formula::truth(true);
        }
        case CfaEdge::Op::Assume: {
            std::map<std::string, std::string> renaming;
            for (const auto& v : e.cond.variables()) renaming[v] = ssa_name(v, ssa.current(v));
            return e.cond.renamed(renaming);
        }
        case CfaEdge::Op::Call:
        case CfaEdge::Op::Return:
        case CfaEdge::Op::Skip: return Formula::truth(true);
    }
    return Formula::truth(true);
}

PathFormula path_formula(const std::vector<const CfaEdge*>& path) {
    PathFormula out;
    std::vector<Formula> parts;
    for (const CfaEdge* e : path) parts.push_back(ssa_edge_constraint(out.ssa, *e, &out.inputs));
    out.formula = Formula::conjunction(std::move(parts));
    return out;
}

}  // namespace miniver
