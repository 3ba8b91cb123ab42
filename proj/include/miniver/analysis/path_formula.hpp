#pragma once

#include <map>
#include <string>
#include <vector>

#include "miniver/formula/formula.hpp"
#include "miniver/lang/cfa.hpp"

namespace miniver {

std::string ssa_name(const std::string& var, int idx);

/// Per-variable SSA indices along one path (or block). Variables start at
/// index 0; assignments and havocs bump to a fresh index.
struct SsaState {
    std::map<std::string, int> index;    // current index, absent = 0
    std::map<std::string, int> created;  // highest index handed out

    int current(const std::string& var) const {
        auto it = index.find(var);
        return it == index.end() ? 0 : it->second;
    }
    int fresh(const std::string& var) {
        int n = created.count(var) ? created[var] + 1 : 1;
        created[var] = n;
        index[var] = n;
        return n;
    }

    bool operator==(const SsaState& o) const { return index == o.index; }
};

/// Renames every program variable to its current SSA instance.
Formula instantiate(const Formula& plain, const SsaState& ssa);

/// Renames current SSA instances back to plain program variables.
Formula deinstantiate(const Formula& over_ssa, const SsaState& ssa, const std::set<std::string>& variables);

/// The edge's constraint over SSA names, advancing the indices. Havoc edges
/// contribute no constraint; the havocked instance is appended to inputs
/// when given (these are the path's nondeterministic inputs).
Formula ssa_edge_constraint(SsaState& ssa, const CfaEdge& e, std::vector<std::string>* inputs = nullptr);

/// Conjunction of all edge constraints of a path starting from fresh indices.
struct PathFormula {
    Formula formula;
    std::vector<std::string> inputs;  // SSA names introduced by havoc edges
    SsaState ssa;
};

PathFormula path_formula(const std::vector<const CfaEdge*>& path);

}  // namespace miniver
