#pragma once

#include <optional>
#include <set>
#include <vector>

#include "miniver/analysis/path_formula.hpp"
#include "miniver/formula/solver.hpp"
#include "miniver/lang/cfa.hpp"
#include "miniver/precision/precision.hpp"

namespace miniver {

enum class AbstractionMode { Cartesian, Boolean };

std::string to_string(AbstractionMode m);

/// Predicate-domain state under adjustable-block encoding: the abstraction
/// computed at the last block end (over plain variables), plus the SSA path
/// formula accumulated since. Right after an abstraction the path formula is
/// true and all SSA indices are 0.
struct PredicateState {
    Formula abstraction = Formula::truth(true);
    Formula path_formula = Formula::truth(true);
    SsaState ssa;

    bool operator==(const PredicateState& o) const {
        return abstraction == o.abstraction && path_formula == o.path_formula && ssa == o.ssa;
    }
    std::string describe() const;
};

/// Abstractions are computed at loop heads, at the program entry/exit, and
/// at error locations (so infeasibility is decided exactly there).
bool is_block_end(LocId l, const Cfa& cfa);

struct PredicateContext {
    Solver& solver;
    long long* abstraction_counter = nullptr;  // bumped per block-end computation
    int max_boolean_predicates = 24;
    int max_cubes = 4096;
};

/// Strongest cartesian or boolean combination of pi implied by phi.
/// phi and the predicates range over the same (plain) variables.
Formula compute_abstraction(const Formula& phi, const std::set<Predicate>& pi, AbstractionMode mode,
                            Solver& solver);

/// Abstract post along one edge. Inside a block only the path formula grows;
/// entering a block end conjoins abstraction and path formula, decides
/// feasibility, and computes the next abstraction (nullopt = bottom).
std::optional<PredicateState> predicate_successor(const PredicateState& s, const CfaEdge& e,
                                                  const std::set<Predicate>& pi_target,
                                                  AbstractionMode mode, bool target_is_block_end,
                                                  PredicateContext& ctx);

/// Merge of two states at the same within-block location: requires equal
/// abstractions; reconciles SSA indices and disjoins the path formulas.
/// Returns nullopt (keep separate) when the abstractions differ.
std::optional<PredicateState> merge_predicate(const PredicateState& s1, const PredicateState& s2);

struct PredicateRefinement {
    bool progress = false;       // some path state is strengthened
    ProgramPrecision increment;  // per-function predicate sets
    size_t pivot = 0;            // path state index to prune at
};

/// WP-based refinement of an infeasible path: walks backward accumulating
/// the weakest precondition of false, harvesting its atoms (function-scoped);
/// the pivot is the earliest block-end state strengthened by the increment,
/// measured against the explored states.
PredicateRefinement refine_predicate(const std::vector<const CfaEdge*>& path,
                                     const std::vector<PredicateState>& states, const Cfa& cfa,
                                     const ProgramPrecision& current, AbstractionMode mode,
                                     Solver& solver);

}  // namespace miniver
