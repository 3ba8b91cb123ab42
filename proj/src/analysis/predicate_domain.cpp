#include "miniver/analysis/predicate_domain.hpp"

#include <algorithm>

#include "miniver/formula/wp.hpp"

namespace miniver {

std::string to_string(AbstractionMode m) { return m == AbstractionMode::Cartesian ? "cartesian" : "boolean"; }

std::string PredicateState::describe() const {
    return "abs=" + to_sexpr(abstraction) + " pf=" + to_sexpr(path_formula);
}

bool is_block_end(LocId l, const Cfa& cfa) {
    return cfa.loop_heads.count(l) || l == cfa.entry || l == cfa.exit || cfa.error_locations.count(l);
}

namespace {

/// Plain predicate plus its instantiation at the state's SSA indices.
struct InstantiatedPredicate {
    Formula plain;
    Formula at_state;
};

Formula abstraction_of(const Formula& phi, const std::vector<InstantiatedPredicate>& preds,
                       AbstractionMode mode, PredicateContext& ctx) {
    if (mode == AbstractionMode::Cartesian) {
        std::vector<Formula> parts;
        for (const auto& p : preds) {
            if (ctx.solver.entails(phi, p.at_state))
                parts.push_back(p.plain);
            else if (ctx.solver.entails(phi, Formula::negation(p.at_state)))
                parts.push_back(Formula::negation(p.plain));
        }
        return Formula::conjunction(std::move(parts));
    }
    // Boolean abstraction: all cubes over the predicates consistent with phi,
    // enumerated depth-first with unsat pruning.
    if (preds.size() > static_cast<size_t>(ctx.max_boolean_predicates))
        throw SolverLimitError("boolean abstraction: too many predicates");
    std::vector<Formula> cubes;
    std::vector<Formula> cube_plain, cube_state;
    auto dfs = [&](auto&& self, size_t i) -> void {
        std::vector<Formula> q = cube_state;
        q.push_back(phi);
        if (!ctx.solver.check(Formula::conjunction(std::move(q))).is_sat()) return;
        if (i == preds.size()) {
            cubes.push_back(Formula::conjunction(cube_plain));
            if (cubes.size() > static_cast<size_t>(ctx.max_cubes))
                throw SolverLimitError("boolean abstraction: cube explosion");
            return;
        }
        for (bool positive : {true, false}) {
            const auto& p = preds[i];
            cube_plain.push_back(positive ? p.plain : Formula::negation(p.plain));
            cube_state.push_back(positive ? p.at_state : Formula::negation(p.at_state));
            self(self, i + 1);
            cube_plain.pop_back();
            cube_state.pop_back();
        }
    };
    dfs(dfs, 0);
    return Formula::disjunction(std::move(cubes));
}

std::vector<InstantiatedPredicate> instantiate_all(const std::set<Predicate>& pi, const SsaState& ssa) {
    std::vector<InstantiatedPredicate> out;
    out.reserve(pi.size());
    for (const Predicate& p : pi) out.push_back({p.formula, instantiate(p.formula, ssa)});
    return out;
}

}  // namespace

Formula compute_abstraction(const Formula& phi, const std::set<Predicate>& pi, AbstractionMode mode,
                            Solver& solver) {
    PredicateContext ctx{solver};
    std::vector<InstantiatedPredicate> preds;
    preds.reserve(pi.size());
    for (const Predicate& p : pi) preds.push_back({p.formula, p.formula});
    return abstraction_of(phi, preds, mode, ctx);
}

std::optional<PredicateState> predicate_successor(const PredicateState& s, const CfaEdge& e,
                                                  const std::set<Predicate>& pi_target,
                                                  AbstractionMode mode, bool target_is_block_end,
                                                  PredicateContext& ctx) {
    PredicateState next = s;
    Formula constraint = ssa_edge_constraint(next.ssa, e);
    next.path_formula = Formula::conjunction({next.path_formula, constraint});
    if (!target_is_block_end) return next;

    // Block end: decide feasibility of the block and abstract.
    if (ctx.abstraction_counter) ++*ctx.abstraction_counter;
    SsaState zero;
    Formula phi = Formula::conjunction({instantiate(s.abstraction, zero), next.path_formula});
    if (!ctx.solver.check(phi).is_sat()) return std::nullopt;
    auto preds = instantiate_all(pi_target, next.ssa);
    Formula abs = abstraction_of(phi, preds, mode, ctx);
    PredicateState out;
    out.abstraction = std::move(abs);
    return out;
}

std::optional<PredicateState> merge_predicate(const PredicateState& s1, const PredicateState& s2) {
    if (!(s1.abstraction == s2.abstraction)) return std::nullopt;
    PredicateState out;
    out.abstraction = s1.abstraction;
    std::set<std::string> vars;
    for (const auto& [v, i] : s1.ssa.index) vars.insert(v);
    for (const auto& [v, i] : s2.ssa.index) vars.insert(v);
    for (const auto& v : vars) {
        out.ssa.index[v] = std::max(s1.ssa.current(v), s2.ssa.current(v));
        out.ssa.created[v] =
            std::max(s1.ssa.created.count(v) ? s1.ssa.created.at(v) : 0,
                     s2.ssa.created.count(v) ? s2.ssa.created.at(v) : 0);
    }
    auto adjusted = [&](const PredicateState& s) {
        std::vector<Formula> parts{s.path_formula};
        for (const auto& v : vars) {
            int from = s.ssa.current(v);
            int to = out.ssa.current(v);
            if (from != to)
                parts.push_back(Formula::compare(LinExpr::var(ssa_name(v, to)), CmpOp::Eq,
                                                 LinExpr::var(ssa_name(v, from))));
        }
        return Formula::conjunction(std::move(parts));
    };
    out.path_formula = Formula::disjunction({adjusted(s1), adjusted(s2)});
    return out;
}

PredicateRefinement refine_predicate(const std::vector<const CfaEdge*>& path,
                                     const std::vector<PredicateState>& states, const Cfa& cfa,
                                     const ProgramPrecision& current, AbstractionMode mode,
                                     Solver& solver) {
    PredicateRefinement out;
    out.increment.domain = DomainKind::Predicate;

    // Backward weakest precondition of false; harvest program-variable atoms
    // after every step, scoped to the function of the position's location.
    std::map<std::string, std::set<Predicate>> harvested;
    std::set<Predicate> all_atoms;
    Formula wp = Formula::truth(false);
    int fresh = 0;
    for (size_t k = path.size(); k-- > 0;) {
        wp = weakest_precondition(wp, *path[k], AssumeCombinator::Implication, fresh);
        for (const Predicate& a : atoms_of(wp)) {
            bool program_vars_only = true;
            for (const auto& v : a.formula.variables())
                if (!cfa.variables.count(v)) program_vars_only = false;
            if (!program_vars_only) continue;
            harvested[cfa.function_of(path[k]->source)].insert(a);
            all_atoms.insert(a);
        }
    }

    // Block-end positions along the path (position i = state after i edges).
    std::vector<size_t> block_ends;
    for (size_t i = 0; i <= path.size(); ++i) {
        LocId loc = i == 0 ? path[0]->source : path[i - 1]->target;
        if (is_block_end(loc, cfa)) block_ends.push_back(i);
    }

    for (bool widen : {false, true}) {
        ProgramPrecision inc;
        inc.domain = DomainKind::Predicate;
        if (widen) {
            std::set<std::string> fns;
            for (const CfaEdge* e : path) {
                fns.insert(cfa.function_of(e->source));
                fns.insert(cfa.function_of(e->target));
            }
            for (const auto& fn : fns) inc.per_function[fn].preds = all_atoms;
        } else {
            for (const auto& [fn, preds] : harvested) inc.per_function[fn].preds = preds;
        }
        std::erase_if(inc.per_function, [](const auto& kv) { return kv.second.empty(); });

        ProgramPrecision merged = union_of(current, inc);
        PredicateContext ctx{solver};  // no abstraction counting during refinement

        // Re-execute and find the earliest strengthened block-end state.
        std::optional<size_t> raw_pivot;
        PredicateState cur;
        for (size_t i = 1; i <= path.size() && !raw_pivot; ++i) {
            const CfaEdge* e = path[i - 1];
            bool be = is_block_end(e->target, cfa);
            auto next = predicate_successor(cur, *e, merged.effective_at(e->target, cfa).preds, mode, be, ctx);
            if (!next) {
                raw_pivot = i;  // re-execution reaches bottom where the ARG did not
                break;
            }
            cur = std::move(*next);
            if (be && i < states.size()) {
                if (!solver.entails(states[i].abstraction, cur.abstraction)) raw_pivot = i;
            }
        }
        if (!raw_pivot) continue;  // try widening

        out.progress = true;
        out.increment = std::move(inc);
        size_t pivot = *raw_pivot;
        if (pivot == path.size()) {
            // Only the final (error) state strengthens; prune from the
            // preceding block end so the whole block is recomputed.
            pivot = 0;
            for (size_t be : block_ends)
                if (be < path.size()) pivot = be;
        }
        out.pivot = pivot;
        return out;
    }
    return out;  // no progress
}

}  // namespace miniver
