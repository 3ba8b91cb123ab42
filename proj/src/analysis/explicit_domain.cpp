#include "miniver/analysis/explicit_domain.hpp"

#include <stdexcept>

namespace miniver {

std::string ExplicitState::describe() const {
    std::string s = "{";
    bool first = true;
    for (const auto& [v, k] : values) {
        if (!first) s += ", ";
        first = false;
        s += v + "=" + std::to_string(k);
    }
    return s + "}";
}

ExplicitState restrict_to(const ExplicitState& v, const std::set<std::string>& pi) {
    ExplicitState out;
    for (const auto& [name, value] : v.values)
        if (pi.count(name)) out.values.emplace(name, value);
    return out;
}

namespace {

/// Partial evaluation of an atom under v: the known part folds into a
/// residual constant, unknown terms stay symbolic.
struct Residual {
    std::map<std::string, Int> unknown;  // coefficients of unknown variables
    Int known = 0;                       // evaluated part of the left-hand side
};

Residual partial_eval(const LinearAtom& a, const ExplicitState& v) {
    Residual r;
    for (const auto& [name, coeff] : a.coeffs) {
        auto it = v.values.find(name);
        if (it == v.values.end())
            r.unknown[name] = coeff;
        else
            r.known += coeff * it->second;
    }
    return r;
}

/// Three-valued assume outcome plus an optional propagated constant.
enum class Outcome { True, False, Unknown };

Outcome eval_assume(const Formula& cond, const ExplicitState& v, std::optional<std::pair<std::string, Int>>& prop) {
    switch (cond.kind()) {
        case Formula::Kind::True: return Outcome::True;
        case Formula::Kind::False: return Outcome::False;
        case Formula::Kind::Not: {
            Outcome o = eval_assume(cond.children()[0], v, prop);
            prop.reset();  // no propagation through disequalities
            if (o == Outcome::True) return Outcome::False;
            if (o == Outcome::False) return Outcome::True;
            return Outcome::Unknown;
        }
        case Formula::Kind::Atom: {
            const LinearAtom& a = cond.atom_value();
            Residual r = partial_eval(a, v);
            if (r.unknown.empty()) {
                Int lhs = r.known;
                bool holds = a.rel == Rel::Le ? lhs <= a.bound : a.rel == Rel::Lt ? lhs < a.bound : lhs == a.bound;
                return holds ? Outcome::True : Outcome::False;
            }
            if (a.rel == Rel::Eq && r.unknown.size() == 1) {
                auto [name, coeff] = *r.unknown.begin();
                Int rhs = a.bound - r.known;
                if (rhs % coeff != 0) return Outcome::False;  // no integer solution
                prop = std::make_pair(name, rhs / coeff);
            }
            return Outcome::Unknown;
        }
        default:
            // assume conditions are atoms or negated atoms by construction
            throw std::logic_error("unexpected assume condition shape");
    }
}

}  // namespace

std::optional<ExplicitState> explicit_successor(const ExplicitState& v, const CfaEdge& e,
                                                const std::set<std::string>& pi_target) {
    ExplicitState out = v;
    switch (e.op) {
        case CfaEdge::Op::Assign: {
            bool known = true;
            Int acc = e.expr.constant;
            for (const auto& [name, coeff] : e.expr.coeffs) {
                auto it = v.values.find(name);
                if (it == v.values.end()) {
                    known = false;
                    break;
                }
                acc += coeff * it->second;
            }
            if (known)
                out.values[e.var] = acc;
            else
                out.values.erase(e.var);
            break;
        }
        case CfaEdge::Op::Havoc: out.values.erase(e.var); break;
        case CfaEdge::Op::Assume: {
            std::optional<std::pair<std::string, Int>> prop;
            Outcome o = eval_assume(e.cond, v, prop);
            if (o == Outcome::False) return std::nullopt;
            if (o == Outcome::Unknown && prop) out.values[prop->first] = prop->second;
            break;
        }
        case CfaEdge::Op::Call:
        case CfaEdge::Op::Return:
        case CfaEdge::Op::Skip: break;
    }
    return restrict_to(out, pi_target);
}

bool explicit_covered(const ExplicitState& v, const ExplicitState& by) {
    for (const auto& [name, value] : by.values) {
        auto it = v.values.find(name);
        if (it == v.values.end() || it->second != value) return false;
    }
    return true;
}

namespace {

/// Re-executes the path under a per-target precision; returns the index of
/// the first bottom state, or nullopt if the end is reached.
std::optional<size_t> runs_to_bottom(const std::vector<const CfaEdge*>& path,
                                     const std::function<const std::set<std::string>&(LocId)>& pi_at,
                                     std::vector<ExplicitState>* states_out = nullptr) {
    ExplicitState cur;
    if (states_out) states_out->push_back(cur);
    for (size_t i = 0; i < path.size(); ++i) {
        auto next = explicit_successor(cur, *path[i], pi_at(path[i]->target));
        if (!next) return i + 1;
        cur = std::move(*next);
        if (states_out) states_out->push_back(cur);
    }
    return std::nullopt;
}

}  // namespace

ExplicitRefinement refine_explicit(const std::vector<const CfaEdge*>& path,
                                   const std::vector<ExplicitState>& states, const Cfa& cfa,
                                   const ProgramPrecision& current) {
    ExplicitRefinement out;
    out.increment.domain = DomainKind::Explicit;

    {
        // Caller bug check: the current precision must not already rule the
        // path out (the engine would never have explored it).
        std::map<LocId, std::set<std::string>> memo;
        auto effective = [&](LocId l) -> const std::set<std::string>& {
            auto it = memo.find(l);
            if (it == memo.end()) it = memo.emplace(l, current.effective_at(l, cfa).vars).first;
            return it->second;
        };
        if (runs_to_bottom(path, effective))
            throw std::logic_error("refine_explicit: current precision already eliminates the path");
    }

    // Variables on the path, in first-occurrence order.
    std::vector<std::string> occurrence;
    std::set<std::string> seen;
    for (const CfaEdge* e : path) {
        for (const auto& v : e->variables())
            if (seen.insert(v).second) occurrence.push_back(v);
    }

    std::set<std::string> tracked(seen);
    auto uniform = [&tracked](LocId) -> const std::set<std::string>& { return tracked; };
    if (!runs_to_bottom(path, uniform)) {
        out.domain_incomplete = true;
        return out;
    }

    // Greedy elimination in occurrence order.
    for (const std::string& v : occurrence) {
        tracked.erase(v);
        if (!runs_to_bottom(path, uniform)) tracked.insert(v);
    }

    // Scope each kept variable to the functions in which it occurs on the
    // path; if that loses the refutation (the value must survive a function
    // the variable does not occur in), widen to every function on the path.
    auto build_increment = [&](bool widen) {
        ProgramPrecision inc;
        inc.domain = DomainKind::Explicit;
        for (const CfaEdge* e : path) {
            std::set<std::string> fns = {cfa.function_of(e->source), cfa.function_of(e->target)};
            for (const auto& fn : fns) {
                if (widen) {
                    for (const auto& v : tracked) inc.per_function[fn].vars.insert(v);
                } else {
                    for (const auto& v : e->variables())
                        if (tracked.count(v)) inc.per_function[fn].vars.insert(v);
                }
            }
        }
        return inc;
    };

    for (bool widen : {false, true}) {
        ProgramPrecision inc = build_increment(widen);
        ProgramPrecision merged = union_of(current, inc);
        std::map<LocId, std::set<std::string>> memo;
        auto effective = [&](LocId l) -> const std::set<std::string>& {
            auto it = memo.find(l);
            if (it == memo.end()) it = memo.emplace(l, merged.effective_at(l, cfa).vars).first;
            return it->second;
        };
        std::vector<ExplicitState> re;
        auto bottom = runs_to_bottom(path, effective, &re);
        if (!bottom) continue;  // scoping lost the refutation, try widening
        out.increment = std::move(inc);
        // Earliest state index that changed under the stronger precision;
        // the re-execution reaching bottom where the explored path did not
        // counts as a change at the bottom index.
        out.pivot = *bottom;
        for (size_t i = 0; i < re.size() && i < states.size(); ++i) {
            if (!(re[i] == states[i])) {
                out.pivot = i;
                break;
            }
        }
        return out;
    }
    out.domain_incomplete = true;
    return out;
}

}  // namespace miniver
