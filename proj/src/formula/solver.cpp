#include "miniver/formula/solver.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace miniver {

namespace {

[[noreturn]] void overflow() { throw SolverLimitError("solver: coefficient overflow"); }

Int checked(__int128 v) {
    if (v > INT64_MAX / 4 || v < INT64_MIN / 4) overflow();
    return static_cast<Int>(v);
}

/// Exact rational on 64-bit words; intermediate products use 128 bits and
/// out-of-range values abort the check as a resource limit.
struct Rat {
    Int num = 0;
    Int den = 1;

    Rat() = default;
    Rat(Int n) : num(n) {}
    Rat(Int n, Int d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) overflow();
        if (den < 0) {
            num = -num;
            den = -den;
        }
        Int g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    Rat operator+(const Rat& o) const {
        return Rat(checked(static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den),
                   checked(static_cast<__int128>(den) * o.den));
    }
    Rat operator-(const Rat& o) const { return *this + Rat(-o.num, o.den); }
    Rat operator*(const Rat& o) const {
        return Rat(checked(static_cast<__int128>(num) * o.num), checked(static_cast<__int128>(den) * o.den));
    }
    Rat operator/(const Rat& o) const {
        if (o.num == 0) overflow();
        return Rat(checked(static_cast<__int128>(num) * o.den), checked(static_cast<__int128>(den) * o.num));
    }
    Rat operator-() const { return Rat(-num, den); }

    bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rat& o) const {
        return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
    }
    bool operator<=(const Rat& o) const { return *this < o || *this == o; }

    bool is_integer() const { return den == 1; }
    Int floor() const {
        if (num >= 0) return num / den;
        return -((-num + den - 1) / den);
    }
    Int ceil() const { return -Rat(-num, den).floor(); }
};

/// sum coeffs*vars <= bound, or == bound when eq.
struct Constraint {
    std::map<std::string, Rat> coeffs;
    Rat bound;
    bool eq = false;
};

struct Budget {
    long long left;
    void spend() {
        if (--left < 0) throw SolverLimitError("solver: node budget exhausted");
    }
};

/// Integer-tight conversion of an atom literal to <=/= constraints.
/// A negative Eq literal is not representable here; the caller splits it.
Constraint to_constraint(const LinearAtom& a, bool positive) {
    Constraint c;
    if (positive) {
        for (const auto& [v, k] : a.coeffs) c.coeffs[v] = Rat(k);
        switch (a.rel) {
            case Rel::Le: c.bound = Rat(a.bound); break;
            case Rel::Lt: c.bound = Rat(a.bound - 1); break;  // integer tightening
            case Rel::Eq:
                c.bound = Rat(a.bound);
                c.eq = true;
                break;
        }
        return c;
    }
    // not (sum <= b)  ->  sum >= b+1  ->  -sum <= -b-1
    // not (sum <  b)  ->  sum >= b    ->  -sum <= -b
    for (const auto& [v, k] : a.coeffs) c.coeffs[v] = Rat(-k);
    c.bound = a.rel == Rel::Le ? Rat(-a.bound - 1) : Rat(-a.bound);
    return c;
}

/// Feasibility of a conjunction of rational constraints, by substituting
/// equalities away and then Fourier-Motzkin elimination. Returns a rational
/// witness covering every variable that occurs in the input.
std::optional<std::map<std::string, Rat>> lra_feasible(std::vector<Constraint> cs, Budget& budget) {
    std::set<std::string> vars;
    for (const auto& c : cs)
        for (const auto& [v, k] : c.coeffs)
            if (!(k == Rat(0))) vars.insert(v);

    // (var, expression) substitutions performed, applied back-to-front later.
    std::vector<std::pair<std::string, Constraint>> subs;

    // Eliminate equalities by substitution.
    for (;;) {
        budget.spend();
        auto it = std::find_if(cs.begin(), cs.end(), [](const Constraint& c) { return c.eq; });
        if (it == cs.end()) break;
        Constraint eq = *it;
        cs.erase(it);
        if (eq.coeffs.empty() || std::all_of(eq.coeffs.begin(), eq.coeffs.end(),
                                             [](const auto& p) { return p.second == Rat(0); })) {
            if (!(eq.bound == Rat(0))) return std::nullopt;
            continue;
        }
        auto pick = eq.coeffs.begin();
        while (pick->second == Rat(0)) ++pick;
        std::string var = pick->first;
        Rat coeff = pick->second;
        // var = (bound - rest) / coeff
        Constraint repl;  // stores the solved expression in coeffs/bound form
        for (const auto& [v, k] : eq.coeffs)
            if (v != var && !(k == Rat(0))) repl.coeffs[v] = -k / coeff;
        repl.bound = eq.bound / coeff;
        subs.emplace_back(var, repl);
        for (auto& c : cs) {
            auto f = c.coeffs.find(var);
            if (f == c.coeffs.end() || f->second == Rat(0)) continue;
            Rat k = f->second;
            c.coeffs.erase(f);
            for (const auto& [v, rc] : repl.coeffs) {
                Rat n = (c.coeffs.count(v) ? c.coeffs[v] : Rat(0)) + k * rc;
                c.coeffs[v] = n;
            }
            c.bound = c.bound - k * repl.bound;
        }
    }

    // Remaining variables in deterministic order for elimination.
    std::set<std::string> remaining;
    for (const auto& c : cs)
        for (const auto& [v, k] : c.coeffs)
            if (!(k == Rat(0))) remaining.insert(v);

    // (var, lower bounds as (expr<=var form), upper bounds) stack for witness
    // reconstruction: we store the constraint systems before each elimination.
    std::vector<std::pair<std::string, std::vector<Constraint>>> stages;

    for (const auto& var : std::vector<std::string>(remaining.begin(), remaining.end())) {
        budget.spend();
        stages.emplace_back(var, cs);
        std::vector<Constraint> lower, upper, rest;
        for (auto& c : cs) {
            auto f = c.coeffs.find(var);
            Rat k = f == c.coeffs.end() ? Rat(0) : f->second;
            if (k == Rat(0)) {
                rest.push_back(c);
            } else if (Rat(0) < k) {
                upper.push_back(c);
            } else {
                lower.push_back(c);
            }
        }
        for (const auto& lo : lower) {
            for (const auto& up : upper) {
                budget.spend();
                // lo: -a*var + r1 <= b1 (a>0)  =>  (r1-b1)/a <= var
                // up:  c*var + r2 <= b2 (c>0)  =>  var <= (b2-r2)/c
                Rat a = -lo.coeffs.at(var);
                Rat c = up.coeffs.at(var);
                Constraint comb;  // c*r1 + a*r2 <= c*b1 + a*b2
                for (const auto& [v, k] : lo.coeffs)
                    if (v != var) comb.coeffs[v] = k * c;
                for (const auto& [v, k] : up.coeffs) {
                    if (v == var) continue;
                    Rat n = (comb.coeffs.count(v) ? comb.coeffs[v] : Rat(0)) + k * a;
                    comb.coeffs[v] = n;
                }
                comb.bound = lo.bound * c + up.bound * a;
                rest.push_back(comb);
            }
        }
        cs = std::move(rest);
    }

    for (const auto& c : cs) {
        bool nonzero = false;
        for (const auto& [v, k] : c.coeffs)
            if (!(k == Rat(0))) nonzero = true;
        if (nonzero) continue;  // cannot happen, defensive
        if (!(Rat(0) <= c.bound)) return std::nullopt;
    }

    // Back-substitute a witness, preferring integers inside each interval.
    std::map<std::string, Rat> model;
    auto value_of = [&](const Constraint& expr) {
        Rat acc = expr.bound;
        for (const auto& [v, k] : expr.coeffs) acc = acc + k * model.at(v);
        return acc;
    };
    for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
        const auto& [var, sys] = *it;
        bool has_lo = false, has_hi = false;
        Rat lo, hi;
        for (const auto& c : sys) {
            auto f = c.coeffs.find(var);
            Rat k = f == c.coeffs.end() ? Rat(0) : f->second;
            if (k == Rat(0)) continue;
            Rat acc = c.bound;
            for (const auto& [v, kk] : c.coeffs)
                if (v != var) acc = acc - kk * model.at(v);
            Rat limit = acc / k;
            if (Rat(0) < k) {
                if (!has_hi || limit < hi) hi = limit;
                has_hi = true;
            } else {
                if (!has_lo || lo < limit) lo = limit;
                has_lo = true;
            }
        }
        Rat val;
        if (has_lo && has_hi) {
            Rat c(lo.ceil());
            if (lo <= c && c <= hi)
                val = c;
            else
                val = (lo + hi) / Rat(2);
        } else if (has_lo) {
            val = Rat(lo.ceil());
        } else if (has_hi) {
            val = Rat(std::min(hi.floor(), static_cast<Int>(0)));
            if (!(val <= hi)) val = Rat(hi.floor());
        } else {
            val = Rat(0);
        }
        model[var] = val;
    }
    // Values for substituted-out variables, in reverse substitution order.
    for (auto it = subs.rbegin(); it != subs.rend(); ++it) {
        for (const auto& [v, k] : it->second.coeffs)
            if (!model.count(v)) model[v] = Rat(0);
        model[it->first] = value_of(it->second);
    }
    for (const auto& v : vars)
        if (!model.count(v)) model[v] = Rat(0);
    return model;
}

/// Integer feasibility: gcd test on equalities, rational relaxation, then
/// branch-and-bound on a fractional witness coordinate.
std::optional<std::map<std::string, Int>> lia_feasible(const std::vector<Constraint>& cs, Budget& budget) {
    budget.spend();
    for (const auto& c : cs) {
        if (!c.eq) continue;
        // gcd test applies when every coefficient and the bound are integral
        bool integral = c.bound.is_integer();
        Int g = 0;
        for (const auto& [v, k] : c.coeffs) {
            if (!k.is_integer()) integral = false;
            if (integral) g = std::gcd(g, k.num < 0 ? -k.num : k.num);
        }
        if (integral && g != 0 && c.bound.num % g != 0) return std::nullopt;
    }
    auto relax = lra_feasible(cs, budget);
    if (!relax) return std::nullopt;
    for (const auto& [v, q] : *relax) {
        if (q.is_integer()) continue;
        Constraint below;  // v <= floor(q)
        below.coeffs[v] = Rat(1);
        below.bound = Rat(q.floor());
        Constraint above;  // -v <= -ceil(q)
        above.coeffs[v] = Rat(-1);
        above.bound = Rat(-q.ceil());
        auto branch = cs;
        branch.push_back(below);
        if (auto r = lia_feasible(branch, budget)) return r;
        branch.back() = above;
        return lia_feasible(branch, budget);
    }
    std::map<std::string, Int> model;
    for (const auto& [v, q] : *relax) model[v] = q.num;
    return model;
}

/// Literal list of a DPLL branch; Eq literals may appear negated and are
/// split integer-tight here before the theory check.
std::optional<std::map<std::string, Int>> theory_check(const std::vector<std::pair<LinearAtom, bool>>& lits,
                                                       Budget& budget) {
    std::vector<Constraint> cs;
    std::vector<const LinearAtom*> neq;  // negative equalities to split
    for (const auto& [a, positive] : lits) {
        if (!positive && a.rel == Rel::Eq)
            neq.push_back(&a);
        else
            cs.push_back(to_constraint(a, positive));
    }
    // Depth-first split of each x != k into x <= k-1 | x >= k+1.
    std::vector<std::vector<Constraint>> work{cs};
    for (const LinearAtom* a : neq) {
        std::vector<std::vector<Constraint>> next;
        for (auto& sys : work) {
            Constraint below;
            for (const auto& [v, k] : a->coeffs) below.coeffs[v] = Rat(k);
            below.bound = Rat(a->bound - 1);
            Constraint above;
            for (const auto& [v, k] : a->coeffs) above.coeffs[v] = Rat(-k);
            above.bound = Rat(-a->bound - 1);
            auto s1 = sys;
            s1.push_back(below);
            next.push_back(std::move(s1));
            sys.push_back(above);
            next.push_back(std::move(sys));
        }
        work = std::move(next);
        if (work.size() > 4096) throw SolverLimitError("solver: disequality split explosion");
    }
    for (const auto& sys : work) {
        if (auto m = lia_feasible(sys, budget)) return m;
    }
    return std::nullopt;
}

/// Formula simplification under a partial atom assignment.
Formula simplify(const Formula& f, const std::map<LinearAtom, bool>& assign) {
    switch (f.kind()) {
        case Formula::Kind::True:
        case Formula::Kind::False: return f;
        case Formula::Kind::Atom: {
            auto it = assign.find(f.atom_value());
            if (it == assign.end()) return f;
            return Formula::truth(it->second);
        }
        case Formula::Kind::Not: return Formula::negation(simplify(f.children()[0], assign));
        case Formula::Kind::And: {
            std::vector<Formula> kids;
            for (const auto& c : f.children()) kids.push_back(simplify(c, assign));
            return Formula::conjunction(std::move(kids));
        }
        case Formula::Kind::Or: {
            std::vector<Formula> kids;
            for (const auto& c : f.children()) kids.push_back(simplify(c, assign));
            return Formula::disjunction(std::move(kids));
        }
    }
    return f;
}

const LinearAtom* first_atom(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::Atom: return &f.atom_value();
        case Formula::Kind::True:
        case Formula::Kind::False: return nullptr;
        default:
            for (const auto& c : f.children())
                if (const LinearAtom* a = first_atom(c)) return a;
            return nullptr;
    }
}

std::optional<std::map<std::string, Int>> dpll(const Formula& f, std::map<LinearAtom, bool>& assign,
                                               Budget& budget) {
    budget.spend();
    Formula g = simplify(f, assign);
    if (g.is_false()) return std::nullopt;
    if (g.is_true()) {
        std::vector<std::pair<LinearAtom, bool>> lits(assign.begin(), assign.end());
        return theory_check(lits, budget);
    }
    const LinearAtom* pivot = first_atom(g);
    for (bool value : {true, false}) {
        assign[*pivot] = value;
        if (auto m = dpll(g, assign, budget)) return m;
        assign.erase(*pivot);
    }
    return std::nullopt;
}

}  // namespace

SatResult Solver::check(const Formula& f) {
    ++sat_calls_;
    Budget budget{opts_.node_budget};
    std::map<LinearAtom, bool> assign;
    auto model = dpll(f, assign, budget);
    SatResult r;
    if (!model) {
        r.kind = SatResult::Kind::Unsat;
        return r;
    }
    r.kind = SatResult::Kind::Sat;
    r.model = std::move(*model);
    // Complete the model over all variables of f.
    for (const auto& v : f.variables())
        if (!r.model.count(v)) r.model[v] = 0;
    return r;
}

bool Solver::entails(const Formula& a, const Formula& b) {
    Formula query = Formula::conjunction({a, Formula::negation(b)});
    return !check(query).is_sat();
}

}  // namespace miniver
