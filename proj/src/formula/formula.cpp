#include "miniver/formula/formula.hpp"

#include <numeric>
#include <stdexcept>

namespace miniver {

LinExpr LinExpr::var(const std::string& name, Int coeff) {
    LinExpr e;
    if (coeff != 0) e.coeffs[name] = coeff;
    return e;
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
    for (const auto& [v, c] : o.coeffs) {
        Int n = (coeffs.count(v) ? coeffs[v] : 0) + c;
        if (n == 0)
            coeffs.erase(v);
        else
            coeffs[v] = n;
    }
    constant += o.constant;
    return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) { return *this += o.scaled(-1); }

LinExpr LinExpr::operator+(const LinExpr& o) const {
    LinExpr r = *this;
    r += o;
    return r;
}

LinExpr LinExpr::operator-(const LinExpr& o) const {
    LinExpr r = *this;
    r -= o;
    return r;
}

LinExpr LinExpr::scaled(Int k) const {
    LinExpr r;
    if (k == 0) return r;
    for (const auto& [v, c] : coeffs) r.coeffs[v] = c * k;
    r.constant = constant * k;
    return r;
}

LinExpr LinExpr::substituted(const std::string& name, const LinExpr& repl) const {
    auto it = coeffs.find(name);
    if (it == coeffs.end()) return *this;
    LinExpr r = *this;
    Int c = it->second;
    r.coeffs.erase(name);
    r += repl.scaled(c);
    return r;
}

LinExpr LinExpr::renamed(const std::map<std::string, std::string>& renaming) const {
    LinExpr r;
    r.constant = constant;
    for (const auto& [v, c] : coeffs) {
        auto it = renaming.find(v);
        const std::string& n = it == renaming.end() ? v : it->second;
        r.coeffs[n] += c;
        if (r.coeffs[n] == 0) r.coeffs.erase(n);
    }
    return r;
}

Int LinExpr::eval(const std::map<std::string, Int>& env) const {
    Int acc = constant;
    for (const auto& [v, c] : coeffs) {
        auto it = env.find(v);
        if (it == env.end()) throw std::invalid_argument("eval: unbound variable " + v);
        acc += c * it->second;
    }
    return acc;
}

bool LinearAtom::eval(const std::map<std::string, Int>& env) const {
    Int lhs = 0;
    for (const auto& [v, c] : coeffs) {
        auto it = env.find(v);
        if (it == env.end()) throw std::invalid_argument("eval: unbound variable " + v);
        lhs += c * it->second;
    }
    switch (rel) {
        case Rel::Le: return lhs <= bound;
        case Rel::Lt: return lhs < bound;
        case Rel::Eq: return lhs == bound;
    }
    return false;
}

Formula Formula::truth(bool b) {
    Formula f;
    f.kind_ = b ? Kind::True : Kind::False;
    return f;
}

Formula Formula::atom(LinearAtom a) {
    Formula f;
    f.kind_ = Kind::Atom;
    f.atom_ = std::move(a);
    return f;
}

Formula Formula::negation(Formula f) {
    switch (f.kind_) {
        case Kind::True: return truth(false);
        case Kind::False: return truth(true);
        case Kind::Not: return f.children_[0];
        default: break;
    }
    Formula r;
    r.kind_ = Kind::Not;
    r.children_.push_back(std::move(f));
    return r;
}

Formula Formula::conjunction(std::vector<Formula> parts) {
    std::vector<Formula> kept;
    for (auto& p : parts) {
        if (p.is_false()) return truth(false);
        if (p.is_true()) continue;
        if (p.kind_ == Kind::And) {
            for (auto& c : p.children_) kept.push_back(std::move(c));
        } else {
            kept.push_back(std::move(p));
        }
    }
    if (kept.empty()) return truth(true);
    if (kept.size() == 1) return kept[0];
    Formula r;
    r.kind_ = Kind::And;
    r.children_ = std::move(kept);
    return r;
}

Formula Formula::disjunction(std::vector<Formula> parts) {
    std::vector<Formula> kept;
    for (auto& p : parts) {
        if (p.is_true()) return truth(true);
        if (p.is_false()) continue;
        if (p.kind_ == Kind::Or) {
            for (auto& c : p.children_) kept.push_back(std::move(c));
        } else {
            kept.push_back(std::move(p));
        }
    }
    if (kept.empty()) return truth(false);
    if (kept.size() == 1) return kept[0];
    Formula r;
    r.kind_ = Kind::Or;
    r.children_ = std::move(kept);
    return r;
}

Formula Formula::implication(Formula a, Formula b) {
    return disjunction({negation(std::move(a)), std::move(b)});
}

namespace {

Int gcd_of(Int a, Int b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

/// Canonicalize coeffs REL bound in place; returns folded constant truth if
/// the atom has no variables.
Formula finish_atom(std::map<std::string, Int> coeffs, Int bound, Rel rel, bool negate) {
    if (coeffs.empty()) {
        bool v = false;
        switch (rel) {
            case Rel::Le: v = 0 <= bound; break;
            case Rel::Lt: v = 0 < bound; break;
            case Rel::Eq: v = 0 == bound; break;
        }
        return Formula::truth(negate ? !v : v);
    }
    Int g = 0;
    for (const auto& [v, c] : coeffs) g = gcd_of(g, c);
    g = gcd_of(g, bound);
    if (g > 1) {
        for (auto& [v, c] : coeffs) c /= g;
        bound /= g;
    }
    if (rel == Rel::Eq && coeffs.begin()->second < 0) {
        for (auto& [v, c] : coeffs) c = -c;
        bound = -bound;
    }
    LinearAtom a;
    a.coeffs = std::move(coeffs);
    a.bound = bound;
    a.rel = rel;
    Formula f = Formula::atom(std::move(a));
    return negate ? Formula::negation(std::move(f)) : f;
}

}  // namespace

Formula Formula::compare(const LinExpr& lhs, CmpOp op, const LinExpr& rhs) {
    LinExpr d = lhs - rhs;  // d.coeffs + d.constant OP 0
    Int bound = -d.constant;
    switch (op) {
        case CmpOp::Le: return finish_atom(d.coeffs, bound, Rel::Le, false);
        case CmpOp::Lt: return finish_atom(d.coeffs, bound, Rel::Lt, false);
        case CmpOp::Ge: return finish_atom(d.scaled(-1).coeffs, -bound, Rel::Le, false);
        case CmpOp::Gt: return finish_atom(d.scaled(-1).coeffs, -bound, Rel::Lt, false);
        case CmpOp::Eq: return finish_atom(d.coeffs, bound, Rel::Eq, false);
        case CmpOp::Ne: return finish_atom(d.coeffs, bound, Rel::Eq, true);
    }
    throw std::logic_error("unknown comparison");
}

bool Formula::operator==(const Formula& o) const {
    if (kind_ != o.kind_) return false;
    if (kind_ == Kind::Atom) return atom_ == o.atom_;
    return children_ == o.children_;
}

void Formula::collect_variables(std::set<std::string>& out) const {
    if (kind_ == Kind::Atom) {
        for (const auto& [v, c] : atom_.coeffs) out.insert(v);
        return;
    }
    for (const auto& c : children_) c.collect_variables(out);
}

std::set<std::string> Formula::variables() const {
    std::set<std::string> out;
    collect_variables(out);
    return out;
}

Formula Formula::substituted(const std::string& name, const LinExpr& repl) const {
    switch (kind_) {
        case Kind::True:
        case Kind::False: return *this;
        case Kind::Atom: {
            if (!atom_.coeffs.count(name)) return *this;
            LinExpr lhs;
            lhs.coeffs = atom_.coeffs;
            lhs = lhs.substituted(name, repl);
            LinExpr rhs(atom_.bound);
            CmpOp op = atom_.rel == Rel::Le ? CmpOp::Le : atom_.rel == Rel::Lt ? CmpOp::Lt : CmpOp::Eq;
            return compare(lhs, op, rhs);
        }
        default: {
            std::vector<Formula> kids;
            kids.reserve(children_.size());
            for (const auto& c : children_) kids.push_back(c.substituted(name, repl));
            if (kind_ == Kind::Not) return negation(std::move(kids[0]));
            return kind_ == Kind::And ? conjunction(std::move(kids)) : disjunction(std::move(kids));
        }
    }
}

Formula Formula::renamed(const std::map<std::string, std::string>& renaming) const {
    switch (kind_) {
        case Kind::True:
        case Kind::False: return *this;
        case Kind::Atom: {
            LinExpr lhs;
            lhs.coeffs = atom_.coeffs;
            lhs = lhs.renamed(renaming);
            CmpOp op = atom_.rel == Rel::Le ? CmpOp::Le : atom_.rel == Rel::Lt ? CmpOp::Lt : CmpOp::Eq;
            return compare(lhs, op, LinExpr(atom_.bound));
        }
        default: {
            std::vector<Formula> kids;
            kids.reserve(children_.size());
            for (const auto& c : children_) kids.push_back(c.renamed(renaming));
            if (kind_ == Kind::Not) return negation(std::move(kids[0]));
            return kind_ == Kind::And ? conjunction(std::move(kids)) : disjunction(std::move(kids));
        }
    }
}

bool Formula::eval(const std::map<std::string, Int>& env) const {
    switch (kind_) {
        case Kind::True: return true;
        case Kind::False: return false;
        case Kind::Atom: return atom_.eval(env);
        case Kind::Not: return !children_[0].eval(env);
        case Kind::And:
            for (const auto& c : children_)
                if (!c.eval(env)) return false;
            return true;
        case Kind::Or:
            for (const auto& c : children_)
                if (c.eval(env)) return true;
            return false;
    }
    return false;
}

Predicate make_predicate(const Formula& f) { return Predicate{f, to_sexpr(f)}; }

namespace {
void collect_atoms(const Formula& f, std::set<Predicate>& out) {
    switch (f.kind()) {
        case Formula::Kind::Atom: out.insert(make_predicate(f)); break;
        case Formula::Kind::True:
        case Formula::Kind::False: break;
        default:
            for (const auto& c : f.children()) collect_atoms(c, out);
    }
}
}  // namespace

std::set<Predicate> atoms_of(const Formula& f) {
    std::set<Predicate> out;
    collect_atoms(f, out);
    return out;
}

std::string to_sexpr(const LinExpr& e) {
    std::vector<std::string> terms;
    for (const auto& [v, c] : e.coeffs) {
        if (c == 1)
            terms.push_back("|" + v + "|");
        else
            terms.push_back("(* " + std::to_string(c) + " |" + v + "|)");
    }
    if (e.constant != 0 || terms.empty()) terms.push_back(std::to_string(e.constant));
    if (terms.size() == 1) return terms[0];
    std::string s = "(+";
    for (const auto& t : terms) s += " " + t;
    return s + ")";
}

std::string to_sexpr(const LinearAtom& a) {
    LinExpr lhs;
    lhs.coeffs = a.coeffs;
    const char* op = a.rel == Rel::Le ? "<=" : a.rel == Rel::Lt ? "<" : "=";
    return std::string("(") + op + " " + to_sexpr(lhs) + " " + std::to_string(a.bound) + ")";
}

std::string to_sexpr(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::True: return "true";
        case Formula::Kind::False: return "false";
        case Formula::Kind::Atom: return to_sexpr(f.atom_value());
        case Formula::Kind::Not: return "(not " + to_sexpr(f.children()[0]) + ")";
        case Formula::Kind::And:
        case Formula::Kind::Or: {
            std::string s = f.kind() == Formula::Kind::And ? "(and" : "(or";
            for (const auto& c : f.children()) s += " " + to_sexpr(c);
            return s + ")";
        }
    }
    return "";
}

}  // namespace miniver
