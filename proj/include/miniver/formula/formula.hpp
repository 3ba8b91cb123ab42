#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace miniver {

using Int = long long;

/// Linear integer expression: sum of coeff*var plus a constant.
/// Zero coefficients are never stored.
struct LinExpr {
    std::map<std::string, Int> coeffs;
    Int constant = 0;

    LinExpr() = default;
    explicit LinExpr(Int c) : constant(c) {}
    static LinExpr var(const std::string& name, Int coeff = 1);

    LinExpr& operator+=(const LinExpr& o);
    LinExpr& operator-=(const LinExpr& o);
    LinExpr operator+(const LinExpr& o) const;
    LinExpr operator-(const LinExpr& o) const;
    LinExpr scaled(Int k) const;

    bool is_constant() const { return coeffs.empty(); }
    bool operator==(const LinExpr& o) const = default;

    /// Substitute a variable by an expression.
    LinExpr substituted(const std::string& name, const LinExpr& repl) const;
    LinExpr renamed(const std::map<std::string, std::string>& renaming) const;
    Int eval(const std::map<std::string, Int>& env) const;
};

/// Comparison relations as they appear in source / SMT input.
enum class CmpOp { Le, Lt, Ge, Gt, Eq, Ne };

/// Canonical relations kept in atoms (Ge/Gt are flipped, Ne becomes not-Eq).
enum class Rel { Le, Lt, Eq };

/// Canonical linear constraint: sum coeffs*vars REL bound.
/// Invariants: at least one coefficient, gcd(coeffs, bound) == 1 (up to sign),
/// and for Eq the first coefficient (smallest variable name) is positive.
struct LinearAtom {
    std::map<std::string, Int> coeffs;
    Int bound = 0;
    Rel rel = Rel::Le;

    auto operator<=>(const LinearAtom& o) const = default;
    bool eval(const std::map<std::string, Int>& env) const;
};

/// Quantifier-free boolean combination of linear constraints.
class Formula {
  public:
    enum class Kind { True, False, Atom, Not, And, Or };

    Formula() : kind_(Kind::True) {}

    static Formula truth(bool b);
    static Formula atom(LinearAtom a);
    static Formula negation(Formula f);
    static Formula conjunction(std::vector<Formula> parts);
    static Formula disjunction(std::vector<Formula> parts);
    static Formula implication(Formula a, Formula b);

    /// Canonicalizing constructor for a comparison lhs OP rhs. Folds
    /// constant-only comparisons to True/False and renders Ne as not-Eq.
    static Formula compare(const LinExpr& lhs, CmpOp op, const LinExpr& rhs);

    Kind kind() const { return kind_; }
    bool is_true() const { return kind_ == Kind::True; }
    bool is_false() const { return kind_ == Kind::False; }
    const LinearAtom& atom_value() const { return atom_; }
    const std::vector<Formula>& children() const { return children_; }

    bool operator==(const Formula& o) const;

    void collect_variables(std::set<std::string>& out) const;
    std::set<std::string> variables() const;

    Formula substituted(const std::string& name, const LinExpr& repl) const;
    Formula renamed(const std::map<std::string, std::string>& renaming) const;
    bool eval(const std::map<std::string, Int>& env) const;

  private:
    Kind kind_;
    LinearAtom atom_;
    std::vector<Formula> children_;
};

/// A predicate is a canonical formula with a stable textual key; in practice
/// refinement produces single atoms, file input may produce any formula.
struct Predicate {
    Formula formula;
    std::string text;

    bool operator<(const Predicate& o) const { return text < o.text; }
    bool operator==(const Predicate& o) const { return text == o.text; }
};

Predicate make_predicate(const Formula& f);

/// The set of canonicalized atomic constraints occurring in f (negations are
/// stripped; True/False contribute nothing).
std::set<Predicate> atoms_of(const Formula& f);

/// Canonical s-expression rendering, also used as ordering key.
std::string to_sexpr(const LinExpr& e);
std::string to_sexpr(const LinearAtom& a);
std::string to_sexpr(const Formula& f);

}  // namespace miniver
