#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "miniver/formula/formula.hpp"
#include "miniver/lang/cfa.hpp"

namespace miniver {

enum class DomainKind { Explicit, Predicate };

std::string to_string(DomainKind k);

/// One scope's precision: tracked variables (explicit domain) or predicates
/// (predicate domain). Which set is meaningful follows the owning
/// ProgramPrecision's domain.
struct PrecisionSet {
    std::set<std::string> vars;
    std::set<Predicate> preds;

    bool empty() const { return vars.empty() && preds.empty(); }
    void unite(const PrecisionSet& o) {
        vars.insert(o.vars.begin(), o.vars.end());
        preds.insert(o.preds.begin(), o.preds.end());
    }
    bool contains(const PrecisionSet& o) const;
    bool operator==(const PrecisionSet& o) const = default;
};

/// Scope selectors for applying a stored precision to a new program.
enum class ReuseScope { Location, Function, Global };

std::string to_string(ReuseScope s);

/// Layered program precision: the effective precision of a location is the
/// union of the global layer, its function's layer, and its own layer.
struct ProgramPrecision {
    DomainKind domain = DomainKind::Explicit;
    PrecisionSet global;
    std::map<std::string, PrecisionSet> per_function;
    std::map<LocId, PrecisionSet> per_location;

    bool empty() const;
    bool operator==(const ProgramPrecision& o) const = default;

    PrecisionSet effective_at(LocId l, const Cfa& cfa) const;
    PrecisionSet effective_at(LocId l, const std::string& function) const;

    void unite(const ProgramPrecision& o);  // throws on domain mismatch
};

ProgramPrecision union_of(const ProgramPrecision& a, const ProgramPrecision& b);

struct RescopeResult {
    ProgramPrecision precision;
    std::vector<std::string> warnings;
};

/// Applies a stored precision to (a possibly different revision of) a
/// program under one of the three scoping strategies:
///  - Location: location numbers are applied verbatim as keys; the global
///    layer is kept; function-labeled entries do not participate.
///  - Function: location entries are folded into their function's layer
///    (looked up in the given Cfa; stale numbers are dropped with a
///    warning); function and global layers are kept.
///  - Global: the union of every entry is assigned to the global layer.
/// Function names that do not exist in the Cfa are kept with a warning
/// (they may refer to renamed or removed functions).
RescopeResult rescope(const ProgramPrecision& p, ReuseScope strategy, const Cfa& cfa);

}  // namespace miniver
