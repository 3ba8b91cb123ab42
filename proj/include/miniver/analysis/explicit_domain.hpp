#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "miniver/lang/cfa.hpp"
#include "miniver/precision/precision.hpp"

namespace miniver {

/// Abstract variable assignment: variables absent from the map are unknown
/// (top). The infeasible state (bottom) is represented by absence, i.e.
/// std::nullopt in successor results.
struct ExplicitState {
    std::map<std::string, Int> values;

    bool operator==(const ExplicitState& o) const = default;
    std::string describe() const;
};

/// Keeps exactly the entries whose variable is in pi.
ExplicitState restrict_to(const ExplicitState& v, const std::set<std::string>& pi);

/// Abstract post along one edge, restricted to pi at the target. Unknown
/// operands make the result unknown; assume edges detect definite falsehood
/// and propagate constants through single-unknown equalities, nothing more.
std::optional<ExplicitState> explicit_successor(const ExplicitState& v, const CfaEdge& e,
                                                const std::set<std::string>& pi_target);

/// True iff `by` agrees with or generalizes every tracked value of `by`,
/// i.e. every concretization of v is one of `by`.
bool explicit_covered(const ExplicitState& v, const ExplicitState& by);

struct ExplicitRefinement {
    /// Set when the path cannot be eliminated even when tracking every
    /// variable; the caller must give up instead of looping.
    bool domain_incomplete = false;
    ProgramPrecision increment;  // per-function variable sets
    size_t pivot = 0;            // earliest path state index that changes
};

/// Path-based refinement. `path` are CFA edges from the program entry to an
/// error location; `states` are the explored abstract states along it
/// (states[i] before edge i, plus one final state). The path must be
/// infeasible under full tracking; returns the greedily minimized variable
/// set scoped to the functions where each variable occurs, or
/// domain_incomplete. Throws std::logic_error if the current precision
/// already eliminates the path.
ExplicitRefinement refine_explicit(const std::vector<const CfaEdge*>& path,
                                   const std::vector<ExplicitState>& states, const Cfa& cfa,
                                   const ProgramPrecision& current);

}  // namespace miniver
