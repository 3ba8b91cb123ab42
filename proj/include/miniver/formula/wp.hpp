#pragma once

#include "miniver/formula/formula.hpp"
#include "miniver/lang/cfa.hpp"

namespace miniver {

/// How an assume edge combines with the postcondition: as c -> f (entailment
/// reasoning) or as c /\ f (path feasibility).
enum class AssumeCombinator { Implication, Conjunction };

/// Weakest precondition of f across one edge. Havoc renames the variable to
/// a fresh free name ("x!wN"), a sound over-approximation along a fixed path
/// when every step uses a fresh name; fresh_counter supplies N.
Formula weakest_precondition(const Formula& f, const CfaEdge& e, AssumeCombinator combine,
                             int& fresh_counter);

}  // namespace miniver
