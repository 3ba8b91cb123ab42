#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "miniver/formula/formula.hpp"
#include "miniver/lang/ast.hpp"

namespace miniver {

/// Location numbers are 1-based and contiguous; numbering is deterministic
/// for identical source text (depth-first over the program, main first,
/// calls inlined at their call sites, never-called functions appended in
/// declaration order).
using LocId = int;

struct CfaEdge {
    enum class Op { Assign, Havoc, Assume, Call, Return, Skip };

    LocId source = 0;
    LocId target = 0;
    Op op = Op::Skip;
    std::string var;     // Assign/Havoc target
    LinExpr expr;        // Assign right-hand side
    Formula cond;        // Assume condition (atom, negated atom, or constant)
    std::string callee;  // Call

    bool operator==(const CfaEdge& o) const = default;

    /// Variables read or written by this edge.
    std::set<std::string> variables() const;
    std::string describe() const;
};

struct Cfa {
    std::string program_name;
    std::vector<std::string> location_function;        // function of location i+1
    std::vector<CfaEdge> edges;                        // creation order
    std::vector<std::vector<int>> outgoing;            // edge indices per location i+1
    std::map<std::string, std::pair<LocId, LocId>> functions;  // name -> entry/exit
    std::set<std::string> variables;
    std::set<LocId> error_locations;
    std::set<LocId> loop_heads;
    LocId entry = 0;  // main entry
    LocId exit = 0;   // main exit

    int location_count() const { return static_cast<int>(location_function.size()); }
    bool has_location(LocId l) const { return l >= 1 && l <= location_count(); }
    const std::string& function_of(LocId l) const { return location_function.at(static_cast<size_t>(l - 1)); }
    const std::vector<int>& outgoing_of(LocId l) const { return outgoing.at(static_cast<size_t>(l - 1)); }

    bool operator==(const Cfa& o) const = default;
};

class CfaError : public std::runtime_error {
  public:
    explicit CfaError(const std::string& what) : std::runtime_error(what) {}
};

/// Build the control-flow automaton; calls are inlined (the call graph is
/// acyclic after parsing). Throws CfaError if main is missing.
Cfa build_cfa(const Ast& ast);

}  // namespace miniver
