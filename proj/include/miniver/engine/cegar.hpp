#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "miniver/analysis/explicit_domain.hpp"
#include "miniver/analysis/predicate_domain.hpp"
#include "miniver/formula/solver.hpp"
#include "miniver/lang/cfa.hpp"
#include "miniver/precision/precision.hpp"

namespace miniver {

using AbstractState = std::variant<ExplicitState, PredicateState>;

struct ArgNode {
    int id = 0;
    LocId loc = 0;
    AbstractState state;
    int parent = -1;
    int in_edge = -1;  // CFA edge index taken from the parent
    int covering = -1; // node covering this one
    std::map<int, int> children;  // CFA edge index -> child node id
    bool removed = false;
    bool on_waitlist = false;
    bool expanded = false;
};

/// Abstract reachability graph with a LIFO waitlist. Pure structure; state
/// semantics (coverage, successors) live in the engine.
class Arg {
  public:
    std::vector<ArgNode> nodes;
    std::vector<int> waitlist;
    std::map<LocId, std::vector<int>> by_location;  // creation order

    int create(LocId loc, AbstractState state, int parent, int in_edge);
    void push(int id);
    std::optional<int> pop();
    bool viable(int id) const {
        const ArgNode& n = nodes[static_cast<size_t>(id)];
        return !n.removed && n.covering < 0;
    }
    /// Nodes from the root to id, following parent links.
    std::vector<int> path_to(int id) const;

    /// Lazy pruning: removes the subtree rooted at pivot, re-adds the
    /// pivot's parent to the waitlist, dissolves coverage links into the
    /// removed subtree and re-adds their sources. Pruning the root clears
    /// the whole graph (the engine re-roots).
    void prune(int pivot);

    std::vector<int> live_ids() const;
};

struct Stats {
    long long refinements = 0;
    long long abstraction_computations = 0;
    long long solver_calls = 0;
    double cpu_time_seconds = 0.0;
    long long arg_nodes = 0;
    long long precision_bytes_out = 0;
};

struct Counterexample {
    std::vector<int> edges;                // CFA edge indices, entry to error
    std::map<std::string, Int> model;      // SSA model of the path formula
    std::map<std::string, Int> inputs;     // model projected to havoc inputs
};

struct VerificationVerdict {
    enum class Kind { Safe, Unsafe, ResourceOut };
    Kind kind = Kind::ResourceOut;
    std::string reason;  // for ResourceOut
    std::optional<Counterexample> counterexample;
};

std::string to_string(VerificationVerdict::Kind k);

struct VerifyOptions {
    DomainKind domain = DomainKind::Predicate;
    AbstractionMode abstraction = AbstractionMode::Boolean;
    long long max_arg_nodes = 1000000;
    double time_limit_seconds = 60.0;
    long long solver_node_budget = 100000;
};

struct VerificationResult {
    VerificationVerdict verdict;
    ProgramPrecision final_precision;
    Stats stats;
};

struct Feasibility {
    bool feasible = false;
    std::map<std::string, Int> model;
    std::map<std::string, Int> inputs;
};

/// SSA path formula feasibility; the model is projected to the path's
/// nondeterministic inputs. Throws SolverLimitError on budget exhaustion.
Feasibility check_feasibility(const std::vector<const CfaEdge*>& path, Solver& solver);

/// The CEGAR loop with lazy abstraction. Never returns a wrong verdict;
/// budget exhaustion and refinement dead ends yield ResourceOut. When
/// arg_out is given, the final ARG is copied there (for inspection).
VerificationResult verify(const Cfa& cfa, const ProgramPrecision& initial, const VerifyOptions& opts,
                          Arg* arg_out = nullptr);

/// Serializes the run's final precision and records its size in the stats.
std::string dump_final_precision(VerificationResult& result);

}  // namespace miniver
