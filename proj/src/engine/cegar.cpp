#include "miniver/engine/cegar.hpp"

#include <algorithm>
#include <ctime>
#include <set>

#include "miniver/precision/precision_io.hpp"

namespace miniver {

std::string to_string(VerificationVerdict::Kind k) {
    switch (k) {
        case VerificationVerdict::Kind::Safe: return "safe";
        case VerificationVerdict::Kind::Unsafe: return "unsafe";
        case VerificationVerdict::Kind::ResourceOut: return "resource-out";
    }
    return "";
}

int Arg::create(LocId loc, AbstractState state, int parent, int in_edge) {
    int id = static_cast<int>(nodes.size());
    ArgNode n;
    n.id = id;
    n.loc = loc;
    n.state = std::move(state);
    n.parent = parent;
    n.in_edge = in_edge;
    nodes.push_back(std::move(n));
    by_location[loc].push_back(id);
    if (parent >= 0) nodes[static_cast<size_t>(parent)].children[in_edge] = id;
    return id;
}

void Arg::push(int id) {
    ArgNode& n = nodes[static_cast<size_t>(id)];
    if (n.on_waitlist || n.removed) return;
    n.on_waitlist = true;
    waitlist.push_back(id);
}

std::optional<int> Arg::pop() {
    while (!waitlist.empty()) {
        int id = waitlist.back();
        waitlist.pop_back();
        ArgNode& n = nodes[static_cast<size_t>(id)];
        if (!n.on_waitlist) continue;  // stale entry
        n.on_waitlist = false;
        if (n.removed) continue;
        return id;
    }
    return std::nullopt;
}

std::vector<int> Arg::path_to(int id) const {
    std::vector<int> out;
    for (int cur = id; cur >= 0; cur = nodes[static_cast<size_t>(cur)].parent) out.push_back(cur);
    std::reverse(out.begin(), out.end());
    return out;
}

void Arg::prune(int pivot) {
    ArgNode& p = nodes[static_cast<size_t>(pivot)];
    if (p.parent < 0) {
        // restart: everything goes, the engine re-roots
        nodes.clear();
        waitlist.clear();
        by_location.clear();
        return;
    }
    std::set<int> removed;
    std::vector<int> stack{pivot};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        ArgNode& n = nodes[static_cast<size_t>(id)];
        if (n.removed || removed.count(id)) continue;
        removed.insert(id);
        n.removed = true;
        n.on_waitlist = false;
        for (const auto& [edge, child] : n.children) stack.push_back(child);
        n.children.clear();
    }
    ArgNode& parent = nodes[static_cast<size_t>(p.parent)];
    std::erase_if(parent.children, [&](const auto& kv) { return removed.count(kv.second) > 0; });
    // coverage links into the removed subtree dissolve; sources re-explore
    for (ArgNode& n : nodes) {
        if (n.removed) continue;
        if (n.covering >= 0 && removed.count(n.covering)) {
            n.covering = -1;
            push(n.id);
        }
    }
    parent.expanded = false;
    push(parent.id);
}

std::vector<int> Arg::live_ids() const {
    std::vector<int> out;
    for (const ArgNode& n : nodes)
        if (!n.removed) out.push_back(n.id);
    return out;
}

Feasibility check_feasibility(const std::vector<const CfaEdge*>& path, Solver& solver) {
    PathFormula pf = path_formula(path);
    SatResult r = solver.check(pf.formula);
    Feasibility out;
    out.feasible = r.is_sat();
    if (out.feasible) {
        out.model = r.model;
        for (const auto& in : pf.inputs) out.inputs[in] = out.model.count(in) ? out.model[in] : 0;
    }
    return out;
}

namespace {

class Engine {
  public:
    Engine(const Cfa& cfa, const ProgramPrecision& initial, const VerifyOptions& opts)
        : cfa_(cfa), opts_(opts), solver_(SolverOptions{opts.solver_node_budget}), precision_(initial) {
        if (precision_.empty()) precision_.domain = opts.domain;
        if (precision_.domain != opts.domain)
            throw std::invalid_argument("initial precision domain does not match the analysis domain");
    }

    VerificationResult run(Arg* arg_out) {
        start_ = std::clock();
        VerificationResult result;
        try {
            result.verdict = explore();
        } catch (const SolverLimitError& e) {
            result.verdict.kind = VerificationVerdict::Kind::ResourceOut;
            result.verdict.reason = e.what();
        } catch (const std::logic_error& e) {
            // refinement contract violations abort the run, never a verdict
            result.verdict.kind = VerificationVerdict::Kind::ResourceOut;
            result.verdict.reason = std::string("internal: ") + e.what();
        }
        result.final_precision = precision_;
        stats_.solver_calls = solver_.sat_calls();
        stats_.cpu_time_seconds = elapsed();
        result.stats = stats_;
        if (arg_out) *arg_out = arg_;
        return result;
    }

  private:
    const Cfa& cfa_;
    VerifyOptions opts_;
    Solver solver_;
    ProgramPrecision precision_;
    Stats stats_;
    Arg arg_;
    std::map<LocId, PrecisionSet> effective_memo_;
    std::clock_t start_ = 0;

    double elapsed() const { return static_cast<double>(std::clock() - start_) / CLOCKS_PER_SEC; }

    bool explicit_domain() const { return opts_.domain == DomainKind::Explicit; }

    const PrecisionSet& effective(LocId l) {
        auto it = effective_memo_.find(l);
        if (it == effective_memo_.end()) it = effective_memo_.emplace(l, precision_.effective_at(l, cfa_)).first;
        return it->second;
    }

    AbstractState initial_state() const {
        if (explicit_domain()) return ExplicitState{};
        return PredicateState{};
    }

    void make_root() {
        int root = arg_.create(cfa_.entry, initial_state(), -1, -1);
        ++stats_.arg_nodes;
        arg_.push(root);
    }

    /// Coverage is only checked against earlier-created nodes, which keeps
    /// the relation acyclic (no covering by descendants).
    bool try_cover(int id) {
        ArgNode& n = arg_.nodes[static_cast<size_t>(id)];
        if (!explicit_domain() && !is_block_end(n.loc, cfa_)) return false;
        auto it = arg_.by_location.find(n.loc);
        if (it == arg_.by_location.end()) return false;
        for (int other : it->second) {
            if (other >= id || !arg_.viable(other)) continue;
            const ArgNode& o = arg_.nodes[static_cast<size_t>(other)];
            bool covers = false;
            if (explicit_domain()) {
                covers = explicit_covered(std::get<ExplicitState>(n.state), std::get<ExplicitState>(o.state));
            } else {
                covers = solver_.entails(std::get<PredicateState>(n.state).abstraction,
                                         std::get<PredicateState>(o.state).abstraction);
            }
            if (covers) {
                n.covering = other;
                return true;
            }
        }
        return false;
    }

    /// Within-block merge into a waitlist-resident node at the same location
    /// with an equal abstraction. Returns the merged-into node id.
    std::optional<int> try_merge(LocId loc, const PredicateState& state) {
        if (is_block_end(loc, cfa_)) return std::nullopt;
        auto it = arg_.by_location.find(loc);
        if (it == arg_.by_location.end()) return std::nullopt;
        for (int other : it->second) {
            ArgNode& o = arg_.nodes[static_cast<size_t>(other)];
            if (o.removed || o.covering >= 0 || o.expanded || !o.on_waitlist) continue;
            PredicateState& os = std::get<PredicateState>(o.state);
            if (os == state) return other;  // already represented
            if (auto merged = merge_predicate(os, state)) {
                o.state = std::move(*merged);
                return other;
            }
        }
        return std::nullopt;
    }

    struct CexOutcome {
        bool unsafe = false;
        Counterexample cex;
    };

    /// Feasibility check plus (for spurious paths) refinement and pruning.
    CexOutcome analyze_counterexample(int error_node) {
        std::vector<int> node_path = arg_.path_to(error_node);
        std::vector<const CfaEdge*> edges;
        for (size_t i = 1; i < node_path.size(); ++i)
            edges.push_back(&cfa_.edges[static_cast<size_t>(arg_.nodes[static_cast<size_t>(node_path[i])].in_edge)]);

        Feasibility feas = check_feasibility(edges, solver_);
        if (feas.feasible) {
            CexOutcome out;
            out.unsafe = true;
            for (size_t i = 1; i < node_path.size(); ++i)
                out.cex.edges.push_back(arg_.nodes[static_cast<size_t>(node_path[i])].in_edge);
            out.cex.model = feas.model;
            out.cex.inputs = feas.inputs;
            return out;
        }

        size_t pivot_index = 0;
        if (explicit_domain()) {
            std::vector<ExplicitState> states;
            for (int id : node_path) states.push_back(std::get<ExplicitState>(arg_.nodes[static_cast<size_t>(id)].state));
            ExplicitRefinement ref = refine_explicit(edges, states, cfa_, precision_);
            if (ref.domain_incomplete)
                throw SolverLimitError("explicit refinement cannot eliminate an infeasible path");
            precision_.unite(ref.increment);
            pivot_index = ref.pivot;
        } else {
            std::vector<PredicateState> states;
            for (int id : node_path) states.push_back(std::get<PredicateState>(arg_.nodes[static_cast<size_t>(id)].state));
            PredicateRefinement ref =
                refine_predicate(edges, states, cfa_, precision_, opts_.abstraction, solver_);
            if (!ref.progress) throw SolverLimitError("predicate refinement made no progress");
            precision_.unite(ref.increment);
            pivot_index = ref.pivot;
        }
        ++stats_.refinements;
        effective_memo_.clear();
        int pivot_node = node_path[pivot_index];
        arg_.prune(pivot_node);
        if (arg_.nodes.empty()) make_root();  // pruned at the root: restart
        return {};
    }

    /// Expands one node; returns an Unsafe outcome when a feasible
    /// counterexample is found, nullopt otherwise.
    std::optional<Counterexample> expand(int id) {
        for (int edge_index : cfa_.outgoing_of(arg_.nodes[static_cast<size_t>(id)].loc)) {
            {
                ArgNode& n = arg_.nodes[static_cast<size_t>(id)];
                auto child = n.children.find(edge_index);
                if (child != n.children.end() && !arg_.nodes[static_cast<size_t>(child->second)].removed)
                    continue;  // still live from before a prune
            }
            const CfaEdge& e = cfa_.edges[static_cast<size_t>(edge_index)];
            std::optional<AbstractState> succ;
            if (explicit_domain()) {
                auto s = explicit_successor(std::get<ExplicitState>(arg_.nodes[static_cast<size_t>(id)].state), e,
                                            effective(e.target).vars);
                if (s) succ = AbstractState(std::move(*s));
            } else {
                PredicateContext ctx{solver_, &stats_.abstraction_computations};
                auto s = predicate_successor(std::get<PredicateState>(arg_.nodes[static_cast<size_t>(id)].state), e,
                                             effective(e.target).preds, opts_.abstraction,
                                             is_block_end(e.target, cfa_), ctx);
                if (s) succ = AbstractState(std::move(*s));
            }
            if (!succ) continue;  // bottom

            if (!explicit_domain()) {
                if (auto merged = try_merge(e.target, std::get<PredicateState>(*succ))) {
                    ArgNode& n = arg_.nodes[static_cast<size_t>(id)];
                    n.children[edge_index] = *merged;
                    continue;
                }
            }

            if (stats_.arg_nodes >= opts_.max_arg_nodes)
                throw SolverLimitError("ARG node budget exhausted");
            int nid = arg_.create(e.target, std::move(*succ), id, edge_index);
            ++stats_.arg_nodes;

            if (try_cover(nid)) continue;

            if (cfa_.error_locations.count(e.target)) {
                CexOutcome out = analyze_counterexample(nid);
                if (out.unsafe) return out.cex;
                // refined and pruned: stop expanding, the waitlist resumes
                // (a root pivot rebuilt the graph, invalidating this id)
                if (static_cast<size_t>(id) < arg_.nodes.size()) {
                    ArgNode& n = arg_.nodes[static_cast<size_t>(id)];
                    if (!n.removed && n.covering < 0) arg_.push(id);
                }
                return std::nullopt;
            }
            arg_.push(nid);
        }
        arg_.nodes[static_cast<size_t>(id)].expanded = true;
        return std::nullopt;
    }

    VerificationVerdict explore() {
        make_root();
        for (;;) {
            if (elapsed() > opts_.time_limit_seconds) {
                VerificationVerdict v;
                v.kind = VerificationVerdict::Kind::ResourceOut;
                v.reason = "time budget exhausted";
                return v;
            }
            auto id = arg_.pop();
            if (!id) break;
            if (!arg_.viable(*id)) continue;
            if (try_cover(*id)) continue;
            if (auto cex = expand(*id)) {
                VerificationVerdict v;
                v.kind = VerificationVerdict::Kind::Unsafe;
                v.counterexample = std::move(*cex);
                return v;
            }
        }
        VerificationVerdict v;
        v.kind = VerificationVerdict::Kind::Safe;
        return v;
    }
};

}  // namespace

VerificationResult verify(const Cfa& cfa, const ProgramPrecision& initial, const VerifyOptions& opts,
                          Arg* arg_out) {
    Engine engine(cfa, initial, opts);
    return engine.run(arg_out);
}

std::string dump_final_precision(VerificationResult& result) {
    std::string text = write_precision_file(result.final_precision);
    result.stats.precision_bytes_out = static_cast<long long>(text.size());
    return text;
}

}  // namespace miniver
