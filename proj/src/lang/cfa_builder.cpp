#include "miniver/lang/cfa.hpp"

namespace miniver {

std::set<std::string> CfaEdge::variables() const {
    std::set<std::string> out;
    switch (op) {
        case Op::Assign:
            out.insert(var);
            for (const auto& [v, c] : expr.coeffs) out.insert(v);
            break;
        case Op::Havoc: out.insert(var); break;
        case Op::Assume: cond.collect_variables(out); break;
        default: break;
    }
    return out;
}

std::string CfaEdge::describe() const {
    switch (op) {
        case Op::Assign: return var + " := " + to_sexpr(expr);
        case Op::Havoc: return var + " := input()";
        case Op::Assume: return "assume " + to_sexpr(cond);
        case Op::Call: return "call " + callee;
        case Op::Return: return "return";
        case Op::Skip: return "skip";
    }
    return "";
}

namespace {

class Builder {
  public:
    explicit Builder(const Ast& ast) : ast_(ast) {}

    Cfa build() {
        cfa_.program_name = ast_.program_name;
        for (const auto& g : ast_.globals) cfa_.variables.insert(g);
        const Function* main = ast_.find_function("main");
        if (!main) throw CfaError("program has no 'main' function");
        auto [entry, exit] = instantiate(*main);
        cfa_.entry = entry;
        cfa_.exit = exit;
        // never-inlined functions become disconnected sub-graphs (dead code)
        for (const Function& f : ast_.functions)
            if (!cfa_.functions.count(f.name)) instantiate(f);
        return std::move(cfa_);
    }

  private:
    const Ast& ast_;
    Cfa cfa_;

    LocId alloc(const std::string& function) {
        cfa_.location_function.push_back(function);
        cfa_.outgoing.emplace_back();
        return static_cast<LocId>(cfa_.location_function.size());
    }

    void add_edge(CfaEdge e) {
        cfa_.outgoing[static_cast<size_t>(e.source - 1)].push_back(static_cast<int>(cfa_.edges.size()));
        cfa_.edges.push_back(std::move(e));
    }

    std::pair<LocId, LocId> instantiate(const Function& fn) {
        LocId entry = alloc(fn.name);
        std::vector<int> pending_returns;  // edge indices to patch to the exit
        LocId exit = build_stmts(fn.body, entry, fn.name, pending_returns);
        for (int idx : pending_returns) cfa_.edges[static_cast<size_t>(idx)].target = exit;
        if (!cfa_.functions.count(fn.name)) cfa_.functions[fn.name] = {entry, exit};
        return {entry, exit};
    }

    LocId build_stmts(const std::vector<Stmt>& stmts, LocId at, const std::string& fname,
                      std::vector<int>& pending_returns) {
        for (const Stmt& s : stmts) at = build_stmt(s, at, fname, pending_returns);
        return at;
    }

    LocId build_stmt(const Stmt& s, LocId at, const std::string& fname, std::vector<int>& pending_returns) {
        switch (s.kind) {
            case Stmt::Kind::Decl: {
                cfa_.variables.insert(s.var);
                LocId next = alloc(fname);
                CfaEdge e;
                e.source = at;
                e.target = next;
                if (s.has_init && !s.expr.input) {
                    e.op = CfaEdge::Op::Assign;
                    e.var = s.var;
                    e.expr = s.expr.value;
                } else {
                    e.op = CfaEdge::Op::Havoc;  // uninitialized or input()
                    e.var = s.var;
                }
                add_edge(std::move(e));
                return next;
            }
            case Stmt::Kind::Assign: {
                cfa_.variables.insert(s.var);
                LocId next = alloc(fname);
                CfaEdge e;
                e.source = at;
                e.target = next;
                if (s.expr.input) {
                    e.op = CfaEdge::Op::Havoc;
                    e.var = s.var;
                } else {
                    e.op = CfaEdge::Op::Assign;
                    e.var = s.var;
                    e.expr = s.expr.value;
                }
                add_edge(std::move(e));
                return next;
            }
            case Stmt::Kind::Assume: {
                LocId next = alloc(fname);
                CfaEdge e;
                e.source = at;
                e.target = next;
                e.op = CfaEdge::Op::Assume;
                e.cond = s.cond.formula();
                add_edge(std::move(e));
                return next;
            }
            case Stmt::Kind::Error: {
                LocId err = alloc(fname);
                cfa_.error_locations.insert(err);
                CfaEdge e;
                e.source = at;
                e.target = err;
                e.op = CfaEdge::Op::Skip;
                add_edge(std::move(e));
                // code after error() is dead; it hangs off a fresh location
                return alloc(fname);
            }
            case Stmt::Kind::Return: {
                CfaEdge e;
                e.source = at;
                e.target = 0;  // patched to the function exit
                e.op = CfaEdge::Op::Return;
                add_edge(std::move(e));
                pending_returns.push_back(static_cast<int>(cfa_.edges.size()) - 1);
                return alloc(fname);  // dead continuation
            }
            case Stmt::Kind::Call: {
                const Function* callee = ast_.find_function(s.var);
                if (!callee) throw CfaError("call to undefined function '" + s.var + "'");
                LocId callee_entry = alloc(callee->name);
                CfaEdge call;
                call.source = at;
                call.target = callee_entry;
                call.op = CfaEdge::Op::Call;
                call.callee = callee->name;
                add_edge(std::move(call));
                std::vector<int> callee_returns;
                LocId callee_exit = build_stmts(callee->body, callee_entry, callee->name, callee_returns);
                for (int idx : callee_returns) cfa_.edges[static_cast<size_t>(idx)].target = callee_exit;
                if (!cfa_.functions.count(callee->name)) cfa_.functions[callee->name] = {callee_entry, callee_exit};
                LocId next = alloc(fname);
                CfaEdge ret;
                ret.source = callee_exit;
                ret.target = next;
                ret.op = CfaEdge::Op::Return;
                add_edge(std::move(ret));
                return next;
            }
            case Stmt::Kind::If: {
                LocId then_entry = alloc(fname);
                CfaEdge pos;
                pos.source = at;
                pos.target = then_entry;
                pos.op = CfaEdge::Op::Assume;
                pos.cond = s.cond.formula();
                add_edge(std::move(pos));
                LocId then_exit = build_stmts(s.body, then_entry, fname, pending_returns);
                Formula neg = Formula::negation(s.cond.formula());
                if (s.els.empty()) {
                    LocId join = alloc(fname);
                    CfaEdge j1;
                    j1.source = then_exit;
                    j1.target = join;
                    j1.op = CfaEdge::Op::Skip;
                    add_edge(std::move(j1));
                    CfaEdge negedge;
                    negedge.source = at;
                    negedge.target = join;
                    negedge.op = CfaEdge::Op::Assume;
                    negedge.cond = neg;
                    add_edge(std::move(negedge));
                    return join;
                }
                LocId else_entry = alloc(fname);
                CfaEdge negedge;
                negedge.source = at;
                negedge.target = else_entry;
                negedge.op = CfaEdge::Op::Assume;
                negedge.cond = neg;
                add_edge(std::move(negedge));
                LocId else_exit = build_stmts(s.els, else_entry, fname, pending_returns);
                LocId join = alloc(fname);
                CfaEdge j1;
                j1.source = then_exit;
                j1.target = join;
                j1.op = CfaEdge::Op::Skip;
                add_edge(std::move(j1));
                CfaEdge j2;
                j2.source = else_exit;
                j2.target = join;
                j2.op = CfaEdge::Op::Skip;
                add_edge(std::move(j2));
                return join;
            }
            case Stmt::Kind::While: {
                LocId head = alloc(fname);
                cfa_.loop_heads.insert(head);
                CfaEdge in;
                in.source = at;
                in.target = head;
                in.op = CfaEdge::Op::Skip;
                add_edge(std::move(in));
                LocId body_entry = alloc(fname);
                CfaEdge enter;
                enter.source = head;
                enter.target = body_entry;
                enter.op = CfaEdge::Op::Assume;
                enter.cond = s.cond.formula();
                add_edge(std::move(enter));
                LocId body_exit = build_stmts(s.body, body_entry, fname, pending_returns);
                CfaEdge back;
                back.source = body_exit;
                back.target = head;
                back.op = CfaEdge::Op::Skip;
                add_edge(std::move(back));
                LocId out = alloc(fname);
                CfaEdge leave;
                leave.source = head;
                leave.target = out;
                leave.op = CfaEdge::Op::Assume;
                leave.cond = Formula::negation(s.cond.formula());
                add_edge(std::move(leave));
                return out;
            }
            case Stmt::Kind::Block: return build_stmts(s.body, at, fname, pending_returns);
        }
        throw CfaError("unhandled statement kind");
    }
};

}  // namespace

Cfa build_cfa(const Ast& ast) { return Builder(ast).build(); }

}  // namespace miniver
