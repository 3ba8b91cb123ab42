#include "doctest.h"

#include "miniver/analysis/explicit_domain.hpp"
#include "support/generators.hpp"

using namespace miniver;

namespace {

CfaEdge assign_edge(const std::string& var, LinExpr rhs) {
    CfaEdge e;
    e.op = CfaEdge::Op::Assign;
    e.var = var;
    e.expr = std::move(rhs);
    return e;
}

CfaEdge havoc_edge(const std::string& var) {
    CfaEdge e;
    e.op = CfaEdge::Op::Havoc;
    e.var = var;
    return e;
}

CfaEdge assume_edge(Formula cond) {
    CfaEdge e;
    e.op = CfaEdge::Op::Assume;
    e.cond = std::move(cond);
    return e;
}

const std::set<std::string> kAll = {"a", "b", "x", "y"};

}  // namespace

TEST_CASE("restriction keeps exactly the precision's variables") {
    ExplicitState v{{{"a", 4}, {"b", 15}}};
    CHECK(restrict_to(v, {"b"}) == ExplicitState{{{"b", 15}}});
    CHECK(restrict_to(v, {}) == ExplicitState{});
    CHECK(restrict_to(v, {"a", "b", "c"}) == v);
    CHECK(restrict_to(restrict_to(v, {"b"}), {"b"}) == restrict_to(v, {"b"}));
}

TEST_CASE("successor evaluates, havocs, and filters by the target precision") {
    ExplicitState v{{{"x", 0}}};
    auto s1 = explicit_successor(v, assign_edge("x", LinExpr::var("x") + LinExpr(1)), {"x"});
    REQUIRE(s1);
    CHECK(*s1 == ExplicitState{{{"x", 1}}});

    // assignment from an unknown operand makes the target unknown
    auto s2 = explicit_successor(ExplicitState{}, assign_edge("x", LinExpr::var("y") + LinExpr(1)), {"x"});
    REQUIRE(s2);
    CHECK(s2->values.empty());

    // untracked targets are dropped even when computable
    auto s3 = explicit_successor(v, assign_edge("x", LinExpr(5)), {});
    REQUIRE(s3);
    CHECK(s3->values.empty());

    auto s4 = explicit_successor(v, havoc_edge("x"), {"x"});
    REQUIRE(s4);
    CHECK(s4->values.empty());
}

TEST_CASE("assume detects definite falsehood and propagates equalities") {
    Formula x_gt_1 = Formula::compare(LinExpr::var("x"), CmpOp::Gt, LinExpr(1));
    CHECK_FALSE(explicit_successor(ExplicitState{{{"x", 1}}}, assume_edge(x_gt_1), {"x"}));
    // unknown passes
    auto s = explicit_successor(ExplicitState{}, assume_edge(x_gt_1), {"x"});
    REQUIRE(s);
    CHECK(s->values.empty());
    // equality constant propagation: x = y + 1 with known y binds x
    Formula x_eq_y1 = Formula::compare(LinExpr::var("x"), CmpOp::Eq, LinExpr::var("y") + LinExpr(1));
    auto s2 = explicit_successor(ExplicitState{{{"y", 3}}}, assume_edge(x_eq_y1), {"x", "y"});
    REQUIRE(s2);
    CHECK(*s2 == ExplicitState{{{"x", 4}, {"y", 3}}});
    // 2x = 1 has no integer solution even with x unknown
    Formula two_x_eq_1 = Formula::compare(LinExpr::var("x").scaled(2), CmpOp::Eq, LinExpr(1));
    CHECK_FALSE(explicit_successor(ExplicitState{}, assume_edge(two_x_eq_1), {"x"}));
    // a disequality on an unknown propagates nothing
    Formula x_ne_3 = Formula::compare(LinExpr::var("x"), CmpOp::Ne, LinExpr(3));
    auto s3 = explicit_successor(ExplicitState{}, assume_edge(x_ne_3), {"x"});
    REQUIRE(s3);
    CHECK(s3->values.empty());
}

TEST_CASE("coverage: the covering state agrees or generalizes") {
    ExplicitState concrete{{{"x", 1}, {"y", 2}}};
    CHECK(explicit_covered(concrete, ExplicitState{{{"x", 1}}}));
    CHECK(explicit_covered(concrete, ExplicitState{}));
    CHECK_FALSE(explicit_covered(concrete, ExplicitState{{{"x", 2}}}));
    // the covering state tracks a variable the covered one does not
    CHECK_FALSE(explicit_covered(ExplicitState{{{"x", 1}}}, ExplicitState{{{"x", 1}, {"y", 0}}}));
}

TEST_CASE("monotonicity: a larger precision tracks more") {
    testsupport::Gen gen(3);
    std::vector<std::string> vars(kAll.begin(), kAll.end());
    for (int i = 0; i < 50; ++i) {
        ExplicitState v;
        for (const auto& name : vars)
            if (gen.pick_int(0, 1)) v.values[name] = gen.pick_int(-8, 8);
        std::set<std::string> small, large;
        for (const auto& name : vars) {
            if (gen.pick_int(0, 1)) {
                large.insert(name);
                if (gen.pick_int(0, 1)) small.insert(name);
            }
        }
        ExplicitState rs = restrict_to(v, small);
        ExplicitState rl = restrict_to(v, large);
        CHECK(explicit_covered(rl, rs));  // fewer tracked entries = more abstract
    }
}

TEST_CASE("soundness: concrete steps stay represented") {
    testsupport::Gen gen(17);
    std::vector<std::string> vars(kAll.begin(), kAll.end());
    for (int i = 0; i < 200; ++i) {
        std::map<std::string, Int> concrete = gen.environment(vars);
        // abstract state tracking a random subset, agreeing with the concrete one
        ExplicitState v;
        std::set<std::string> pi;
        for (const auto& name : vars) {
            if (gen.pick_int(0, 1)) v.values[name] = concrete[name];
            if (gen.pick_int(0, 1)) pi.insert(name);
        }
        CfaEdge e;
        switch (gen.pick_int(0, 2)) {
            case 0: e = assign_edge(gen.pick_var(vars), gen.lin_expr(vars)); break;
            case 1: e = havoc_edge(gen.pick_var(vars)); break;
            default: e = assume_edge(gen.atom(vars)); break;
        }
        // concrete post-state
        std::map<std::string, Int> post = concrete;
        if (e.op == CfaEdge::Op::Assign) post[e.var] = e.expr.eval(concrete);
        if (e.op == CfaEdge::Op::Havoc) post[e.var] = gen.pick_int(-8, 8);
        if (e.op == CfaEdge::Op::Assume && !e.cond.eval(concrete)) continue;  // step not taken
        auto abstract_post = explicit_successor(v, e, pi);
        REQUIRE(abstract_post);  // a taken concrete step is never refuted
        for (const auto& [name, value] : abstract_post->values) CHECK(value == post[name]);
    }
}

namespace {

/// Fixture for refinement: parse a straight-line program and return its CFA.
struct RefinePath {
    Cfa cfa;
    std::vector<const CfaEdge*> edges;
    std::vector<ExplicitState> states;  // explored with the empty precision
};

RefinePath straight_line(const std::string& text) {
    RefinePath p;
    p.cfa = build_cfa(parse_program(SourceProgram{text, "fix", "r"}));
    LocId at = p.cfa.entry;
    p.states.emplace_back();
    for (;;) {
        const auto& out = p.cfa.outgoing_of(at);
        if (out.empty()) break;
        REQUIRE(out.size() == 1);
        const CfaEdge& e = p.cfa.edges[static_cast<size_t>(out[0])];
        p.edges.push_back(&e);
        p.states.emplace_back();  // empty precision: every state is empty
        at = e.target;
    }
    return p;
}

}  // namespace

TEST_CASE("refinement finds the blocking variable, function-scoped, with the earliest pivot") {
    RefinePath p = straight_line("main(){ int y = 0; int x = input(); assume(y != 0); error(); }");
    ProgramPrecision empty;
    empty.domain = DomainKind::Explicit;
    ExplicitRefinement r = refine_explicit(p.edges, p.states, p.cfa, empty);
    CHECK_FALSE(r.domain_incomplete);
    CHECK(r.increment.per_function.at("main").vars == std::set<std::string>{"y"});
    CHECK(r.increment.per_location.empty());
    CHECK(r.increment.global.empty());
    CHECK(r.pivot == 1);  // the state right after y := 0 changes first
}

TEST_CASE("already-sufficient precision is a caller bug") {
    RefinePath p = straight_line("main(){ int y = 0; assume(y != 0); error(); }");
    ProgramPrecision current;
    current.domain = DomainKind::Explicit;
    current.per_function["main"].vars.insert("y");
    CHECK_THROWS_AS(refine_explicit(p.edges, p.states, p.cfa, current), std::logic_error);
}

TEST_CASE("two independent blockers: greedy elimination keeps a sufficient set") {
    RefinePath p = straight_line("main(){ int a = 0; int b = 1; assume(a == 1); assume(b == 0); error(); }");
    ProgramPrecision empty;
    empty.domain = DomainKind::Explicit;
    ExplicitRefinement r = refine_explicit(p.edges, p.states, p.cfa, empty);
    CHECK_FALSE(r.domain_incomplete);
    // greedy elimination in occurrence order drops a (b still blocks), keeps b
    CHECK(r.increment.per_function.at("main").vars == std::set<std::string>{"b"});
    // oracle re-execution: the increment really rules the path out
    ExplicitState cur;
    bool bottom = false;
    for (const CfaEdge* e : p.edges) {
        auto next = explicit_successor(cur, *e, r.increment.effective_at(e->target, p.cfa).vars);
        if (!next) {
            bottom = true;
            break;
        }
        cur = *next;
    }
    CHECK(bottom);
}

TEST_CASE("paths the domain cannot refute are reported, not looped on") {
    RefinePath p = straight_line("main(){ int x = input(); assume(x >= 1); assume(x <= 0); error(); }");
    ProgramPrecision empty;
    empty.domain = DomainKind::Explicit;
    ExplicitRefinement r = refine_explicit(p.edges, p.states, p.cfa, empty);
    CHECK(r.domain_incomplete);
}
