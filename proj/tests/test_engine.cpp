#include "doctest.h"

#include "miniver/engine/cegar.hpp"
#include "miniver/precision/precision_io.hpp"
#include "support/generators.hpp"

using namespace miniver;

namespace {

Cfa cfa_of(const std::string& text) {
    return build_cfa(parse_program(SourceProgram{text, "fix", "r"}));
}

// Safe lock-discipline loop: needs refinement facts at the loop head.
const char* kSafeLockLoop =
    "int lock; int n;\n"
    "main(){\n"
    "  lock = 0; n = 0;\n"
    "  while (n < 2) {\n"
    "    lock = 1;\n"
    "    if (lock != 1) error();\n"
    "    lock = 0;\n"
    "    n = n + 1;\n"
    "  }\n"
    "  if (lock != 0) error();\n"
    "}\n";

const char* kUnsafeInput =
    "int x; int flag;\n"
    "main(){\n"
    "  x = input();\n"
    "  assume(x >= -8); assume(x <= 8);\n"
    "  flag = 0;\n"
    "  while (flag < 1) { flag = flag + 1; }\n"
    "  if (x == 3) { if (flag == 1) error(); }\n"
    "}\n";

VerifyOptions options(DomainKind d, AbstractionMode m = AbstractionMode::Boolean) {
    VerifyOptions o;
    o.domain = d;
    o.abstraction = m;
    return o;
}

ProgramPrecision empty_precision(DomainKind d) {
    ProgramPrecision p;
    p.domain = d;
    return p;
}

}  // namespace

TEST_CASE("safe program: refinements happen, the final precision is nonempty") {
    for (DomainKind d : {DomainKind::Explicit, DomainKind::Predicate}) {
        Cfa cfa = cfa_of(kSafeLockLoop);
        VerificationResult r = verify(cfa, empty_precision(d), options(d));
        CHECK(r.verdict.kind == VerificationVerdict::Kind::Safe);
        CHECK(r.stats.refinements >= 1);
        CHECK_FALSE(r.final_precision.empty());
        CHECK(r.stats.solver_calls > 0);
    }
}

TEST_CASE("re-verifying with the dumped precision needs no refinements") {
    for (DomainKind d : {DomainKind::Explicit, DomainKind::Predicate}) {
        for (AbstractionMode m : {AbstractionMode::Boolean, AbstractionMode::Cartesian}) {
            if (d == DomainKind::Explicit && m == AbstractionMode::Cartesian) continue;
            Cfa cfa = cfa_of(kSafeLockLoop);
            VerificationResult first = verify(cfa, empty_precision(d), options(d, m));
            REQUIRE(first.verdict.kind == VerificationVerdict::Kind::Safe);
            std::string dumped = dump_final_precision(first);
            CHECK(first.stats.precision_bytes_out == static_cast<long long>(dumped.size()));
            ProgramPrecision reread = read_precision_file(dumped, d).precision;
            ProgramPrecision initial = rescope(reread, ReuseScope::Function, cfa).precision;
            VerificationResult second = verify(cfa, initial, options(d, m));
            CHECK(second.verdict.kind == VerificationVerdict::Kind::Safe);
            CHECK(second.stats.refinements == 0);
            CHECK(second.stats.abstraction_computations <= first.stats.abstraction_computations);
        }
    }
}

TEST_CASE("dumped precision re-reads to the in-memory final precision") {
    Cfa cfa = cfa_of(kSafeLockLoop);
    VerificationResult r = verify(cfa, empty_precision(DomainKind::Predicate), options(DomainKind::Predicate));
    std::string dumped = dump_final_precision(r);
    ProgramPrecision back = read_precision_file(dumped, DomainKind::Predicate).precision;
    CHECK(back == r.final_precision);
}

TEST_CASE("unsafe program: model-validated counterexample, any initial precision") {
    for (DomainKind d : {DomainKind::Explicit, DomainKind::Predicate}) {
        Cfa cfa = cfa_of(kUnsafeInput);
        VerificationResult r = verify(cfa, empty_precision(d), options(d));
        REQUIRE(r.verdict.kind == VerificationVerdict::Kind::Unsafe);
        REQUIRE(r.verdict.counterexample);
        const Counterexample& cex = *r.verdict.counterexample;
        // the path's SSA formula evaluates to true under the attached model
        std::vector<const CfaEdge*> path;
        for (int e : cex.edges) path.push_back(&cfa.edges[static_cast<size_t>(e)]);
        PathFormula pf = path_formula(path);
        std::map<std::string, Int> env = cex.model;
        for (const auto& var : pf.formula.variables())
            if (!env.count(var)) env[var] = 0;
        CHECK(pf.formula.eval(env));
        CHECK(cfa.error_locations.count(path.back()->target));

        // an adversarial initial precision cannot change the verdict
        ProgramPrecision adversarial = empty_precision(d);
        if (d == DomainKind::Explicit) {
            adversarial.global.vars.insert("flag");
            adversarial.per_function["main"].vars.insert("x");
        } else {
            adversarial.global.preds.insert(
                make_predicate(Formula::compare(LinExpr::var("x"), CmpOp::Le, LinExpr(-5))));
            adversarial.per_function["main"].preds.insert(
                make_predicate(Formula::compare(LinExpr::var("flag"), CmpOp::Eq, LinExpr(7))));
        }
        VerificationResult r2 = verify(cfa, adversarial, options(d));
        CHECK(r2.verdict.kind == VerificationVerdict::Kind::Unsafe);
    }
}

TEST_CASE("feasibility checking on concrete paths") {
    Cfa feasible = cfa_of("int x;\nmain(){ x = 1; assume(x == 1); error(); }");
    std::vector<const CfaEdge*> path;
    for (const CfaEdge& e : feasible.edges) path.push_back(&e);
    Solver solver;
    Feasibility f = check_feasibility(path, solver);
    CHECK(f.feasible);

    Cfa infeasible = cfa_of("int x;\nmain(){ x = 0; assume(x > 0); error(); }");
    path.clear();
    for (const CfaEdge& e : infeasible.edges) path.push_back(&e);
    CHECK_FALSE(check_feasibility(path, solver).feasible);
}

TEST_CASE("feasibility with havoc agrees with bounded input enumeration") {
    // ten edges, one input
    Cfa cfa = cfa_of(
        "int a; int b; int c;\n"
        "main(){ a = input(); assume(a >= -8); assume(a <= 8); b = a + 2; c = b - a;\n"
        "        assume(c == 2); assume(b >= 0); a = a - b; assume(a == -2); error(); }");
    std::vector<const CfaEdge*> path;
    for (const CfaEdge& e : cfa.edges) path.push_back(&e);
    REQUIRE(path.size() == 10);
    Solver solver;
    Feasibility f = check_feasibility(path, solver);

    // oracle: execute the path concretely for every input value in [-8, 8]
    bool oracle_feasible = false;
    for (Int input = -8; input <= 8 && !oracle_feasible; ++input) {
        std::map<std::string, Int> env;
        bool alive = true;
        for (const CfaEdge* e : path) {
            if (e->op == CfaEdge::Op::Havoc) {
                env[e->var] = input;
            } else if (e->op == CfaEdge::Op::Assign) {
                env[e->var] = e->expr.eval(env);
            } else if (e->op == CfaEdge::Op::Assume) {
                if (!e->cond.eval(env)) {
                    alive = false;
                    break;
                }
            }
        }
        oracle_feasible = alive;
    }
    CHECK(f.feasible == oracle_feasible);
    REQUIRE(f.inputs.size() == 1);
    CHECK(f.inputs.count("a@1"));
}

TEST_CASE("abstraction computations match hand-traced block-end entries") {
    // no loop: one arrival at the exit, one at the error location
    Cfa a = cfa_of("main(){ int x = 0; if (x > 0) error(); }");
    VerificationResult ra = verify(a, empty_precision(DomainKind::Predicate), options(DomainKind::Predicate));
    CHECK(ra.verdict.kind == VerificationVerdict::Kind::Safe);
    CHECK(ra.stats.abstraction_computations == 2);

    // straight line: a single arrival at the exit
    Cfa b = cfa_of("main(){ int y = 1; y = y + 1; }");
    VerificationResult rb = verify(b, empty_precision(DomainKind::Predicate), options(DomainKind::Predicate));
    CHECK(rb.stats.abstraction_computations == 1);

    // one loop, no error: head entered twice (the second arrival is covered),
    // exit entered once
    Cfa c = cfa_of("main(){ int x = 0; while (x < 2) { x = x + 1; } }");
    VerificationResult rc = verify(c, empty_precision(DomainKind::Predicate), options(DomainKind::Predicate));
    CHECK(rc.verdict.kind == VerificationVerdict::Kind::Safe);
    CHECK(rc.stats.abstraction_computations == 3);
}

TEST_CASE("final precision contains the initial precision and re-running is stable") {
    Cfa cfa = cfa_of(kSafeLockLoop);
    ProgramPrecision initial = empty_precision(DomainKind::Explicit);
    initial.per_function["main"].vars.insert("n");
    VerificationResult r = verify(cfa, initial, options(DomainKind::Explicit));
    CHECK(r.verdict.kind == VerificationVerdict::Kind::Safe);
    CHECK(r.final_precision.effective_at(cfa.entry, cfa).contains(initial.effective_at(cfa.entry, cfa)));
    VerificationResult again = verify(cfa, r.final_precision, options(DomainKind::Explicit));
    CHECK(again.stats.refinements == 0);
}

TEST_CASE("safe fixpoint: every live node is covered or expanded, no error states") {
    for (DomainKind d : {DomainKind::Explicit, DomainKind::Predicate}) {
        Cfa cfa = cfa_of(kSafeLockLoop);
        Arg arg;
        VerificationResult r = verify(cfa, empty_precision(d), options(d), &arg);
        REQUIRE(r.verdict.kind == VerificationVerdict::Kind::Safe);
        CHECK(arg.waitlist.empty());
        for (int id : arg.live_ids()) {
            const ArgNode& n = arg.nodes[static_cast<size_t>(id)];
            CHECK_FALSE(cfa.error_locations.count(n.loc));
            if (n.covering < 0) CHECK(n.expanded);
            if (n.covering >= 0) CHECK(n.children.empty());
        }
    }
}

TEST_CASE("lazy pruning keeps unrelated parts of the graph") {
    // hand-built diamond with a tail under one arm:
    //        0
    //      /   \      edge ids are fabricated CFA indices
    //     1     2
    //     |     |
    //     3     4
    Arg arg;
    ExplicitState s;
    int n0 = arg.create(1, s, -1, -1);
    int n1 = arg.create(2, s, n0, 0);
    int n2 = arg.create(3, s, n0, 1);
    int n3 = arg.create(4, s, n1, 2);
    int n4 = arg.create(5, s, n2, 3);
    // a node covered by one inside the doomed subtree
    int n5 = arg.create(6, s, n2, 4);
    arg.nodes[static_cast<size_t>(n5)].covering = n3;

    arg.prune(n1);
    CHECK(arg.nodes[static_cast<size_t>(n1)].removed);
    CHECK(arg.nodes[static_cast<size_t>(n3)].removed);
    // the sibling branch is retained node for node
    CHECK_FALSE(arg.nodes[static_cast<size_t>(n0)].removed);
    CHECK_FALSE(arg.nodes[static_cast<size_t>(n2)].removed);
    CHECK_FALSE(arg.nodes[static_cast<size_t>(n4)].removed);
    // the parent returns to the waitlist, its child link is dissolved
    CHECK(arg.nodes[static_cast<size_t>(n0)].on_waitlist);
    CHECK_FALSE(arg.nodes[static_cast<size_t>(n0)].children.count(0));
    CHECK(arg.nodes[static_cast<size_t>(n0)].children.count(1));
    // the covered node is uncovered and re-added to the waitlist
    CHECK(arg.nodes[static_cast<size_t>(n5)].covering == -1);
    CHECK(arg.nodes[static_cast<size_t>(n5)].on_waitlist);
}

TEST_CASE("pruning at the root clears the graph for a restart") {
    Arg arg;
    ExplicitState s;
    int root = arg.create(1, s, -1, -1);
    arg.create(2, s, root, 0);
    arg.prune(root);
    CHECK(arg.nodes.empty());
    CHECK(arg.waitlist.empty());
}

TEST_CASE("initial precision of the wrong domain is rejected") {
    Cfa cfa = cfa_of("main(){ int x = 0; }");
    ProgramPrecision p = empty_precision(DomainKind::Explicit);
    p.global.vars.insert("x");
    CHECK_THROWS_AS(verify(cfa, p, options(DomainKind::Predicate)), std::invalid_argument);
}

TEST_CASE("budgets produce resource-out, never a verdict") {
    Cfa cfa = cfa_of(kSafeLockLoop);
    VerifyOptions o = options(DomainKind::Predicate);
    o.max_arg_nodes = 3;
    VerificationResult r = verify(cfa, empty_precision(DomainKind::Predicate), o);
    CHECK(r.verdict.kind == VerificationVerdict::Kind::ResourceOut);
    CHECK_FALSE(r.verdict.reason.empty());
}

TEST_CASE("verification runs are deterministic") {
    for (DomainKind d : {DomainKind::Explicit, DomainKind::Predicate}) {
        Cfa cfa = cfa_of(kSafeLockLoop);
        VerificationResult a = verify(cfa, empty_precision(d), options(d));
        VerificationResult b = verify(cfa, empty_precision(d), options(d));
        CHECK(a.verdict.kind == b.verdict.kind);
        CHECK(a.stats.refinements == b.stats.refinements);
        CHECK(a.stats.abstraction_computations == b.stats.abstraction_computations);
        CHECK(a.stats.arg_nodes == b.stats.arg_nodes);
        CHECK(a.final_precision == b.final_precision);
        CHECK(dump_final_precision(a) == dump_final_precision(b));
    }
}
