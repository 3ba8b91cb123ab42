#include "doctest.h"

#include "miniver/formula/formula.hpp"
#include "support/generators.hpp"

using namespace miniver;

namespace {
LinExpr v(const std::string& name) { return LinExpr::var(name); }
}

TEST_CASE("atom canonicalization") {
    // x >= 2 becomes -x <= -2
    Formula f = Formula::compare(v("x"), CmpOp::Ge, LinExpr(2));
    CHECK(to_sexpr(f) == "(<= (* -1 |x|) -2)");

    // x > 3 becomes -x < -3
    CHECK(to_sexpr(Formula::compare(v("x"), CmpOp::Gt, LinExpr(3))) == "(< (* -1 |x|) -3)");

    // disequality is a negated equality
    Formula ne = Formula::compare(v("x"), CmpOp::Ne, LinExpr(0));
    CHECK(ne.kind() == Formula::Kind::Not);
    CHECK(to_sexpr(ne) == "(not (= |x| 0))");

    // gcd reduction, including the bound
    CHECK(to_sexpr(Formula::compare(v("x").scaled(2), CmpOp::Le, LinExpr(4))) == "(<= |x| 2)");
    CHECK(to_sexpr(Formula::compare(v("x").scaled(2), CmpOp::Le, LinExpr(3))) == "(<= (* 2 |x|) 3)");

    // equality sign normalization: -x = -3 and x = 3 coincide
    Formula a = Formula::compare(v("x").scaled(-1), CmpOp::Eq, LinExpr(-3));
    Formula b = Formula::compare(v("x"), CmpOp::Eq, LinExpr(3));
    CHECK(a == b);

    // constant comparisons fold
    CHECK(Formula::compare(LinExpr(0), CmpOp::Le, LinExpr(5)).is_true());
    CHECK(Formula::compare(LinExpr(7), CmpOp::Lt, LinExpr(5)).is_false());

    // x - x <= 0 folds to true
    CHECK(Formula::compare(v("x") - v("x"), CmpOp::Le, LinExpr(0)).is_true());
}

TEST_CASE("substitution matches the weakest-precondition examples") {
    // (x <= 1)[x -> x+1] = x <= 0
    Formula f = Formula::compare(v("x"), CmpOp::Le, LinExpr(1));
    Formula g = f.substituted("x", v("x") + LinExpr(1));
    CHECK(to_sexpr(g) == "(<= |x| 0)");

    // substitution by a constant folds
    Formula h = Formula::compare(v("x"), CmpOp::Gt, LinExpr(0)).substituted("x", LinExpr(0));
    CHECK(h.is_false());
}

TEST_CASE("atoms_of strips negations and keeps canonical forms") {
    Formula f = Formula::conjunction({Formula::compare(v("x"), CmpOp::Le, LinExpr(0)),
                                      Formula::negation(Formula::compare(v("y"), CmpOp::Eq, LinExpr(3)))});
    auto atoms = atoms_of(f);
    REQUIRE(atoms.size() == 2);
    CHECK(atoms.count(make_predicate(Formula::compare(v("x"), CmpOp::Le, LinExpr(0)))));
    CHECK(atoms.count(make_predicate(Formula::compare(v("y"), CmpOp::Eq, LinExpr(3)))));

    CHECK(atoms_of(Formula::truth(true)).empty());
}

TEST_CASE("atoms of a weakest-precondition fold match a hand computation") {
    // wp over [y := x + 1; assume(y > 0); x := y - 2] of (x = 0):
    // substitute x -> y-2:      y - 2 = 0       (atom y = 2)
    // assume combinator:        y > 0 -> y = 2
    // substitute y -> x + 1:    x+1 > 0 -> x+1 = 2
    Formula f = Formula::compare(v("x"), CmpOp::Eq, LinExpr(0));
    f = f.substituted("x", v("y") - LinExpr(2));
    f = Formula::implication(Formula::compare(v("y"), CmpOp::Gt, LinExpr(0)), f);
    f = f.substituted("y", v("x") + LinExpr(1));
    auto atoms = atoms_of(f);
    REQUIRE(atoms.size() == 2);
    CHECK(atoms.count(make_predicate(Formula::compare(v("x") + LinExpr(1), CmpOp::Gt, LinExpr(0)))));
    CHECK(atoms.count(make_predicate(Formula::compare(v("x"), CmpOp::Eq, LinExpr(1)))));
}

TEST_CASE("construction simplifies trivial boolean structure") {
    Formula atom = Formula::compare(v("x"), CmpOp::Le, LinExpr(1));
    CHECK(Formula::conjunction({Formula::truth(true), atom}) == atom);
    CHECK(Formula::conjunction({Formula::truth(false), atom}).is_false());
    CHECK(Formula::disjunction({Formula::truth(true), atom}).is_true());
    CHECK(Formula::disjunction({}).is_false());
    CHECK(Formula::conjunction({}).is_true());
    CHECK(Formula::negation(Formula::negation(atom)) == atom);
}

TEST_CASE("evaluation agrees with a direct reading on random formulas") {
    testsupport::Gen gen(7);
    std::vector<std::string> vars = {"a", "b", "c"};
    for (int i = 0; i < 200; ++i) {
        Formula f = gen.formula(vars);
        auto env = gen.environment(vars);
        // renaming all variables must not change the value
        std::map<std::string, std::string> renaming = {{"a", "p"}, {"b", "q"}, {"c", "r"}};
        std::map<std::string, Int> renamed_env;
        for (const auto& [k, val] : env) renamed_env[renaming[k]] = val;
        CHECK(f.eval(env) == f.renamed(renaming).eval(renamed_env));
    }
}

TEST_CASE("substitution respects evaluation") {
    testsupport::Gen gen(13);
    std::vector<std::string> vars = {"a", "b"};
    for (int i = 0; i < 200; ++i) {
        Formula f = gen.formula(vars);
        LinExpr repl = gen.lin_expr({"b"});
        auto env = gen.environment(vars);
        std::map<std::string, Int> post = env;
        post["a"] = repl.eval(env);
        CHECK(f.substituted("a", repl).eval(env) == f.eval(post));
    }
}

#include "miniver/formula/solver.hpp"
#include "miniver/formula/wp.hpp"
#include "miniver/lang/cfa.hpp"

TEST_CASE("weakest precondition per edge kind") {
    int fresh = 0;
    Formula x_le_1 = Formula::compare(v("x"), CmpOp::Le, LinExpr(1));

    CfaEdge assign;
    assign.op = CfaEdge::Op::Assign;
    assign.var = "x";
    assign.expr = v("x") + LinExpr(1);
    CHECK(weakest_precondition(x_le_1, assign, AssumeCombinator::Implication, fresh) ==
          Formula::compare(v("x"), CmpOp::Le, LinExpr(0)));

    CfaEdge skip;
    skip.op = CfaEdge::Op::Skip;
    CHECK(weakest_precondition(x_le_1, skip, AssumeCombinator::Implication, fresh) == x_le_1);

    CfaEdge assume;
    assume.op = CfaEdge::Op::Assume;
    assume.cond = Formula::compare(v("y"), CmpOp::Eq, LinExpr(0));
    CHECK(weakest_precondition(x_le_1, assume, AssumeCombinator::Implication, fresh) ==
          Formula::implication(assume.cond, x_le_1));
    CHECK(weakest_precondition(x_le_1, assume, AssumeCombinator::Conjunction, fresh) ==
          Formula::conjunction({assume.cond, x_le_1}));

    // havoc renames to a fresh free variable
    CfaEdge havoc;
    havoc.op = CfaEdge::Op::Havoc;
    havoc.var = "x";
    Formula renamed = weakest_precondition(x_le_1, havoc, AssumeCombinator::Implication, fresh);
    CHECK_FALSE(renamed.variables().count("x"));
    CHECK(renamed.variables().size() == 1);
}

TEST_CASE("feasibility by folding wp over a path is checked by the solver") {
    // path [x := 0; assume(x > 0)]: fold the conjunction combinator backward
    // over `true`; the result collapses to 0 > 0, i.e. false
    int fresh = 0;
    CfaEdge assign;
    assign.op = CfaEdge::Op::Assign;
    assign.var = "x";
    assign.expr = LinExpr(0);
    CfaEdge assume;
    assume.op = CfaEdge::Op::Assume;
    assume.cond = Formula::compare(v("x"), CmpOp::Gt, LinExpr(0));

    Formula f = Formula::truth(true);
    f = weakest_precondition(f, assume, AssumeCombinator::Conjunction, fresh);
    f = weakest_precondition(f, assign, AssumeCombinator::Conjunction, fresh);
    CHECK(f.is_false());
    CHECK_FALSE(check_sat(f).is_sat());
}
