#include "doctest.h"

#include <set>

#include "miniver/lang/cfa.hpp"

using namespace miniver;

namespace {

SourceProgram src(const std::string& text) { return SourceProgram{text, "test", "r1"}; }

Cfa cfa_of(const std::string& text) { return build_cfa(parse_program(src(text))); }

/// Locations reachable from `from` along CFA edges.
std::set<LocId> reachable(const Cfa& cfa, LocId from) {
    std::set<LocId> seen{from};
    std::vector<LocId> stack{from};
    while (!stack.empty()) {
        LocId l = stack.back();
        stack.pop_back();
        for (int ei : cfa.outgoing_of(l)) {
            LocId t = cfa.edges[static_cast<size_t>(ei)].target;
            if (seen.insert(t).second) stack.push_back(t);
        }
    }
    return seen;
}

}  // namespace

TEST_CASE("minimal program with one error statement") {
    Ast ast = parse_program(src("main(){int x; x=0; if(x>0) error();}"));
    CHECK(ast.functions.size() == 1);
    CHECK(ast.functions[0].name == "main");
    Cfa cfa = cfa_of("main(){int x; x=0; if(x>0) error();}");
    CHECK(cfa.error_locations.size() == 1);
    CHECK(cfa.variables == std::set<std::string>{"x"});
}

TEST_CASE("empty program is a parse error") {
    CHECK_THROWS_AS(parse_program(src("")), ParseError);
    try {
        parse_program(src(""));
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
        CHECK(e.col == 1);
    }
}

TEST_CASE("two-function program matches a hand-built tree") {
    Ast parsed = parse_program(src("int g;\nmain(){ g = 1; f(); }\nf(){ g = g + 1; }"));

    Ast expected;
    expected.program_name = "test";
    expected.globals = {"g"};
    Function fmain;
    fmain.name = "main";
    Stmt assign;
    assign.kind = Stmt::Kind::Assign;
    assign.var = "g";
    assign.expr.value = LinExpr(1);
    fmain.body.push_back(assign);
    Stmt call;
    call.kind = Stmt::Kind::Call;
    call.var = "f";
    fmain.body.push_back(call);
    Function ff;
    ff.name = "f";
    Stmt bump;
    bump.kind = Stmt::Kind::Assign;
    bump.var = "g";
    bump.expr.value = LinExpr::var("g") + LinExpr(1);
    ff.body.push_back(bump);
    expected.functions.push_back(fmain);
    expected.functions.push_back(ff);

    CHECK(to_string(parsed) == to_string(expected));
}

TEST_CASE("straight-line three-statement main") {
    Cfa cfa = cfa_of("int a; int b; int c; main(){ a=1; b=2; c=3; }");
    CHECK(cfa.location_count() == 4);
    CHECK(cfa.edges.size() == 3);
    CHECK(cfa.loop_heads.empty());
    CHECK(cfa.entry == 1);
    CHECK(cfa.exit == 4);
}

TEST_CASE("while loop builds one head with an assume pair") {
    Cfa cfa = cfa_of("main(){ int x = 0; while (x < 2) { x = x + 1; } }");
    REQUIRE(cfa.loop_heads.size() == 1);
    LocId head = *cfa.loop_heads.begin();
    const auto& out = cfa.outgoing_of(head);
    REQUIRE(out.size() == 2);
    const CfaEdge& enter = cfa.edges[static_cast<size_t>(out[0])];
    const CfaEdge& leave = cfa.edges[static_cast<size_t>(out[1])];
    CHECK(enter.op == CfaEdge::Op::Assume);
    CHECK(leave.op == CfaEdge::Op::Assume);
    CHECK(enter.cond == Formula::compare(LinExpr::var("x"), CmpOp::Lt, LinExpr(2)));
    CHECK(leave.cond == Formula::negation(Formula::compare(LinExpr::var("x"), CmpOp::Lt, LinExpr(2))));
}

TEST_CASE("identical source builds structurally identical automata") {
    const char* text = "int g;\nmain(){ g=0; f(); if (g != 1) error(); }\nf(){ g = 1; }";
    CHECK(cfa_of(text) == cfa_of(text));
}

TEST_CASE("inlined calls carry the declared function name") {
    Cfa cfa = cfa_of("int g;\nmain(){ g=0; f(); }\nf(){ g=1; }");
    // main: 1 (entry), 2 (after g=0); f entry 3, f body exit 4; return to 5
    CHECK(cfa.function_of(1) == "main");
    CHECK(cfa.function_of(2) == "main");
    CHECK(cfa.function_of(3) == "f");
    CHECK(cfa.function_of(4) == "f");
    CHECK(cfa.function_of(5) == "main");
    CHECK(cfa.functions.at("f") == std::pair<LocId, LocId>{3, 4});
    bool saw_call = false, saw_return = false;
    for (const CfaEdge& e : cfa.edges) {
        if (e.op == CfaEdge::Op::Call) {
            saw_call = true;
            CHECK(e.callee == "f");
            CHECK(e.target == 3);
        }
        if (e.op == CfaEdge::Op::Return) saw_return = true;
    }
    CHECK(saw_call);
    CHECK(saw_return);
}

TEST_CASE("two call sites get distinct inlined copies") {
    Cfa cfa = cfa_of("int g;\nmain(){ f(); f(); }\nf(){ g=1; }");
    int f_locations = 0;
    for (LocId l = 1; l <= cfa.location_count(); ++l)
        if (cfa.function_of(l) == "f") ++f_locations;
    CHECK(f_locations == 4);  // two copies of entry+exit
    CHECK(reachable(cfa, cfa.entry).size() == static_cast<size_t>(cfa.location_count()));
}

TEST_CASE("uncalled functions become disconnected dead code after main") {
    Cfa cfa = cfa_of("int g;\nmain(){ g=0; }\nunused(){ g=2; }");
    CHECK(cfa.functions.count("unused"));
    auto [entry, exit] = cfa.functions.at("unused");
    CHECK(entry > cfa.exit);  // numbered after all of main
    CHECK(cfa.function_of(entry) == "unused");
    std::set<LocId> from_main = reachable(cfa, cfa.entry);
    CHECK_FALSE(from_main.count(entry));
    CHECK(reachable(cfa, entry).count(exit));
}

TEST_CASE("monotone renumbering under statement insertion") {
    const char* before =
        "int a; int b;\n"
        "main(){ a=1; a=2; b=3; b=4; }";
    const char* after =
        "int a; int b;\n"
        "main(){ a=1; a=2; a=5; b=3; b=4; }";
    Cfa ca = cfa_of(before);
    Cfa cb = cfa_of(after);
    // insertion after the second statement: locations 1..3 and the edges
    // among them are untouched, everything at or past the insertion shifts
    for (LocId l = 1; l <= 3; ++l) CHECK(ca.function_of(l) == cb.function_of(l));
    for (int i = 0; i < 2; ++i) CHECK(ca.edges[static_cast<size_t>(i)] == cb.edges[static_cast<size_t>(i)]);
    CHECK(cb.location_count() == ca.location_count() + 1);
}

TEST_CASE("reachability closure without dead code") {
    Cfa cfa = cfa_of(
        "int g; int x;\n"
        "main(){ g=0; x=0; if (x > 0) { g=1; } else { g=2; } while (x < 1) { x = x + 1; } f(); }\n"
        "f(){ g = g + 1; }");
    CHECK(reachable(cfa, cfa.entry).size() == static_cast<size_t>(cfa.location_count()));
}

TEST_CASE("frontend error cases") {
    // recursion
    CHECK_THROWS_AS(parse_program(src("main(){ f(); }\nf(){ f(); }")), ParseError);
    CHECK_THROWS_AS(parse_program(src("main(){ f(); }\nf(){ g(); }\ng(){ f(); }")), ParseError);
    // duplicate function
    CHECK_THROWS_AS(parse_program(src("main(){ }\nmain(){ }")), ParseError);
    // duplicate variable (program-wide namespace)
    CHECK_THROWS_AS(parse_program(src("main(){ int x; }\nf(){ int x; }")), ParseError);
    // undefined call
    CHECK_THROWS_AS(parse_program(src("main(){ nosuch(); }")), ParseError);
    // visibility: locals are not visible elsewhere
    CHECK_THROWS_AS(parse_program(src("main(){ int x; x=0; }\nf(){ x=1; }")), ParseError);
    // nonlinear arithmetic
    CHECK_THROWS_AS(parse_program(src("main(){ int x; int y; x = x * y; }")), ParseError);
    // missing main is a CFA error
    CHECK_THROWS_AS(build_cfa(parse_program(src("f(){ }"))), CfaError);
    // position reporting
    try {
        parse_program(src("main(){\n  int x = ;\n}"));
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(e.col == 11);
    }
}

TEST_CASE("conditions fold negation into the operator") {
    Cfa cfa = cfa_of("main(){ int x = 0; if (!(x == 1)) { x = 2; } }");
    bool found = false;
    for (const CfaEdge& e : cfa.edges) {
        if (e.op == CfaEdge::Op::Assume &&
            e.cond == Formula::compare(LinExpr::var("x"), CmpOp::Ne, LinExpr(1)))
            found = true;
    }
    CHECK(found);
}

TEST_CASE("input becomes havoc, initializers become assigns") {
    Cfa cfa = cfa_of("main(){ int x = input(); int y = 3; y = input(); }");
    std::vector<CfaEdge::Op> ops;
    for (const CfaEdge& e : cfa.edges) ops.push_back(e.op);
    CHECK(ops == std::vector<CfaEdge::Op>{CfaEdge::Op::Havoc, CfaEdge::Op::Assign, CfaEdge::Op::Havoc});
}
