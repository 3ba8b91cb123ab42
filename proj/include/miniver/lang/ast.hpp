#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "miniver/formula/formula.hpp"

namespace miniver {

/// One MiniImp source text plus identifying labels.
struct SourceProgram {
    std::string text;
    std::string name;
    std::string revision_id;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& msg, int line, int col)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " + std::to_string(col) + ")"),
          line(line),
          col(col) {}
    int line;
    int col;
};

/// Assignment right-hand side: a linear expression or a nondeterministic
/// input() read.
struct Expr {
    bool input = false;
    LinExpr value;
};

/// Atomic comparison; '!' in source is folded into the operator.
struct Cond {
    LinExpr lhs;
    CmpOp op = CmpOp::Eq;
    LinExpr rhs;

    Formula formula() const { return Formula::compare(lhs, op, rhs); }
};

struct Stmt {
    enum class Kind { Decl, Assign, If, While, Call, Error, Assume, Return, Block };
    Kind kind = Kind::Block;
    std::string var;  // Decl/Assign target, Call callee
    bool has_init = false;
    Expr expr;  // Decl initializer / Assign rhs
    Cond cond;  // If/While/Assume
    std::vector<Stmt> body;  // If-then, While-body, Block statements
    std::vector<Stmt> els;   // If-else
    int line = 0, col = 0;
};

struct Function {
    std::string name;
    std::vector<Stmt> body;
    int line = 0, col = 0;
};

struct Ast {
    std::string program_name;
    std::vector<std::string> globals;  // declaration order
    std::vector<Function> functions;   // declaration order

    const Function* find_function(const std::string& name) const;
};

/// Parse MiniImp source into an Ast. Performs name resolution (variables,
/// calls), duplicate checks, and recursion detection.
Ast parse_program(const SourceProgram& src);

/// Stable text dump used by tests to compare hand-built trees.
std::string to_string(const Ast& ast);

}  // namespace miniver
