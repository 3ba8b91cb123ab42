#include <cctype>
#include <map>
#include <optional>
#include <set>

#include "miniver/lang/ast.hpp"

namespace miniver {

namespace {

struct Token {
    enum class Kind { Ident, Number, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    Int number = 0;
    int line = 1, col = 1;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;

    int cur() const { return pos_ < text_.size() ? static_cast<unsigned char>(text_[pos_]) : -1; }

    void bump() {
        if (pos_ < text_.size()) {
            if (text_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    void skip_trivia() {
        for (;;) {
            while (std::isspace(cur())) bump();
            if (cur() == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (cur() != -1 && cur() != '\n') bump();
                continue;
            }
            if (cur() == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
                int l = line_, c = col_;
                bump();
                bump();
                while (!(cur() == '*' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/')) {
                    if (cur() == -1) throw ParseError("unterminated comment", l, c);
                    bump();
                }
                bump();
                bump();
                continue;
            }
            break;
        }
    }

    void advance() {
        skip_trivia();
        tok_ = Token{};
        tok_.line = line_;
        tok_.col = col_;
        int c = cur();
        if (c == -1) {
            tok_.kind = Token::Kind::End;
            tok_.text = "<end of input>";
            return;
        }
        if (std::isalpha(c) || c == '_') {
            std::string s;
            while (std::isalnum(cur()) || cur() == '_') {
                s += static_cast<char>(cur());
                bump();
            }
            tok_.kind = Token::Kind::Ident;
            tok_.text = s;
            return;
        }
        if (std::isdigit(c)) {
            std::string s;
            while (std::isdigit(cur())) {
                s += static_cast<char>(cur());
                bump();
            }
            tok_.kind = Token::Kind::Number;
            tok_.text = s;
            try {
                tok_.number = std::stoll(s);
            } catch (const std::out_of_range&) {
                throw ParseError("integer literal out of range", tok_.line, tok_.col);
            }
            return;
        }
        // multi-char operators first
        static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||"};
        for (const char* op : two) {
            if (c == op[0] && pos_ + 1 < text_.size() && text_[pos_ + 1] == op[1]) {
                tok_.kind = Token::Kind::Punct;
                tok_.text = op;
                bump();
                bump();
                return;
            }
        }
        tok_.kind = Token::Kind::Punct;
        tok_.text = std::string(1, static_cast<char>(c));
        bump();
    }
};

bool is_keyword(const std::string& s) {
    static const std::set<std::string> kw = {"int", "if", "else", "while", "return", "assume", "error", "input"};
    return kw.count(s) > 0;
}

class Parser {
  public:
    explicit Parser(const SourceProgram& src) : src_(src), lex_(src.text) {}

    Ast parse() {
        if (lex_.peek().kind == Token::Kind::End)
            throw ParseError("empty program", lex_.peek().line, lex_.peek().col);
        Ast ast;
        ast.program_name = src_.name;
        while (lex_.peek().kind != Token::Kind::End) {
            Token t = expect_ident("declaration");
            if (t.text == "int") {
                // global: int name ;
                Token name = expect_ident("variable name");
                check_fresh_var(name);
                if (lex_.peek().text == "=")
                    throw ParseError("global variables cannot have initializers", lex_.peek().line,
                                     lex_.peek().col);
                expect_punct(";");
                ast.globals.push_back(name.text);
                globals_.insert(name.text);
                continue;
            }
            // function: name ( ) { ... }
            if (is_keyword(t.text)) throw ParseError("expected a function definition", t.line, t.col);
            if (function_names_.count(t.text)) throw ParseError("duplicate function '" + t.text + "'", t.line, t.col);
            expect_punct("(");
            expect_punct(")");
            Function fn;
            fn.name = t.text;
            fn.line = t.line;
            fn.col = t.col;
            function_names_.insert(fn.name);
            current_locals_.clear();
            expect_punct("{");
            fn.body = statements_until_brace();
            ast.functions.push_back(std::move(fn));
            locals_per_function_[t.text] = current_locals_;
        }
        resolve(ast);
        return ast;
    }

  private:
    const SourceProgram& src_;
    Lexer lex_;
    std::set<std::string> globals_;
    std::set<std::string> all_vars_;  // program-wide uniqueness
    std::set<std::string> function_names_;
    std::set<std::string> current_locals_;
    std::map<std::string, std::set<std::string>> locals_per_function_;

    [[noreturn]] void fail(const std::string& msg, const Token& at) { throw ParseError(msg, at.line, at.col); }

    Token expect_ident(const std::string& what) {
        Token t = lex_.take();
        if (t.kind != Token::Kind::Ident) fail("expected " + what + ", found '" + t.text + "'", t);
        return t;
    }

    Token expect_punct(const std::string& p) {
        Token t = lex_.take();
        if (t.kind != Token::Kind::Punct || t.text != p) fail("expected '" + p + "', found '" + t.text + "'", t);
        return t;
    }

    void check_fresh_var(const Token& name) {
        if (is_keyword(name.text)) fail("'" + name.text + "' is a keyword", name);
        if (all_vars_.count(name.text)) fail("duplicate variable '" + name.text + "'", name);
        all_vars_.insert(name.text);
    }

    std::vector<Stmt> statements_until_brace() {
        std::vector<Stmt> out;
        while (!(lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == "}")) {
            if (lex_.peek().kind == Token::Kind::End)
                fail("expected '}'", lex_.peek());
            out.push_back(statement());
        }
        lex_.take();  // '}'
        return out;
    }

    Stmt statement() {
        Token t = lex_.peek();
        Stmt s;
        s.line = t.line;
        s.col = t.col;
        if (t.kind == Token::Kind::Punct && t.text == "{") {
            lex_.take();
            s.kind = Stmt::Kind::Block;
            s.body = statements_until_brace();
            return s;
        }
        if (t.kind != Token::Kind::Ident) fail("expected a statement, found '" + t.text + "'", t);
        if (t.text == "int") {
            lex_.take();
            Token name = expect_ident("variable name");
            check_fresh_var(name);
            current_locals_.insert(name.text);
            s.kind = Stmt::Kind::Decl;
            s.var = name.text;
            if (lex_.peek().text == "=") {
                lex_.take();
                s.has_init = true;
                s.expr = expression();
            }
            expect_punct(";");
            return s;
        }
        if (t.text == "if") {
            lex_.take();
            expect_punct("(");
            s.kind = Stmt::Kind::If;
            s.cond = condition();
            expect_punct(")");
            s.body.push_back(statement());
            if (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "else") {
                lex_.take();
                s.els.push_back(statement());
            }
            return s;
        }
        if (t.text == "while") {
            lex_.take();
            expect_punct("(");
            s.kind = Stmt::Kind::While;
            s.cond = condition();
            expect_punct(")");
            s.body.push_back(statement());
            return s;
        }
        if (t.text == "assume") {
            lex_.take();
            expect_punct("(");
            s.kind = Stmt::Kind::Assume;
            s.cond = condition();
            expect_punct(")");
            expect_punct(";");
            return s;
        }
        if (t.text == "error") {
            lex_.take();
            expect_punct("(");
            expect_punct(")");
            expect_punct(";");
            s.kind = Stmt::Kind::Error;
            return s;
        }
        if (t.text == "return") {
            lex_.take();
            expect_punct(";");
            s.kind = Stmt::Kind::Return;
            return s;
        }
        if (is_keyword(t.text)) fail("unexpected keyword '" + t.text + "'", t);
        // assignment or call
        Token name = lex_.take();
        if (lex_.peek().text == "(") {
            lex_.take();
            expect_punct(")");
            expect_punct(";");
            s.kind = Stmt::Kind::Call;
            s.var = name.text;
            return s;
        }
        expect_punct("=");
        s.kind = Stmt::Kind::Assign;
        s.var = name.text;
        s.expr = expression();
        expect_punct(";");
        return s;
    }

    Expr expression() {
        Expr e;
        if (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "input") {
            Token t = lex_.take();
            expect_punct("(");
            expect_punct(")");
            e.input = true;
            (void)t;
            return e;
        }
        e.value = additive();
        return e;
    }

    Cond condition() {
        bool negated = false;
        while (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == "!") {
            lex_.take();
            negated = !negated;
            if (lex_.peek().text != "(")
                fail("expected '(' after '!'", lex_.peek());
        }
        bool paren = false;
        if (negated) {
            expect_punct("(");
            paren = true;
        }
        Cond c;
        c.lhs = additive();
        Token op = lex_.take();
        if (op.kind != Token::Kind::Punct) fail("expected a comparison operator", op);
        if (op.text == "&&" || op.text == "||")
            fail("'" + op.text + "' is not supported; conditions are single comparisons", op);
        if (op.text == "<=")
            c.op = CmpOp::Le;
        else if (op.text == "<")
            c.op = CmpOp::Lt;
        else if (op.text == ">=")
            c.op = CmpOp::Ge;
        else if (op.text == ">")
            c.op = CmpOp::Gt;
        else if (op.text == "==")
            c.op = CmpOp::Eq;
        else if (op.text == "!=")
            c.op = CmpOp::Ne;
        else
            fail("expected a comparison operator, found '" + op.text + "'", op);
        c.rhs = additive();
        if (paren) expect_punct(")");
        if (negated) {
            switch (c.op) {
                case CmpOp::Le: c.op = CmpOp::Gt; break;
                case CmpOp::Lt: c.op = CmpOp::Ge; break;
                case CmpOp::Ge: c.op = CmpOp::Lt; break;
                case CmpOp::Gt: c.op = CmpOp::Le; break;
                case CmpOp::Eq: c.op = CmpOp::Ne; break;
                case CmpOp::Ne: c.op = CmpOp::Eq; break;
            }
        }
        return c;
    }

    LinExpr additive() {
        LinExpr e = term();
        for (;;) {
            const Token& t = lex_.peek();
            if (t.kind != Token::Kind::Punct || (t.text != "+" && t.text != "-")) break;
            bool plus = t.text == "+";
            lex_.take();
            LinExpr r = term();
            if (plus)
                e += r;
            else
                e -= r;
        }
        return e;
    }

    LinExpr term() {
        LinExpr f = factor();
        for (;;) {
            const Token& t = lex_.peek();
            if (t.kind != Token::Kind::Punct || t.text != "*") break;
            Token star = lex_.take();
            LinExpr r = factor();
            if (f.is_constant())
                f = r.scaled(f.constant);
            else if (r.is_constant())
                f = f.scaled(r.constant);
            else
                fail("nonlinear multiplication", star);
        }
        return f;
    }

    LinExpr factor() {
        Token t = lex_.take();
        if (t.kind == Token::Kind::Number) return LinExpr(t.number);
        if (t.kind == Token::Kind::Ident) {
            if (t.text == "input") fail("input() is only allowed as a whole assignment right-hand side", t);
            if (is_keyword(t.text)) fail("unexpected keyword '" + t.text + "'", t);
            return LinExpr::var(t.text);
        }
        if (t.kind == Token::Kind::Punct && t.text == "-") return factor().scaled(-1);
        if (t.kind == Token::Kind::Punct && t.text == "(") {
            LinExpr e = additive();
            expect_punct(")");
            return e;
        }
        fail("expected an expression, found '" + t.text + "'", t);
    }

    void resolve(const Ast& ast) {
        // visibility: globals everywhere, locals only in their function
        for (size_t fi = 0; fi < ast.functions.size(); ++fi) {
            const Function& fn = ast.functions[fi];
            std::set<std::string> visible = globals_;
            const auto& locals = locals_per_function_[fn.name];
            visible.insert(locals.begin(), locals.end());
            check_stmts(fn.body, fn.name, visible);
        }
        // recursion: depth-first search over the call graph
        std::map<std::string, int> state;  // 0 fresh, 1 on stack, 2 done
        for (const Function& fn : ast.functions) visit(ast, fn, state);
    }

    void visit(const Ast& ast, const Function& fn, std::map<std::string, int>& state) {
        int& st = state[fn.name];
        if (st == 2) return;
        if (st == 1) throw ParseError("recursion detected at function '" + fn.name + "'", fn.line, fn.col);
        st = 1;
        visit_calls(ast, fn.body, state);
        st = 2;
    }

    void visit_calls(const Ast& ast, const std::vector<Stmt>& stmts, std::map<std::string, int>& state) {
        for (const Stmt& s : stmts) {
            if (s.kind == Stmt::Kind::Call) {
                const Function* callee = ast.find_function(s.var);
                if (!callee) throw ParseError("call to undefined function '" + s.var + "'", s.line, s.col);
                visit(ast, *callee, state);
            }
            visit_calls(ast, s.body, state);
            visit_calls(ast, s.els, state);
        }
    }

    void check_stmts(const std::vector<Stmt>& stmts, const std::string& fname,
                     const std::set<std::string>& visible) {
        auto check_expr = [&](const LinExpr& e, int line, int col) {
            for (const auto& [v, c] : e.coeffs)
                if (!visible.count(v))
                    throw ParseError("variable '" + v + "' is not visible in function '" + fname + "'", line,
                                     col);
        };
        for (const Stmt& s : stmts) {
            switch (s.kind) {
                case Stmt::Kind::Decl:
                    if (s.has_init && !s.expr.input) check_expr(s.expr.value, s.line, s.col);
                    break;
                case Stmt::Kind::Assign:
                    if (!visible.count(s.var))
                        throw ParseError("variable '" + s.var + "' is not visible in function '" + fname + "'",
                                         s.line, s.col);
                    if (!s.expr.input) check_expr(s.expr.value, s.line, s.col);
                    break;
                case Stmt::Kind::If:
                case Stmt::Kind::While:
                case Stmt::Kind::Assume:
                    check_expr(s.cond.lhs, s.line, s.col);
                    check_expr(s.cond.rhs, s.line, s.col);
                    break;
                default: break;
            }
            check_stmts(s.body, fname, visible);
            check_stmts(s.els, fname, visible);
        }
    }
};

void dump_stmts(const std::vector<Stmt>& stmts, int indent, std::string& out);

void dump_stmt(const Stmt& s, int indent, std::string& out) {
    out += std::string(static_cast<size_t>(indent) * 2, ' ');
    auto expr_text = [](const Expr& e) { return e.input ? std::string("input()") : to_sexpr(e.value); };
    switch (s.kind) {
        case Stmt::Kind::Decl:
            out += "decl " + s.var;
            if (s.has_init) out += " = " + expr_text(s.expr);
            out += "\n";
            break;
        case Stmt::Kind::Assign: out += "assign " + s.var + " = " + expr_text(s.expr) + "\n"; break;
        case Stmt::Kind::If:
            out += "if " + to_sexpr(s.cond.formula()) + "\n";
            dump_stmts(s.body, indent + 1, out);
            if (!s.els.empty()) {
                out += std::string(static_cast<size_t>(indent) * 2, ' ') + "else\n";
                dump_stmts(s.els, indent + 1, out);
            }
            break;
        case Stmt::Kind::While:
            out += "while " + to_sexpr(s.cond.formula()) + "\n";
            dump_stmts(s.body, indent + 1, out);
            break;
        case Stmt::Kind::Call: out += "call " + s.var + "\n"; break;
        case Stmt::Kind::Error: out += "error\n"; break;
        case Stmt::Kind::Assume: out += "assume " + to_sexpr(s.cond.formula()) + "\n"; break;
        case Stmt::Kind::Return: out += "return\n"; break;
        case Stmt::Kind::Block:
            out += "block\n";
            dump_stmts(s.body, indent + 1, out);
            break;
    }
}

void dump_stmts(const std::vector<Stmt>& stmts, int indent, std::string& out) {
    for (const Stmt& s : stmts) dump_stmt(s, indent, out);
}

}  // namespace

const Function* Ast::find_function(const std::string& name) const {
    for (const Function& f : functions)
        if (f.name == name) return &f;
    return nullptr;
}

Ast parse_program(const SourceProgram& src) { return Parser(src).parse(); }

std::string to_string(const Ast& ast) {
    std::string out = "program " + ast.program_name + "\n";
    for (const auto& g : ast.globals) out += "global " + g + "\n";
    for (const Function& f : ast.functions) {
        out += "function " + f.name + "\n";
        dump_stmts(f.body, 1, out);
    }
    return out;
}

}  // namespace miniver
