#include "miniver/formula/smtlib.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace miniver {

namespace {

struct SExpr {
    // Leaf iff children empty and atom set; pipe quoting is stripped.
    std::string atom;
    bool leaf = false;
    std::vector<SExpr> children;
};

struct Tokenizer {
    const std::string& text;
    size_t pos = 0;

    explicit Tokenizer(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == ';') {  // comment to end of line
                while (pos < text.size() && text[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else {
                break;
            }
        }
    }

    std::optional<std::string> next() {
        skip_ws();
        if (pos >= text.size()) return std::nullopt;
        char c = text[pos];
        if (c == '(' || c == ')') {
            ++pos;
            return std::string(1, c);
        }
        if (c == '|') {
            size_t end = text.find('|', pos + 1);
            if (end == std::string::npos) throw SmtParseError("unterminated quoted symbol");
            std::string s = text.substr(pos + 1, end - pos - 1);
            pos = end + 1;
            return "|" + s;  // marker to distinguish from bare symbols
        }
        size_t start = pos;
        while (pos < text.size()) {
            char d = text[pos];
            if (d == '(' || d == ')' || d == '|' || std::isspace(static_cast<unsigned char>(d))) break;
            ++pos;
        }
        return text.substr(start, pos - start);
    }
};

class SExprReader {
  public:
    explicit SExprReader(const std::string& text) : tok_(text) {}

    std::optional<SExpr> read() {
        auto t = tok_.next();
        if (!t) return std::nullopt;
        return read_from(*t);
    }

  private:
    Tokenizer tok_;

    SExpr read_from(const std::string& t) {
        if (t == ")") throw SmtParseError("unexpected ')'");
        if (t != "(") {
            SExpr e;
            e.leaf = true;
            e.atom = t[0] == '|' ? t.substr(1) : t;
            return e;
        }
        SExpr e;
        for (;;) {
            auto n = tok_.next();
            if (!n) throw SmtParseError("unexpected end of input in s-expression");
            if (*n == ")") return e;
            e.children.push_back(read_from(*n));
        }
    }
};

bool is_numeral(const std::string& s) {
    if (s.empty()) return false;
    size_t i = s[0] == '-' ? 1 : 0;
    if (i == s.size()) return false;
    return std::all_of(s.begin() + i, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

/// A parsed term is either arithmetic (LinExpr) or boolean (Formula).
struct Term {
    bool boolean = false;
    Formula f;
    LinExpr e;
};

class TermParser {
  public:
    TermParser(const std::map<std::string, std::string>& decls, const std::map<std::string, Formula>& defs)
        : decls_(decls), defs_(defs) {}

    Formula boolean(const SExpr& s) {
        Term t = parse(s);
        if (!t.boolean) throw SmtParseError("expected a Bool term");
        return t.f;
    }

  private:
    const std::map<std::string, std::string>& decls_;
    const std::map<std::string, Formula>& defs_;

    Term parse(const SExpr& s) {
        if (s.leaf) return leaf(s.atom);
        if (s.children.empty()) throw SmtParseError("empty term");
        const SExpr& head = s.children[0];
        if (!head.leaf) throw SmtParseError("term head must be a symbol");
        const std::string& op = head.atom;
        std::vector<Term> args;
        for (size_t i = 1; i < s.children.size(); ++i) args.push_back(parse(s.children[i]));

        if (op == "and" || op == "or") {
            std::vector<Formula> parts;
            for (auto& a : args) {
                if (!a.boolean) throw SmtParseError("'" + op + "' expects Bool arguments");
                parts.push_back(std::move(a.f));
            }
            Term t;
            t.boolean = true;
            t.f = op == "and" ? Formula::conjunction(std::move(parts)) : Formula::disjunction(std::move(parts));
            return t;
        }
        if (op == "not") {
            if (args.size() != 1 || !args[0].boolean) throw SmtParseError("'not' expects one Bool argument");
            Term t;
            t.boolean = true;
            t.f = Formula::negation(std::move(args[0].f));
            return t;
        }
        if (op == "=" || op == "<=" || op == "<" || op == ">=" || op == ">") {
            if (args.size() != 2 || args[0].boolean || args[1].boolean)
                throw SmtParseError("'" + op + "' expects two arithmetic arguments");
            CmpOp c = op == "=" ? CmpOp::Eq : op == "<=" ? CmpOp::Le : op == "<" ? CmpOp::Lt
                      : op == ">=" ? CmpOp::Ge : CmpOp::Gt;
            Term t;
            t.boolean = true;
            t.f = Formula::compare(args[0].e, c, args[1].e);
            return t;
        }
        if (op == "+" || op == "-" || op == "*") {
            for (const auto& a : args)
                if (a.boolean) throw SmtParseError("'" + op + "' expects arithmetic arguments");
            if (args.empty()) throw SmtParseError("'" + op + "' expects arguments");
            Term t;
            if (op == "+") {
                for (const auto& a : args) t.e += a.e;
                return t;
            }
            if (op == "-") {
                if (args.size() == 1) {
                    t.e = args[0].e.scaled(-1);
                    return t;
                }
                t.e = args[0].e;
                for (size_t i = 1; i < args.size(); ++i) t.e -= args[i].e;
                return t;
            }
            // '*': at most one non-constant factor keeps terms linear
            t.e = LinExpr(1);
            for (const auto& a : args) {
                if (a.e.is_constant()) {
                    t.e = t.e.scaled(a.e.constant);
                } else if (t.e.is_constant()) {
                    t.e = a.e.scaled(t.e.constant);
                } else {
                    throw SmtParseError("nonlinear multiplication");
                }
            }
            return t;
        }
        throw SmtParseError("unknown operator '" + op + "'");
    }

    Term leaf(const std::string& a) {
        Term t;
        if (is_numeral(a)) {
            t.e = LinExpr(std::stoll(a));
            return t;
        }
        if (a == "true" || a == "false") {
            t.boolean = true;
            t.f = Formula::truth(a == "true");
            return t;
        }
        if (auto it = defs_.find(a); it != defs_.end()) {
            t.boolean = true;
            t.f = it->second;
            return t;
        }
        if (decls_.count(a)) {
            t.e = LinExpr::var(a);
            return t;
        }
        throw SmtParseError("undeclared symbol '" + a + "'");
    }
};

void check_sort(const std::string& sort, const std::string& where) {
    if (sort != "Int" && sort != "Real" && sort != "Bool")
        throw SmtParseError(where + ": unsupported sort '" + sort + "'");
}

}  // namespace

SmtScript parse_smt_subset(const std::string& text) {
    SmtScript script;
    SExprReader reader(text);
    while (auto cmd = reader.read()) {
        if (cmd->leaf || cmd->children.empty() || !cmd->children[0].leaf)
            throw SmtParseError("expected a command s-expression");
        const std::string& head = cmd->children[0].atom;
        const auto& c = cmd->children;
        if (head == "declare-fun") {
            if (c.size() != 4 || !c[1].leaf || c[2].leaf || !c[2].children.empty() || !c[3].leaf)
                throw SmtParseError("declare-fun: expected (declare-fun name () sort)");
            check_sort(c[3].atom, "declare-fun");
            if (c[3].atom == "Bool") throw SmtParseError("declare-fun: Bool constants are not supported");
            script.declarations[c[1].atom] = c[3].atom;
        } else if (head == "define-fun") {
            if (c.size() != 5 || !c[1].leaf || c[2].leaf || !c[2].children.empty() || !c[3].leaf)
                throw SmtParseError("define-fun: expected (define-fun name () sort term)");
            check_sort(c[3].atom, "define-fun");
            if (c[3].atom != "Bool") throw SmtParseError("define-fun: only Bool definitions are supported");
            TermParser tp(script.declarations, script.definitions);
            script.definitions[c[1].atom] = tp.boolean(c[4]);
        } else if (head == "assert") {
            if (c.size() != 2) throw SmtParseError("assert: expected one term");
            TermParser tp(script.declarations, script.definitions);
            script.asserts.push_back(tp.boolean(c[1]));
        } else {
            throw SmtParseError("unknown command '" + head + "'");
        }
    }
    return script;
}

std::string render_term(const Formula& f) { return to_sexpr(f); }

std::string render_smt_subset(const std::map<std::string, std::string>& declarations,
                              const std::map<std::string, Formula>& definitions,
                              const std::vector<Formula>& formulas) {
    std::string out;
    for (const auto& [name, sort] : declarations)
        out += "(declare-fun |" + name + "|() " + sort + ")\n";
    std::vector<std::pair<std::string, std::string>> defs;  // (body text, name)
    for (const auto& [name, body] : definitions) defs.emplace_back(render_term(body), name);
    std::sort(defs.begin(), defs.end());
    for (const auto& [body, name] : defs) out += "(define-fun " + name + "() Bool " + body + ")\n";
    std::vector<std::string> lines;
    for (const auto& f : formulas) lines.push_back("(assert " + render_term(f) + ")\n");
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) out += l;
    return out;
}

}  // namespace miniver
