#include "miniver/precision/precision_io.hpp"

#include <algorithm>
#include <cctype>

#include "miniver/formula/smtlib.hpp"

namespace miniver {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::string trimmed(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool is_location_number(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

struct Selector {
    enum class Kind { Global, Function, Location } kind;
    std::string name;
    LocId loc = 0;
};

std::vector<Selector> parse_selector_line(const std::string& line) {
    std::string s = trimmed(line);
    if (s.empty() || s.back() != ':')
        throw PrecisionFormatError("malformed selector line: '" + line + "'");
    s.pop_back();
    std::vector<Selector> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        size_t j = i;
        while (j < s.size() && s[j] != ' ') ++j;
        if (j > i) {
            std::string tok = s.substr(i, j - i);
            Selector sel;
            if (tok == "*") {
                sel.kind = Selector::Kind::Global;
            } else if (is_location_number(tok)) {
                sel.kind = Selector::Kind::Location;
                try {
                    sel.loc = static_cast<LocId>(std::stol(tok));
                } catch (const std::out_of_range&) {
                    throw PrecisionFormatError("location number out of range: '" + tok + "'");
                }
            } else {
                sel.kind = Selector::Kind::Function;
                sel.name = tok;
            }
            out.push_back(sel);
        }
        i = j;
    }
    if (out.empty()) throw PrecisionFormatError("selector line has no selectors: '" + line + "'");
    return out;
}

}  // namespace

ReadPrecisionResult read_precision_file(const std::string& text, DomainKind domain) {
    ReadPrecisionResult out;
    out.precision.domain = domain;
    std::vector<std::string> lines = split_lines(text);

    // Header: leading lines that start with '(' (SMT-LIB commands). Selector
    // lines never do, so this also accepts files without a leading blank.
    size_t i = 0;
    std::string header_text;
    while (i < lines.size() && !is_blank(lines[i]) && trimmed(lines[i])[0] == '(') {
        header_text += lines[i] + "\n";
        ++i;
    }
    SmtScript header;
    if (!header_text.empty()) {
        if (domain != DomainKind::Predicate)
            throw PrecisionFormatError("explicit-domain precision files have an empty header");
        header = parse_smt_subset(header_text);
        if (!header.asserts.empty())
            throw PrecisionFormatError("assert commands are not allowed in the header");
    }

    while (i < lines.size()) {
        if (is_blank(lines[i])) {
            ++i;
            continue;
        }
        std::vector<Selector> selectors = parse_selector_line(lines[i]);
        ++i;
        PrecisionSet set;
        std::string block_text;
        while (i < lines.size() && !is_blank(lines[i])) {
            if (domain == DomainKind::Explicit) {
                std::string var = trimmed(lines[i]);
                if (var.find(' ') != std::string::npos)
                    throw PrecisionFormatError("expected one variable per line: '" + lines[i] + "'");
                set.vars.insert(var);
            } else {
                block_text += lines[i] + "\n";
            }
            ++i;
        }
        if (domain == DomainKind::Predicate && !block_text.empty()) {
            // Reuse the header's symbol table for the block's asserts.
            SmtScript block = parse_smt_subset(header_text + block_text);
            for (const Formula& f : block.asserts) set.preds.insert(make_predicate(f));
        }
        for (const Selector& sel : selectors) {
            switch (sel.kind) {
                case Selector::Kind::Global: out.precision.global.unite(set); break;
                case Selector::Kind::Function: out.precision.per_function[sel.name].unite(set); break;
                case Selector::Kind::Location: out.precision.per_location[sel.loc].unite(set); break;
            }
        }
    }
    std::erase_if(out.precision.per_function, [](const auto& kv) { return kv.second.empty(); });
    std::erase_if(out.precision.per_location, [](const auto& kv) { return kv.second.empty(); });
    return out;
}

std::string write_precision_file(const ProgramPrecision& p) {
    const bool predicate = p.domain == DomainKind::Predicate;

    // Stable names for the distinct predicates, sorted by canonical text.
    std::map<Predicate, std::string> names;
    std::set<std::string> vars;
    if (predicate) {
        std::set<Predicate> all = p.global.preds;
        for (const auto& [f, set] : p.per_function) all.insert(set.preds.begin(), set.preds.end());
        for (const auto& [l, set] : p.per_location) all.insert(set.preds.begin(), set.preds.end());
        int n = 0;
        for (const Predicate& pred : all) {
            names[pred] = "t" + std::to_string(++n);
            for (const auto& v : pred.formula.variables()) vars.insert(v);
        }
    }

    std::string out;
    if (predicate && !names.empty()) {
        for (const auto& v : vars) out += "(declare-fun |" + v + "|() Int)\n";
        for (const auto& [pred, name] : names)
            out += "(define-fun " + name + "() Bool " + render_term(pred.formula) + ")\n";
        out += "\n";
    }

    bool first_block = true;
    auto emit_block = [&](const std::string& selector, const PrecisionSet& set) {
        if (set.empty()) return;
        // the first block follows the header's blank line directly
        if (!first_block) out += "\n";
        first_block = false;
        out += selector + ":\n";
        if (predicate) {
            for (const Predicate& pred : set.preds) out += "(assert " + names.at(pred) + ")\n";
        } else {
            for (const auto& v : set.vars) out += v + "\n";
        }
    };

    emit_block("*", p.global);
    for (const auto& [f, set] : p.per_function) emit_block(f, set);
    for (const auto& [l, set] : p.per_location) emit_block(std::to_string(l), set);
    return out;
}

}  // namespace miniver
