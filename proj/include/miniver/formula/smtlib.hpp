#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "miniver/formula/formula.hpp"

namespace miniver {

class SmtParseError : public std::runtime_error {
  public:
    explicit SmtParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Accepted subset: 0-ary declare-fun, 0-ary define-fun, assert. Sorts Int,
/// Real and Bool are accepted; Int and Real both map to the internal integer
/// sort. Identifiers may be pipe-quoted.
struct SmtScript {
    std::map<std::string, std::string> declarations;  // name -> declared sort text
    std::map<std::string, Formula> definitions;       // define-fun bodies, expanded
    std::vector<Formula> asserts;                     // definitions expanded on use
};

SmtScript parse_smt_subset(const std::string& text);

/// Deterministic rendering: declarations sorted by symbol, definitions sorted
/// by canonical body text, asserts in canonical text order.
std::string render_smt_subset(const std::map<std::string, std::string>& declarations,
                              const std::map<std::string, Formula>& definitions,
                              const std::vector<Formula>& formulas);

/// Renders one formula as a define-fun body (used by precision files).
std::string render_term(const Formula& f);

}  // namespace miniver
