#pragma once

#include <string>
#include <vector>

#include "miniver/precision/precision.hpp"

namespace miniver {

class PrecisionFormatError : public std::runtime_error {
  public:
    explicit PrecisionFormatError(const std::string& what) : std::runtime_error(what) {}
};

struct ReadPrecisionResult {
    ProgramPrecision precision;
    std::vector<std::string> warnings;
};

/// Reads the text format: a domain-specific header, a blank line, then
/// blocks of one selector line ("sel ... sel:") followed by precision lines,
/// blocks separated by blank lines. The explicit header is empty and the
/// leading blank line is optional. Selectors: '*' is global, a decimal
/// number is a location, anything else is a function name.
ReadPrecisionResult read_precision_file(const std::string& text, DomainKind domain);

/// Deterministic writer: global block first, then function blocks sorted by
/// name, then location blocks sorted numerically; entries sorted; empty
/// blocks omitted. Predicate files carry an SMT-LIB header declaring every
/// variable and defining one named term per distinct predicate.
std::string write_precision_file(const ProgramPrecision& p);

}  // namespace miniver
