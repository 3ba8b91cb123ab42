#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "miniver/formula/formula.hpp"

namespace miniver {

/// Raised when the configured node budget (or the coefficient range) is
/// exhausted. Callers must treat this as "unknown", never as Unsat.
class SolverLimitError : public std::runtime_error {
  public:
    explicit SolverLimitError(const std::string& what) : std::runtime_error(what) {}
};

struct SatResult {
    enum class Kind { Sat, Unsat };
    Kind kind = Kind::Unsat;
    std::map<std::string, Int> model;  // populated iff Sat

    bool is_sat() const { return kind == Kind::Sat; }
};

struct SolverOptions {
    long long node_budget = 100000;  // per check() call
};

/// Complete decision procedure for quantifier-free linear integer arithmetic:
/// DPLL on the boolean skeleton, theory checks by equality substitution plus
/// Fourier-Motzkin over the rationals, branch-and-bound on fractional
/// witnesses. Disequalities are split integer-tight at the DPLL layer.
class Solver {
  public:
    explicit Solver(SolverOptions opts = {}) : opts_(opts) {}

    SatResult check(const Formula& f);
    bool entails(const Formula& a, const Formula& b);

    long long sat_calls() const { return sat_calls_; }

  private:
    SolverOptions opts_;
    long long sat_calls_ = 0;
};

inline SatResult check_sat(const Formula& f, SolverOptions opts = {}) {
    Solver s(opts);
    return s.check(f);
}

inline bool entails(const Formula& a, const Formula& b, SolverOptions opts = {}) {
    Solver s(opts);
    return s.entails(a, b);
}

}  // namespace miniver
