#pragma once

#include <optional>
#include <string>
#include <vector>

#include "miniver/engine/cegar.hpp"
#include "miniver/lang/ast.hpp"
#include "miniver/precision/precision.hpp"

namespace miniver {

/// An ordered chain of program revisions verified one after another,
/// optionally handing the dumped precision of each run to the next.
struct RevisionSequence {
    std::string name;
    std::vector<SourceProgram> revisions;
    VerifyOptions verify;
    ReuseScope scope = ReuseScope::Function;
    bool run_reuse = true;
    bool run_baseline = false;  // both = compare mode
    std::string precision_dir;  // where handoff files are written
};

struct TaskResult {
    std::string revision_id;
    VerificationVerdict::Kind verdict = VerificationVerdict::Kind::ResourceOut;
    std::string reason;
    Stats stats;
    std::optional<int> diff_lines;  // vs the previous revision; absent for the first
    long long reused_precision_bytes_in = 0;

    bool operator==(const TaskResult& o) const;
};

struct Report {
    std::string name;
    std::string domain;
    std::string abstraction;
    std::string scope;
    std::vector<TaskResult> baseline;
    std::vector<TaskResult> reuse;
    std::optional<double> speedup;

    bool operator==(const Report& o) const = default;
};

/// Summed baseline time over summed reuse time, excluding each mode's first
/// revision and any revision unsolved in either mode; absent when both modes
/// were not run or nothing remains.
std::optional<double> compute_speedup(const std::vector<TaskResult>& baseline,
                                      const std::vector<TaskResult>& reuse);

/// Verifies the chain per the sequence flags. In reuse mode the final
/// precision of each run is written to a file and the next revision starts
/// from it (rescoped against its own CFA); baseline runs always start empty.
Report run_sequence(const RevisionSequence& seq);

/// Added plus removed lines under an LCS diff, with whitespace stripped from
/// every line first (whitespace-only changes count as unchanged).
int diff_lines(const std::string& a, const std::string& b);

enum class ReportFormat { Table, Csv, Json };

std::string emit_report(const Report& r, ReportFormat format);
Report parse_report_json(const std::string& text);

/// Loads a sequence from a directory of .mi files (sorted by name) or a
/// manifest file listing one program path per line.
RevisionSequence load_sequence(const std::string& path);

}  // namespace miniver
