#include "miniver/harness/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "miniver/lang/cfa.hpp"
#include "miniver/precision/precision_io.hpp"

namespace fs = std::filesystem;

namespace miniver {

bool TaskResult::operator==(const TaskResult& o) const {
    return revision_id == o.revision_id && verdict == o.verdict && reason == o.reason &&
           stats.refinements == o.stats.refinements &&
           stats.abstraction_computations == o.stats.abstraction_computations &&
           stats.solver_calls == o.stats.solver_calls &&
           stats.cpu_time_seconds == o.stats.cpu_time_seconds && stats.arg_nodes == o.stats.arg_nodes &&
           stats.precision_bytes_out == o.stats.precision_bytes_out && diff_lines == o.diff_lines &&
           reused_precision_bytes_in == o.reused_precision_bytes_in;
}

int diff_lines(const std::string& a, const std::string& b) {
    auto normalized_lines = [](const std::string& text) {
        std::vector<std::string> lines;
        std::string cur;
        auto flush = [&]() {
            lines.push_back(cur);
            cur.clear();
        };
        for (char c : text) {
            if (c == '\n')
                flush();
            else if (!std::isspace(static_cast<unsigned char>(c)))
                cur += c;
        }
        if (!cur.empty()) flush();
        return lines;
    };
    std::vector<std::string> x = normalized_lines(a);
    std::vector<std::string> y = normalized_lines(b);
    size_t n = x.size(), m = y.size();
    std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
    for (size_t i = 1; i <= n; ++i)
        for (size_t j = 1; j <= m; ++j)
            lcs[i][j] = x[i - 1] == y[j - 1] ? lcs[i - 1][j - 1] + 1 : std::max(lcs[i - 1][j], lcs[i][j - 1]);
    int common = lcs[n][m];
    return static_cast<int>(n) - common + static_cast<int>(m) - common;
}

std::optional<double> compute_speedup(const std::vector<TaskResult>& baseline,
                                      const std::vector<TaskResult>& reuse) {
    if (baseline.empty() || reuse.empty() || baseline.size() != reuse.size()) return std::nullopt;
    double base_total = 0, reuse_total = 0;
    bool any = false;
    for (size_t i = 1; i < baseline.size(); ++i) {  // the first revision never counts
        bool solved_base = baseline[i].verdict != VerificationVerdict::Kind::ResourceOut;
        bool solved_reuse = reuse[i].verdict != VerificationVerdict::Kind::ResourceOut;
        if (!solved_base || !solved_reuse) continue;  // unsolved in either mode
        base_total += baseline[i].stats.cpu_time_seconds;
        reuse_total += reuse[i].stats.cpu_time_seconds;
        any = true;
    }
    if (!any || reuse_total <= 0) return std::nullopt;
    return base_total / reuse_total;
}

namespace {

TaskResult run_one(const SourceProgram& src, const VerifyOptions& opts, const ProgramPrecision& initial,
                   long long reused_bytes) {
    TaskResult task;
    task.revision_id = src.revision_id;
    task.reused_precision_bytes_in = reused_bytes;
    VerificationResult result = verify(build_cfa(parse_program(src)), initial, opts);
    task.verdict = result.verdict.kind;
    task.reason = result.verdict.reason;
    task.stats = result.stats;
    return task;
}

std::string precision_file_name(const RevisionSequence& seq, const SourceProgram& rev) {
    return seq.name + "." + rev.revision_id + "." + to_string(seq.verify.domain) + ".prec";
}

}  // namespace

Report run_sequence(const RevisionSequence& seq) {
    if (seq.revisions.empty()) throw std::invalid_argument("sequence has no revisions");
    Report report;
    report.name = seq.name;
    report.domain = to_string(seq.verify.domain);
    report.abstraction = to_string(seq.verify.abstraction);
    report.scope = to_string(seq.scope);

    fs::path dir = seq.precision_dir.empty() ? fs::temp_directory_path() : fs::path(seq.precision_dir);
    fs::create_directories(dir);

    ProgramPrecision empty;
    empty.domain = seq.verify.domain;

    if (seq.run_baseline) {
        for (size_t i = 0; i < seq.revisions.size(); ++i) {
            const SourceProgram& rev = seq.revisions[i];
            TaskResult task;
            try {
                task = run_one(rev, seq.verify, empty, 0);
            } catch (const std::exception& e) {
                task.revision_id = rev.revision_id;
                task.verdict = VerificationVerdict::Kind::ResourceOut;
                task.reason = e.what();
            }
            if (i > 0) task.diff_lines = diff_lines(seq.revisions[i - 1].text, rev.text);
            report.baseline.push_back(std::move(task));
        }
    }

    if (seq.run_reuse) {
        std::optional<fs::path> last_precision;
        for (size_t i = 0; i < seq.revisions.size(); ++i) {
            const SourceProgram& rev = seq.revisions[i];
            TaskResult task;
            try {
                Ast ast = parse_program(rev);
                Cfa cfa = build_cfa(ast);
                ProgramPrecision initial = empty;
                long long reused_bytes = 0;
                if (i > 0 && last_precision) {
                    std::ifstream in(*last_precision);
                    std::stringstream buf;
                    buf << in.rdbuf();
                    std::string text = buf.str();
                    reused_bytes = static_cast<long long>(text.size());
                    ReadPrecisionResult read = read_precision_file(text, seq.verify.domain);
                    initial = rescope(read.precision, seq.scope, cfa).precision;
                }
                task.revision_id = rev.revision_id;
                task.reused_precision_bytes_in = reused_bytes;
                VerificationResult result = verify(cfa, initial, seq.verify);
                task.verdict = result.verdict.kind;
                task.reason = result.verdict.reason;
                std::string dumped = dump_final_precision(result);
                task.stats = result.stats;
                fs::path file = dir / precision_file_name(seq, rev);
                std::ofstream out(file);
                out << dumped;
                out.close();
                last_precision = file;
            } catch (const std::exception& e) {
                task.revision_id = rev.revision_id;
                task.verdict = VerificationVerdict::Kind::ResourceOut;
                task.reason = e.what();
            }
            if (i > 0) task.diff_lines = diff_lines(seq.revisions[i - 1].text, rev.text);
            report.reuse.push_back(std::move(task));
        }
    }

    if (seq.run_baseline && seq.run_reuse) report.speedup = compute_speedup(report.baseline, report.reuse);
    return report;
}

RevisionSequence load_sequence(const std::string& path) {
    RevisionSequence seq;
    fs::path p(path);
    std::vector<fs::path> files;
    if (fs::is_directory(p)) {
        seq.name = p.filename().string();
        for (const auto& entry : fs::directory_iterator(p))
            if (entry.is_regular_file() && entry.path().extension() == ".mi") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
    } else {
        if (!fs::exists(p)) throw std::runtime_error("no such file or directory: " + path);
        seq.name = p.stem().string();
        std::ifstream in(p);
        std::string line;
        while (std::getline(in, line)) {
            // manifest: one program path per line, '#' comments
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
            size_t b = 0;
            while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
            line.erase(0, b);
            if (line.empty()) continue;
            fs::path f(line);
            if (f.is_relative()) f = p.parent_path() / f;
            files.push_back(f);
        }
    }
    if (files.empty()) throw std::runtime_error("no revisions found at " + path);
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw std::runtime_error("cannot read " + f.string());
        std::stringstream buf;
        buf << in.rdbuf();
        SourceProgram prog;
        prog.text = buf.str();
        prog.name = seq.name;
        prog.revision_id = f.stem().string();
        seq.revisions.push_back(std::move(prog));
    }
    return seq;
}

}  // namespace miniver
