#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "miniver/harness/harness.hpp"
#include "miniver/lang/cfa.hpp"
#include "miniver/precision/precision_io.hpp"

namespace {

using namespace miniver;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

DomainKind domain_from(const std::string& s) {
    if (s == "explicit") return DomainKind::Explicit;
    if (s == "predicate") return DomainKind::Predicate;
    throw CLI::ValidationError("--domain must be explicit or predicate");
}

AbstractionMode abstraction_from(const std::string& s) {
    if (s == "cartesian") return AbstractionMode::Cartesian;
    if (s == "boolean") return AbstractionMode::Boolean;
    throw CLI::ValidationError("--abstraction must be cartesian or boolean");
}

ReuseScope scope_from(const std::string& s) {
    if (s == "location") return ReuseScope::Location;
    if (s == "function") return ReuseScope::Function;
    if (s == "global") return ReuseScope::Global;
    throw CLI::ValidationError("--reuse-scope must be location, function or global");
}

struct CommonFlags {
    std::string domain = "predicate";
    std::string abstraction = "boolean";
    std::string reuse_scope = "function";
    long long budget_nodes = 1000000;
    double budget_time = 60.0;
    long long budget_solver = 100000;

    void attach(CLI::App* app) {
        app->add_option("--domain", domain, "abstract domain: explicit|predicate")
            ->check(CLI::IsMember({"explicit", "predicate"}));
        app->add_option("--abstraction", abstraction, "predicate abstraction: cartesian|boolean")
            ->check(CLI::IsMember({"cartesian", "boolean"}));
        app->add_option("--reuse-scope", reuse_scope, "precision reuse scoping: location|function|global")
            ->check(CLI::IsMember({"location", "function", "global"}));
        app->add_option("--budget-nodes", budget_nodes, "maximum ARG nodes");
        app->add_option("--budget-time", budget_time, "CPU time budget per task in seconds");
        app->add_option("--budget-solver", budget_solver, "solver node budget per query");
    }

    VerifyOptions verify_options() const {
        VerifyOptions opts;
        opts.domain = domain_from(domain);
        opts.abstraction = abstraction_from(abstraction);
        opts.max_arg_nodes = budget_nodes;
        opts.time_limit_seconds = budget_time;
        opts.solver_node_budget = budget_solver;
        return opts;
    }
};

int run_verify(const std::string& file, const CommonFlags& flags, const std::string& precision_in,
               const std::string& precision_out) {
    VerifyOptions opts = flags.verify_options();
    SourceProgram src;
    src.text = read_file(file);
    src.name = std::filesystem::path(file).stem().string();
    src.revision_id = src.name;
    Cfa cfa = build_cfa(parse_program(src));

    ProgramPrecision initial;
    initial.domain = opts.domain;
    if (!precision_in.empty()) {
        ReadPrecisionResult read = read_precision_file(read_file(precision_in), opts.domain);
        RescopeResult scoped = rescope(read.precision, scope_from(flags.reuse_scope), cfa);
        for (const auto& w : scoped.warnings) std::cerr << "warning: " << w << "\n";
        initial = scoped.precision;
    }

    VerificationResult result = verify(cfa, initial, opts);
    std::string dumped = dump_final_precision(result);
    if (!precision_out.empty()) {
        std::ofstream out(precision_out);
        if (!out) throw std::runtime_error("cannot write " + precision_out);
        out << dumped;
    }

    std::cout << "verdict: " << to_string(result.verdict.kind) << "\n";
    if (result.verdict.kind == VerificationVerdict::Kind::ResourceOut)
        std::cout << "reason: " << result.verdict.reason << "\n";
    if (result.verdict.counterexample) {
        const Counterexample& cex = *result.verdict.counterexample;
        std::cout << "counterexample (" << cex.edges.size() << " edges):\n";
        for (int e : cex.edges) std::cout << "  " << cfa.edges[static_cast<size_t>(e)].describe() << "\n";
        if (!cex.inputs.empty()) {
            std::cout << "inputs:\n";
            for (const auto& [v, k] : cex.inputs) std::cout << "  " << v << " = " << k << "\n";
        }
    }
    const Stats& s = result.stats;
    std::cout << "refinements: " << s.refinements << "\n"
              << "abstractions: " << s.abstraction_computations << "\n"
              << "solver calls: " << s.solver_calls << "\n"
              << "arg nodes: " << s.arg_nodes << "\n"
              << "precision bytes: " << s.precision_bytes_out << "\n"
              << "cpu time: " << s.cpu_time_seconds << " s\n";

    switch (result.verdict.kind) {
        case VerificationVerdict::Kind::Safe: return 0;
        case VerificationVerdict::Kind::Unsafe: return 1;
        case VerificationVerdict::Kind::ResourceOut: return 2;
    }
    return 2;
}

int run_sequence_cmd(const std::string& path, const CommonFlags& flags, bool compare,
                     const std::string& report_format, const std::string& out_file,
                     const std::string& precision_dir) {
    RevisionSequence seq = load_sequence(path);
    seq.verify = flags.verify_options();
    seq.scope = scope_from(flags.reuse_scope);
    seq.run_reuse = true;
    seq.run_baseline = compare;
    seq.precision_dir = precision_dir;

    Report report = run_sequence(seq);
    ReportFormat format = report_format == "csv"    ? ReportFormat::Csv
                          : report_format == "json" ? ReportFormat::Json
                                                    : ReportFormat::Table;
    std::string text = emit_report(report, format);
    if (out_file.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_file);
        if (!out) throw std::runtime_error("cannot write " + out_file);
        out << text;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"miniver: a CEGAR model checker for MiniImp with reusable abstraction precisions"};
    app.require_subcommand(1);

    CommonFlags verify_flags;
    std::string verify_file, precision_in, precision_out;
    CLI::App* verify_cmd = app.add_subcommand("verify", "verify one program");
    verify_cmd->add_option("file", verify_file, "MiniImp source file (.mi)")->required();
    verify_flags.attach(verify_cmd);
    verify_cmd->add_option("--precision-in", precision_in, "initial precision file");
    verify_cmd->add_option("--precision-out", precision_out, "write the final precision here");

    CommonFlags seq_flags;
    std::string seq_path, report_format = "table", out_file, precision_dir;
    bool compare = false;
    CLI::App* seq_cmd = app.add_subcommand("sequence", "verify a chain of revisions");
    seq_cmd->add_option("path", seq_path, "directory of .mi revisions or a manifest file")->required();
    seq_flags.attach(seq_cmd);
    seq_cmd->add_flag("--compare", compare, "also run every revision without reuse and report the speedup");
    seq_cmd->add_option("--report", report_format, "report format: table|csv|json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    seq_cmd->add_option("--out", out_file, "write the report to a file instead of stdout");
    seq_cmd->add_option("--precision-dir", precision_dir, "directory for precision handoff files");

    try {
        app.parse(argc, argv);
        if (verify_cmd->parsed()) return run_verify(verify_file, verify_flags, precision_in, precision_out);
        return run_sequence_cmd(seq_path, seq_flags, compare, report_format, out_file, precision_dir);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
