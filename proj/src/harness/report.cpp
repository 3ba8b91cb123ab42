#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "miniver/harness/harness.hpp"

namespace miniver {

namespace {

using nlohmann::json;

std::string verdict_text(VerificationVerdict::Kind k) { return to_string(k); }

VerificationVerdict::Kind verdict_from(const std::string& s) {
    if (s == "safe") return VerificationVerdict::Kind::Safe;
    if (s == "unsafe") return VerificationVerdict::Kind::Unsafe;
    return VerificationVerdict::Kind::ResourceOut;
}

/// Two significant digits for human-readable tables (9.87 -> "9.9").
std::string sig2(double v) {
    if (v == 0) return "0";
    double mag = std::floor(std::log10(std::fabs(v)));
    int decimals = std::max(0, 1 - static_cast<int>(mag));
    double scale = std::pow(10, 1 - mag);
    double rounded = std::round(v * scale) / scale;
    std::ostringstream os;
    os << std::fixed << std::setprecision(decimals) << rounded;
    return os.str();
}

std::string csv_time(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

void csv_rows(std::string& out, const std::string& mode, const std::vector<TaskResult>& tasks) {
    for (size_t i = 0; i < tasks.size(); ++i) {
        const TaskResult& t = tasks[i];
        out += mode + "," + std::to_string(i + 1) + "," + t.revision_id + "," + verdict_text(t.verdict) + "," +
               std::to_string(t.stats.refinements) + "," + std::to_string(t.stats.abstraction_computations) +
               "," + std::to_string(t.stats.solver_calls) + "," + csv_time(t.stats.cpu_time_seconds) + "," +
               (t.diff_lines ? std::to_string(*t.diff_lines) : "") + "," +
               std::to_string(t.stats.precision_bytes_out) + "," + std::to_string(t.reused_precision_bytes_in) +
               "\n";
    }
    if (tasks.empty()) return;
    long long refs = 0, abss = 0;
    double time = 0;
    for (const TaskResult& t : tasks) {
        refs += t.stats.refinements;
        abss += t.stats.abstraction_computations;
        time += t.stats.cpu_time_seconds;
    }
    out += mode + ",total,,," + std::to_string(refs) + "," + std::to_string(abss) + ",," + csv_time(time) +
           ",,,\n";
}

json task_json(const TaskResult& t) {
    json j;
    j["revision"] = t.revision_id;
    j["verdict"] = verdict_text(t.verdict);
    j["reason"] = t.reason;
    j["refinements"] = t.stats.refinements;
    j["abstractions"] = t.stats.abstraction_computations;
    j["solver_calls"] = t.stats.solver_calls;
    j["cpu_time_s"] = t.stats.cpu_time_seconds;
    j["arg_nodes"] = t.stats.arg_nodes;
    j["precision_bytes_out"] = t.stats.precision_bytes_out;
    j["reused_precision_bytes_in"] = t.reused_precision_bytes_in;
    if (t.diff_lines)
        j["diff_lines"] = *t.diff_lines;
    else
        j["diff_lines"] = nullptr;
    return j;
}

TaskResult task_from_json(const json& j) {
    TaskResult t;
    t.revision_id = j.at("revision").get<std::string>();
    t.verdict = verdict_from(j.at("verdict").get<std::string>());
    t.reason = j.at("reason").get<std::string>();
    t.stats.refinements = j.at("refinements").get<long long>();
    t.stats.abstraction_computations = j.at("abstractions").get<long long>();
    t.stats.solver_calls = j.at("solver_calls").get<long long>();
    t.stats.cpu_time_seconds = j.at("cpu_time_s").get<double>();
    t.stats.arg_nodes = j.at("arg_nodes").get<long long>();
    t.stats.precision_bytes_out = j.at("precision_bytes_out").get<long long>();
    t.reused_precision_bytes_in = j.at("reused_precision_bytes_in").get<long long>();
    if (!j.at("diff_lines").is_null()) t.diff_lines = j.at("diff_lines").get<int>();
    return t;
}

void table_section(std::string& out, const std::string& title, const std::vector<TaskResult>& tasks) {
    if (tasks.empty()) return;
    out += title + "\n";
    out += "  #  revision              verdict       refine   abstr   diff   prec-out   prec-in   time\n";
    long long refs = 0, abss = 0;
    double time = 0;
    for (size_t i = 0; i < tasks.size(); ++i) {
        const TaskResult& t = tasks[i];
        char line[256];
        std::snprintf(line, sizeof line, "%3zu  %-20s  %-12s %7lld %7lld %6s %10lld %9lld   %s\n", i + 1,
                      t.revision_id.c_str(), verdict_text(t.verdict).c_str(), t.stats.refinements,
                      t.stats.abstraction_computations,
                      t.diff_lines ? std::to_string(*t.diff_lines).c_str() : "-",
                      t.stats.precision_bytes_out, t.reused_precision_bytes_in,
                      sig2(t.stats.cpu_time_seconds).c_str());
        out += line;
        refs += t.stats.refinements;
        abss += t.stats.abstraction_computations;
        time += t.stats.cpu_time_seconds;
    }
    char line[256];
    std::snprintf(line, sizeof line, "     %-20s  %-12s %7lld %7lld %6s %10s %9s   %s\n", "total", "", refs,
                  abss, "", "", "", sig2(time).c_str());
    out += line;
    out += "\n";
}

}  // namespace

std::string emit_report(const Report& r, ReportFormat format) {
    switch (format) {
        case ReportFormat::Csv: {
            std::string out =
                "mode,index,revision,verdict,refinements,abstractions,solver_calls,cpu_time_s,diff_lines,"
                "precision_bytes_out,reused_precision_bytes_in\n";
            csv_rows(out, "baseline", r.baseline);
            csv_rows(out, "reuse", r.reuse);
            out += "speedup,";
            if (r.speedup) out += csv_time(*r.speedup);
            out += "\n";
            return out;
        }
        case ReportFormat::Json: {
            json j;
            j["name"] = r.name;
            j["domain"] = r.domain;
            j["abstraction"] = r.abstraction;
            j["scope"] = r.scope;
            j["baseline"] = json::array();
            for (const TaskResult& t : r.baseline) j["baseline"].push_back(task_json(t));
            j["reuse"] = json::array();
            for (const TaskResult& t : r.reuse) j["reuse"].push_back(task_json(t));
            if (r.speedup)
                j["speedup"] = *r.speedup;
            else
                j["speedup"] = nullptr;
            return j.dump(2) + "\n";
        }
        case ReportFormat::Table: {
            std::string out = "sequence " + r.name + "  [domain=" + r.domain + " abstraction=" + r.abstraction +
                              " scope=" + r.scope + "]\n\n";
            table_section(out, "without reuse:", r.baseline);
            table_section(out, "with reuse:", r.reuse);
            out += "speedup: " + (r.speedup ? sig2(*r.speedup) : std::string("-")) + "\n";
            return out;
        }
    }
    return "";
}

Report parse_report_json(const std::string& text) {
    json j = json::parse(text);
    Report r;
    r.name = j.at("name").get<std::string>();
    r.domain = j.at("domain").get<std::string>();
    r.abstraction = j.at("abstraction").get<std::string>();
    r.scope = j.at("scope").get<std::string>();
    for (const json& t : j.at("baseline")) r.baseline.push_back(task_from_json(t));
    for (const json& t : j.at("reuse")) r.reuse.push_back(task_from_json(t));
    if (!j.at("speedup").is_null()) r.speedup = j.at("speedup").get<double>();
    return r;
}

}  // namespace miniver
