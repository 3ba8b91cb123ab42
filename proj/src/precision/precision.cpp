#include "miniver/precision/precision.hpp"

#include <algorithm>
#include <stdexcept>

namespace miniver {

std::string to_string(DomainKind k) { return k == DomainKind::Explicit ? "explicit" : "predicate"; }

std::string to_string(ReuseScope s) {
    switch (s) {
        case ReuseScope::Location: return "location";
        case ReuseScope::Function: return "function";
        case ReuseScope::Global: return "global";
    }
    return "";
}

bool PrecisionSet::contains(const PrecisionSet& o) const {
    return std::includes(vars.begin(), vars.end(), o.vars.begin(), o.vars.end()) &&
           std::includes(preds.begin(), preds.end(), o.preds.begin(), o.preds.end());
}

bool ProgramPrecision::empty() const {
    if (!global.empty()) return false;
    for (const auto& [f, p] : per_function)
        if (!p.empty()) return false;
    for (const auto& [l, p] : per_location)
        if (!p.empty()) return false;
    return true;
}

PrecisionSet ProgramPrecision::effective_at(LocId l, const Cfa& cfa) const {
    return effective_at(l, cfa.has_location(l) ? cfa.function_of(l) : std::string());
}

PrecisionSet ProgramPrecision::effective_at(LocId l, const std::string& function) const {
    PrecisionSet out = global;
    if (auto it = per_function.find(function); it != per_function.end()) out.unite(it->second);
    if (auto it = per_location.find(l); it != per_location.end()) out.unite(it->second);
    return out;
}

void ProgramPrecision::unite(const ProgramPrecision& o) {
    if (domain != o.domain)
        throw std::invalid_argument("cannot union precisions of different domains");
    global.unite(o.global);
    for (const auto& [f, p] : o.per_function) per_function[f].unite(p);
    for (const auto& [l, p] : o.per_location) per_location[l].unite(p);
}

ProgramPrecision union_of(const ProgramPrecision& a, const ProgramPrecision& b) {
    ProgramPrecision r = a;
    r.unite(b);
    return r;
}

RescopeResult rescope(const ProgramPrecision& p, ReuseScope strategy, const Cfa& cfa) {
    RescopeResult out;
    out.precision.domain = p.domain;
    for (const auto& [f, set] : p.per_function) {
        if (!set.empty() && !cfa.functions.count(f))
            out.warnings.push_back("precision mentions unknown function '" + f + "'");
    }
    switch (strategy) {
        case ReuseScope::Location:
            out.precision.global = p.global;
            out.precision.per_location = p.per_location;
            break;
        case ReuseScope::Function: {
            out.precision.global = p.global;
            out.precision.per_function = p.per_function;
            for (const auto& [l, set] : p.per_location) {
                if (set.empty()) continue;
                if (!cfa.has_location(l)) {
                    out.warnings.push_back("precision mentions stale location " + std::to_string(l));
                    continue;
                }
                out.precision.per_function[cfa.function_of(l)].unite(set);
            }
            break;
        }
        case ReuseScope::Global: {
            out.precision.global = p.global;
            for (const auto& [f, set] : p.per_function) out.precision.global.unite(set);
            for (const auto& [l, set] : p.per_location) out.precision.global.unite(set);
            break;
        }
    }
    // drop layers that became empty
    std::erase_if(out.precision.per_function, [](const auto& kv) { return kv.second.empty(); });
    std::erase_if(out.precision.per_location, [](const auto& kv) { return kv.second.empty(); });
    return out;
}

}  // namespace miniver
