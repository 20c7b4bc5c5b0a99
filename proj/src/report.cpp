#include "dqlab/report.hpp"

#include <cmath>
#include <cstdio>

namespace dqlab {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string to_key_values(const InvariantReport& report, const std::string& prefix) {
    std::string out;
    out += prefix + ".ok=" + (report.ok ? "true" : "false") + "\n";
    out += prefix + ".worst=" + format_number(report.worst) + "\n";
    out += prefix + ".worst_t=" + format_number(report.worst_t) + "\n";
    if (!report.detail.empty()) out += prefix + ".detail=" + report.detail + "\n";
    return out;
}

bool all_ok(const std::vector<InvariantReport>& reports) {
    for (const auto& r : reports) {
        if (!r.ok) return false;
    }
    return true;
}

}  // namespace dqlab
