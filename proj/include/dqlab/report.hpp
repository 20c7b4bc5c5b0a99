#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dqlab {

/// Outcome of one invariant check along a trajectory. `worst` is the
/// check-specific figure of merit (a ratio or a violation size) at the
/// sample `worst_index`.
struct InvariantReport {
    std::string name;
    bool ok = true;
    double worst = 0.0;
    std::size_t worst_index = 0;
    double worst_t = 0.0;
    std::string detail;
};

/// Flat "prefix.key=value" lines, one per field.
std::string to_key_values(const InvariantReport& report, const std::string& prefix);

/// %.17g, with the literal strings nan / inf / -inf for non-finite values.
std::string format_number(double value);

bool all_ok(const std::vector<InvariantReport>& reports);

}  // namespace dqlab
