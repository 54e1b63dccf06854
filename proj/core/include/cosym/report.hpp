#pragma once

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace cosym {

struct CheckResult {
    std::string name;
    /// Identifier of the property the check establishes.
    std::string anchor;
    int points = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::vector<double> worst_point;
    std::string detail;
    /// Three-way verdict for the local-symmetry check, empty elsewhere.
    std::string verdict;

    friend bool operator==(const CheckResult&, const CheckResult&) = default;
};

struct Report {
    nlohmann::json config;
    nlohmann::json calibration;
    std::vector<CheckResult> results;
    bool overall_pass = true;
    /// Seconds per check. Kept out of the emitted file so reports stay byte-identical.
    std::map<std::string, double> timings;
};

/// Same content, ignoring timings.
bool operator==(const Report& a, const Report& b);

/// Sorted keys, no whitespace, doubles as %.17g (always with a '.' or exponent),
/// non-finite doubles as the strings "inf", "-inf", "nan".
std::string canonical_json(const nlohmann::json& value);

nlohmann::json to_json(const Report& report);

/// Inverse of to_json; throws ConfigInvalid on malformed input.
Report report_from_json(const nlohmann::json& doc);

/// Writes canonical_json(to_json(report)) and a trailing newline; throws IoFailure.
void emit_report(const Report& report, const std::string& path);

/// Reads a file written by emit_report.
Report read_report(const std::string& path);

} // namespace cosym
