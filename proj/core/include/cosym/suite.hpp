#pragma once

#include "cosym/config.hpp"
#include "cosym/geodesic.hpp"
#include "cosym/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cosym {

struct CheckInfo {
    std::string name;
    std::string anchor;
    double default_tolerance = 0.0;
    bool d1 = false;
    bool d2 = false;
    bool custom = false;
    /// Run when the config lists no checks.
    bool default_enabled = true;
};

const std::vector<CheckInfo>& check_catalog();

/// Checks run for a family when the config has no `checks` list.
std::vector<std::string> default_checks(FamilyKind family);

/// Sampler recorded in reports: mt19937_64 seeded with `seed`, one draw x per
/// coordinate, u = (x >> 11) * 2^-53, value lo + (hi - lo) u.
inline constexpr const char* kSamplerName = "mt19937_64-uniform53";
inline constexpr int kSamplerVersion = 1;

std::vector<std::vector<double>> sample_points(const std::vector<Interval>& box, int count, std::uint64_t seed);

/// Sign conventions, thresholds and the unit-sphere scalar curvature computed by the engine.
nlohmann::json calibration_metadata();

/// The config with every default filled in, as echoed in reports.
nlohmann::json resolved_config(const VerificationConfig& config);

/// Runs every enabled check over the sampled points. Check failures,
/// including exceptions inside a check, become failed results.
/// Throws ConfigInvalid for unknown or inapplicable check and tolerance names.
Report run_suite(const VerificationConfig& config);

/// Pullback grid of the d=1 family from the config's pullback settings.
PullbackResult run_pullback(const VerificationConfig& config);

} // namespace cosym
