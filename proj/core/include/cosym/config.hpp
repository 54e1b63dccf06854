#pragma once

#include "cosym/families.hpp"
#include "cosym/jet_chart.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cosym {

enum class FamilyKind { D1, D2, Custom };

std::string to_string(FamilyKind kind);

/// Grid and integrator settings for the pullback check and the `pullback` subcommand.
struct PullbackSettings {
    std::vector<double> psi0;
    std::vector<double> velocity_psi;
    std::vector<double> direction;
    double half_width = 0.3;
    int per_axis = 3;
    double fd_step = 1e-4;
    double ode_tol = 1e-8;
    double box_half_width = 0.6;
};

struct VerificationConfig {
    FamilyKind family = FamilyKind::D1;
    /// Parameters exactly as given.
    nlohmann::json params;
    int samples = 1;
    std::vector<Interval> box;
    std::vector<Interval> domain;
    std::uint64_t seed = 0;
    /// Overrides only; defaults are resolved by the suite.
    std::map<std::string, double> tolerances;
    /// Absent means the family defaults.
    std::optional<std::vector<std::string>> checks;
    std::string report_path;
    PullbackSettings pullback;

    std::optional<D1FamilySpec> d1;
    std::optional<D2FamilySpec> d2;
    MetricField field;
};

/// Throws ConfigInvalid naming the offending field.
VerificationConfig parse_config(const nlohmann::json& doc);

/// Throws IoFailure naming the path when the file cannot be read.
VerificationConfig load_config(const std::string& path);

/// Polynomial from [{"coeff": c, "powers": [...]}].
Polynomial parse_polynomial(const nlohmann::json& terms, int vars, const std::string& field);
nlohmann::json polynomial_to_json(const Polynomial& p);

/// Template configs filled with the shipped fixtures.
nlohmann::json d1_template();
nlohmann::json d2_template();

} // namespace cosym
