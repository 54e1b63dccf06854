#include "cosym/config.hpp"

#include "cosym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace cosym {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& field, const std::string& reason)
{
    throw Error(Errc::ConfigInvalid, field + ": " + reason);
}

double number(const json& j, const std::string& field)
{
    if (!j.is_number()) {
        invalid(field, "expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        invalid(field, "must be finite");
    }
    return v;
}

int integer(const json& j, const std::string& field)
{
    if (!j.is_number_integer()) {
        invalid(field, "expected an integer");
    }
    return j.get<int>();
}

const json& require(const json& obj, const std::string& key, const std::string& prefix)
{
    const std::string field = prefix.empty() ? key : prefix + "." + key;
    if (!obj.is_object() || !obj.contains(key)) {
        invalid(field, "missing");
    }
    return obj.at(key);
}

std::vector<double> numbers(const json& j, const std::string& field)
{
    if (!j.is_array()) {
        invalid(field, "expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
}

Eigen::MatrixXd square_matrix(const json& j, int m, const std::string& field)
{
    const auto v = numbers(j, field);
    if (static_cast<int>(v.size()) != m * m) {
        invalid(field, "expected " + std::to_string(m * m) + " entries (row-major " + std::to_string(m) + "x" +
                           std::to_string(m) + "), got " + std::to_string(v.size()));
    }
    Eigen::MatrixXd out(m, m);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
            out(r, c) = v[static_cast<std::size_t>(r * m + c)];
        }
    }
    return out;
}

std::vector<Interval> intervals(const json& j, int n, const std::string& field)
{
    if (!j.is_array() || static_cast<int>(j.size()) != n) {
        invalid(field, "expected " + std::to_string(n) + " [lo, hi] pairs");
    }
    std::vector<Interval> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string f = field + "[" + std::to_string(i) + "]";
        const auto pair = numbers(j[i], f);
        if (pair.size() != 2 || !(pair[0] < pair[1])) {
            invalid(f, "expected [lo, hi] with lo < hi");
        }
        out.push_back({pair[0], pair[1]});
    }
    return out;
}

json intervals_to_json(const std::vector<Interval>& box)
{
    json out = json::array();
    for (const auto& iv : box) {
        out.push_back(json::array({iv.lo, iv.hi}));
    }
    return out;
}

json matrix_to_json(const Eigen::MatrixXd& m)
{
    json out = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) {
            out.push_back(m(r, c));
        }
    }
    return out;
}

PiecewisePolynomial parse_f(const json& j, const std::string& field)
{
    if (!j.is_array() || j.empty()) {
        invalid(field, "expected a nonempty list of {breakpoints, coefficients}");
    }
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<PiecewisePolynomial::Piece> pieces;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string f = field + "[" + std::to_string(k) + "]";
        const json& bp = require(j[k], "breakpoints", f);
        if (!bp.is_array() || bp.size() != 2) {
            invalid(f + ".breakpoints", "expected [lo|null, hi|null]");
        }
        PiecewisePolynomial::Piece piece;
        piece.lo = bp[0].is_null() ? -inf : number(bp[0], f + ".breakpoints[0]");
        piece.hi = bp[1].is_null() ? inf : number(bp[1], f + ".breakpoints[1]");
        piece.coefficients = numbers(require(j[k], "coefficients", f), f + ".coefficients");
        if (piece.coefficients.empty()) {
            invalid(f + ".coefficients", "must not be empty");
        }
        pieces.push_back(std::move(piece));
    }
    try {
        return PiecewisePolynomial(std::move(pieces));
    } catch (const Error& e) {
        invalid(field, e.what());
    }
}

json f_to_json(const PiecewisePolynomial& f)
{
    json out = json::array();
    for (const auto& p : f.pieces()) {
        json bp = json::array();
        bp.push_back(std::isfinite(p.lo) ? json(p.lo) : json(nullptr));
        bp.push_back(std::isfinite(p.hi) ? json(p.hi) : json(nullptr));
        out.push_back({{"breakpoints", bp}, {"coefficients", p.coefficients}});
    }
    return out;
}

SurfaceMatrix surface_matrix(const json& j, const std::string& field)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 || !j[1].is_array() ||
        j[1].size() != 2) {
        invalid(field, "expected a 2x2 array of polynomials");
    }
    SurfaceMatrix out = zero_surface_matrix();
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
            out[a][b] = parse_polynomial(j[a][b], 2,
                                         field + "[" + std::to_string(a) + "][" + std::to_string(b) + "]");
        }
    }
    return out;
}

json surface_matrix_to_json(const SurfaceMatrix& m)
{
    json out = json::array();
    for (const auto& row : m) {
        json r = json::array();
        for (const auto& p : row) {
            r.push_back(polynomial_to_json(p));
        }
        out.push_back(r);
    }
    return out;
}

json surface_to_json(const SurfaceConnectionSpec& s)
{
    return {{"gamma_coeffs", json::array({surface_matrix_to_json(s.gamma[0]), surface_matrix_to_json(s.gamma[1])})},
            {"alpha", surface_matrix_to_json(s.alpha)},
            {"T", surface_matrix_to_json(s.T)}};
}

// Default chart domain: the sample box widened on every side, so that
// difference stencils around sampled points stay inside the chart.
std::vector<Interval> widened(const std::vector<Interval>& box)
{
    std::vector<Interval> out;
    for (const auto& iv : box) {
        const double margin = std::max(0.1 * (iv.hi - iv.lo), 0.01);
        out.push_back({iv.lo - margin, iv.hi + margin});
    }
    return out;
}

int dimension(const json& params, int min_n)
{
    const int n = integer(require(params, "n", "params"), "params.n");
    if (n < min_n) {
        invalid("params.n", "must be at least " + std::to_string(min_n));
    }
    return n;
}

// Runs a family validator and reports its failure as a config error.
template <class F>
void family_checked(F&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        if (e.code() == Errc::ConfigInvalid) {
            throw;
        }
        invalid("params", e.what());
    }
}

PullbackSettings parse_pullback(const json& j, int n)
{
    PullbackSettings p;
    p.psi0.assign(static_cast<std::size_t>(n - 2), 0.0);
    p.velocity_psi.assign(static_cast<std::size_t>(n - 2), 0.0);
    p.direction.assign(static_cast<std::size_t>(n - 2), 0.0);
    if (n >= 4) {
        p.psi0[0] = 0.2;
        p.psi0[1] = 0.1;
        p.velocity_psi[0] = 0.3;
        p.velocity_psi[1] = -0.2;
        p.direction[0] = 1.0;
        p.direction[1] = 0.5;
    }
    if (j.is_null()) {
        return p;
    }
    if (!j.is_object()) {
        invalid("pullback", "expected an object");
    }
    static const std::set<std::string> keys{"psi0",     "velocity_psi", "direction", "half_width",
                                            "per_axis", "fd_step",      "ode_tol",   "box_half_width"};
    for (const auto& [key, value] : j.items()) {
        if (!keys.contains(key)) {
            invalid("pullback." + key, "unknown key");
        }
    }
    const auto vec = [&](const char* key, std::vector<double>& out) {
        if (j.contains(key)) {
            out = numbers(j.at(key), std::string("pullback.") + key);
            if (static_cast<int>(out.size()) != n - 2) {
                invalid(std::string("pullback.") + key, "expected " + std::to_string(n - 2) + " entries");
            }
        }
    };
    const auto positive = [&](const char* key, double& out) {
        if (j.contains(key)) {
            out = number(j.at(key), std::string("pullback.") + key);
            if (!(out > 0.0)) {
                invalid(std::string("pullback.") + key, "must be positive");
            }
        }
    };
    vec("psi0", p.psi0);
    vec("velocity_psi", p.velocity_psi);
    vec("direction", p.direction);
    positive("half_width", p.half_width);
    positive("fd_step", p.fd_step);
    positive("ode_tol", p.ode_tol);
    positive("box_half_width", p.box_half_width);
    if (j.contains("per_axis")) {
        p.per_axis = integer(j.at("per_axis"), "pullback.per_axis");
        if (p.per_axis < 1) {
            invalid("pullback.per_axis", "must be at least 1");
        }
    }
    return p;
}

void parse_d1(VerificationConfig& cfg, int n)
{
    const json& params = cfg.params;
    D1FamilySpec spec;
    spec.n = n;
    spec.gram = square_matrix(require(params, "gram", "params"), n - 2, "params.gram");
    spec.f = parse_f(require(params, "f", "params"), "params.f");
    spec.A = square_matrix(require(params, "A", "params"), n - 2, "params.A");
    spec.domain = cfg.domain;
    family_checked([&] { cfg.field = build_d1_metric(spec); });
    cfg.d1 = std::move(spec);
}

void parse_d2(VerificationConfig& cfg, int n)
{
    const json& params = cfg.params;
    D2FamilySpec spec;
    spec.n = n;
    spec.surface.epsilon = number(require(params, "epsilon", "params"), "params.epsilon");
    const json& surface = require(params, "surface", "params");
    const json& gamma = require(surface, "gamma_coeffs", "params.surface");
    if (!gamma.is_array() || gamma.size() != 2) {
        invalid("params.surface.gamma_coeffs", "expected [k][i][j] with k, i, j in {0, 1}");
    }
    for (std::size_t k = 0; k < 2; ++k) {
        spec.surface.gamma[k] = surface_matrix(gamma[k], "params.surface.gamma_coeffs[" + std::to_string(k) + "]");
    }
    spec.surface.alpha = surface_matrix(require(surface, "alpha", "params.surface"), "params.surface.alpha");
    spec.surface.T = surface_matrix(require(surface, "T", "params.surface"), "params.surface.T");
    spec.gramV = square_matrix(require(params, "gramV", "params"), n - 4, "params.gramV");
    spec.domain = cfg.domain;
    family_checked([&] { cfg.field = build_d2_metric(spec); });
    cfg.d2 = std::move(spec);
}

void parse_custom(VerificationConfig& cfg, int n)
{
    const json& comps = require(cfg.params, "components", "params");
    if (!comps.is_array() || static_cast<int>(comps.size()) != n) {
        invalid("params.components", "expected an n x n array of polynomials");
    }
    std::vector<std::vector<Polynomial>> g(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (!comps[i].is_array() || static_cast<int>(comps[i].size()) != n) {
            invalid("params.components[" + std::to_string(i) + "]", "expected " + std::to_string(n) + " entries");
        }
        for (std::size_t j = 0; j < comps[i].size(); ++j) {
            g[i].push_back(parse_polynomial(comps[i][j], n,
                                            "params.components[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
        }
    }
    std::vector<Expr> upper;
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = i; j < g.size(); ++j) {
            if (!(g[i][j] == g[j][i])) {
                invalid("params.components[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                        "metric components must be symmetric");
            }
            upper.push_back(Expr::polynomial(g[i][j]));
        }
    }
    ChartSpec chart;
    chart.n = n;
    chart.domain = cfg.domain;
    for (int i = 0; i < n; ++i) {
        chart.labels.push_back("x" + std::to_string(i + 1));
    }
    family_checked([&] { cfg.field = MetricField(chart, upper); });
}

} // namespace

std::string to_string(FamilyKind kind)
{
    switch (kind) {
    case FamilyKind::D1:
        return "d1";
    case FamilyKind::D2:
        return "d2";
    case FamilyKind::Custom:
        return "custom";
    }
    return "custom";
}

Polynomial parse_polynomial(const json& terms, int vars, const std::string& field)
{
    if (!terms.is_array()) {
        invalid(field, "expected a list of {coeff, powers}");
    }
    Polynomial p(vars);
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const std::string f = field + "[" + std::to_string(k) + "]";
        const double c = number(require(terms[k], "coeff", f), f + ".coeff");
        const json& pw = require(terms[k], "powers", f);
        if (!pw.is_array() || static_cast<int>(pw.size()) != vars) {
            invalid(f + ".powers", "expected " + std::to_string(vars) + " exponents");
        }
        Polynomial::Exponents e;
        for (std::size_t i = 0; i < pw.size(); ++i) {
            const int k_i = integer(pw[i], f + ".powers[" + std::to_string(i) + "]");
            if (k_i < 0) {
                invalid(f + ".powers[" + std::to_string(i) + "]", "must be nonnegative");
            }
            e.push_back(k_i);
        }
        p.add_term(c, e);
    }
    return p;
}

json polynomial_to_json(const Polynomial& p)
{
    json out = json::array();
    for (const auto& [e, c] : p.terms()) {
        out.push_back({{"coeff", c}, {"powers", e}});
    }
    return out;
}

VerificationConfig parse_config(const json& doc)
{
    if (!doc.is_object()) {
        invalid("(root)", "expected a JSON object");
    }
    static const std::set<std::string> keys{"family", "params",     "samples",     "box",     "domain",
                                            "seed",   "tolerances", "report_path", "checks", "pullback"};
    for (const auto& [key, value] : doc.items()) {
        if (!keys.contains(key)) {
            invalid(key, "unknown key");
        }
    }

    VerificationConfig cfg;
    const json& fam = require(doc, "family", "");
    if (!fam.is_string()) {
        invalid("family", "expected \"d1\", \"d2\" or \"custom\"");
    }
    const auto name = fam.get<std::string>();
    if (name == "d1") {
        cfg.family = FamilyKind::D1;
    } else if (name == "d2") {
        cfg.family = FamilyKind::D2;
    } else if (name == "custom") {
        cfg.family = FamilyKind::Custom;
    } else {
        invalid("family", "unknown family \"" + name + "\"");
    }

    cfg.params = require(doc, "params", "");
    if (!cfg.params.is_object()) {
        invalid("params", "expected an object");
    }
    const int n = dimension(cfg.params, cfg.family == FamilyKind::D1 ? 4 : (cfg.family == FamilyKind::D2 ? 4 : 2));

    cfg.samples = integer(require(doc, "samples", ""), "samples");
    if (cfg.samples < 1) {
        invalid("samples", "must be at least 1");
    }

    const json& seed = require(doc, "seed", "");
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
        invalid("seed", "expected a nonnegative integer");
    }
    cfg.seed = seed.get<std::uint64_t>();

    cfg.box = intervals(require(doc, "box", ""), n, "box");
    cfg.domain = doc.contains("domain") ? intervals(doc.at("domain"), n, "domain") : widened(cfg.box);
    for (std::size_t i = 0; i < cfg.box.size(); ++i) {
        if (cfg.box[i].lo < cfg.domain[i].lo || cfg.box[i].hi > cfg.domain[i].hi) {
            invalid("box[" + std::to_string(i) + "]", "must lie inside the chart domain");
        }
    }

    if (doc.contains("tolerances")) {
        const json& tol = doc.at("tolerances");
        if (!tol.is_object()) {
            invalid("tolerances", "expected an object of check name -> number");
        }
        for (const auto& [key, value] : tol.items()) {
            const double v = number(value, "tolerances." + key);
            if (v < 0.0) {
                invalid("tolerances." + key, "must be nonnegative");
            }
            cfg.tolerances[key] = v;
        }
    }

    if (doc.contains("checks")) {
        const json& checks = doc.at("checks");
        if (!checks.is_array()) {
            invalid("checks", "expected a list of check names");
        }
        std::vector<std::string> list;
        for (std::size_t i = 0; i < checks.size(); ++i) {
            if (!checks[i].is_string()) {
                invalid("checks[" + std::to_string(i) + "]", "expected a string");
            }
            list.push_back(checks[i].get<std::string>());
        }
        cfg.checks = std::move(list);
    }

    const json& report = require(doc, "report_path", "");
    if (!report.is_string() || report.get<std::string>().empty()) {
        invalid("report_path", "expected a nonempty path");
    }
    cfg.report_path = report.get<std::string>();

    cfg.pullback = parse_pullback(doc.contains("pullback") ? doc.at("pullback") : json(nullptr), n);

    switch (cfg.family) {
    case FamilyKind::D1:
        parse_d1(cfg, n);
        break;
    case FamilyKind::D2:
        parse_d2(cfg, n);
        break;
    case FamilyKind::Custom:
        parse_custom(cfg, n);
        break;
    }
    return cfg;
}

VerificationConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::IoFailure, "cannot read config file " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(Errc::ConfigInvalid, path + ": not valid JSON (" + e.what() + ")");
    }
    return parse_config(doc);
}

json d1_template()
{
    const D1FamilySpec spec = d1_example(4);
    std::vector<Interval> box(4, Interval{-0.9, 0.9});
    return {{"family", "d1"},
            {"params",
             {{"n", spec.n}, {"gram", matrix_to_json(spec.gram)}, {"f", f_to_json(spec.f)}, {"A", matrix_to_json(spec.A)}}},
            {"samples", 100},
            {"box", intervals_to_json(box)},
            {"seed", 7},
            {"tolerances", json::object()},
            {"report_path", "report_d1.json"},
            {"pullback",
             {{"psi0", {0.2, 0.1}},
              {"velocity_psi", {0.3, -0.2}},
              {"direction", {1.0, 0.5}},
              {"half_width", 0.3},
              {"per_axis", 3},
              {"fd_step", 1e-4},
              {"ode_tol", 1e-8},
              {"box_half_width", 0.6}}}};
}

json d2_template()
{
    const D2FamilySpec spec = d2_example(surface_flat_fixture(), 4);
    std::vector<Interval> box(4, Interval{-0.9, 0.9});
    return {{"family", "d2"},
            {"params",
             {{"n", spec.n},
              {"epsilon", spec.surface.epsilon},
              {"surface", surface_to_json(spec.surface)},
              {"gramV", matrix_to_json(spec.gramV)}}},
            {"samples", 100},
            {"box", intervals_to_json(box)},
            {"seed", 7},
            {"tolerances", json::object()},
            {"report_path", "report_d2.json"}};
}

} // namespace cosym
