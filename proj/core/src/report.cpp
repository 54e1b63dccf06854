#include "cosym/report.hpp"

#include "cosym/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace cosym {

namespace {

using nlohmann::json;

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "\"nan\"";
    }
    if (std::isinf(v)) {
        return v > 0 ? "\"inf\"" : "\"-inf\"";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    if (s.find_first_of(".e") == std::string::npos) {
        s += ".0";
    }
    return s;
}

void write(const json& v, std::string& out)
{
    switch (v.type()) {
    case json::value_t::object: {
        out += '{';
        bool first = true;
        // nlohmann's default object is a std::map, so iteration is key-sorted.
        for (const auto& [key, value] : v.items()) {
            if (!first) {
                out += ',';
            }
            first = false;
            out += json(key).dump();
            out += ':';
            write(value, out);
        }
        out += '}';
        break;
    }
    case json::value_t::array: {
        out += '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) {
                out += ',';
            }
            write(v[i], out);
        }
        out += ']';
        break;
    }
    case json::value_t::number_float:
        out += format_double(v.get<double>());
        break;
    default:
        out += v.dump();
        break;
    }
}

json number_to_json(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

double number_from_json(const json& j, const std::string& field)
{
    if (j.is_number()) {
        return j.get<double>();
    }
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
        if (s == "nan") {
            return std::numeric_limits<double>::quiet_NaN();
        }
    }
    throw Error(Errc::ConfigInvalid, field + ": expected a number");
}

const json& field_of(const json& obj, const std::string& key)
{
    if (!obj.is_object() || !obj.contains(key)) {
        throw Error(Errc::ConfigInvalid, key + ": missing from report");
    }
    return obj.at(key);
}

bool same_number(double a, double b)
{
    return (std::isnan(a) && std::isnan(b)) || a == b;
}

bool same_result(const CheckResult& a, const CheckResult& b)
{
    if (a.worst_point.size() != b.worst_point.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.worst_point.size(); ++i) {
        if (!same_number(a.worst_point[i], b.worst_point[i])) {
            return false;
        }
    }
    return a.name == b.name && a.anchor == b.anchor && a.points == b.points &&
           same_number(a.max_residual, b.max_residual) && same_number(a.tolerance, b.tolerance) &&
           a.pass == b.pass && a.detail == b.detail && a.verdict == b.verdict;
}

} // namespace

bool operator==(const Report& a, const Report& b)
{
    if (a.results.size() != b.results.size() || a.overall_pass != b.overall_pass || a.config != b.config ||
        a.calibration != b.calibration) {
        return false;
    }
    for (std::size_t i = 0; i < a.results.size(); ++i) {
        if (!same_result(a.results[i], b.results[i])) {
            return false;
        }
    }
    return true;
}

std::string canonical_json(const json& value)
{
    std::string out;
    write(value, out);
    return out;
}

json to_json(const Report& report)
{
    json results = json::array();
    for (const auto& r : report.results) {
        json worst = json::array();
        for (double x : r.worst_point) {
            worst.push_back(number_to_json(x));
        }
        json entry = {{"name", r.name},
                      {"anchor", r.anchor},
                      {"points", r.points},
                      {"max_residual", number_to_json(r.max_residual)},
                      {"tolerance", number_to_json(r.tolerance)},
                      {"pass", r.pass},
                      {"worst_point", worst},
                      {"detail", r.detail}};
        if (!r.verdict.empty()) {
            entry["verdict"] = r.verdict;
        }
        results.push_back(std::move(entry));
    }
    return {{"config", report.config},
            {"calibration", report.calibration},
            {"results", results},
            {"overall_pass", report.overall_pass}};
}

Report report_from_json(const json& doc)
{
    Report report;
    report.config = field_of(doc, "config");
    report.calibration = field_of(doc, "calibration");
    report.overall_pass = field_of(doc, "overall_pass").get<bool>();
    const json& results = field_of(doc, "results");
    if (!results.is_array()) {
        throw Error(Errc::ConfigInvalid, "results: expected an array");
    }
    for (const auto& entry : results) {
        CheckResult r;
        r.name = field_of(entry, "name").get<std::string>();
        r.anchor = field_of(entry, "anchor").get<std::string>();
        r.points = field_of(entry, "points").get<int>();
        r.max_residual = number_from_json(field_of(entry, "max_residual"), "max_residual");
        r.tolerance = number_from_json(field_of(entry, "tolerance"), "tolerance");
        r.pass = field_of(entry, "pass").get<bool>();
        for (const auto& x : field_of(entry, "worst_point")) {
            r.worst_point.push_back(number_from_json(x, "worst_point"));
        }
        r.detail = field_of(entry, "detail").get<std::string>();
        if (entry.contains("verdict")) {
            r.verdict = entry.at("verdict").get<std::string>();
        }
        report.results.push_back(std::move(r));
    }
    return report;
}

void emit_report(const Report& report, const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::IoFailure, "cannot write report file " + path);
    }
    out << canonical_json(to_json(report)) << '\n';
    out.flush();
    if (!out) {
        throw Error(Errc::IoFailure, "failed writing report file " + path);
    }
}

Report read_report(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::IoFailure, "cannot read report file " + path);
    }
    try {
        return report_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw Error(Errc::ConfigInvalid, path + ": " + e.what());
    }
}

} // namespace cosym
