#include "cli.hpp"

#include "cosym/errors.hpp"
#include "cosym/suite.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

namespace cosym {

namespace {

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

int config_error(std::ostream& err, const std::exception& e)
{
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
}

int run_verify(const std::string& path, std::optional<std::uint64_t> seed, std::optional<int> samples,
               const std::optional<std::string>& report_path, std::ostream& out, std::ostream& err)
{
    VerificationConfig cfg;
    Report report;
    try {
        cfg = load_config(path);
        if (seed) {
            cfg.seed = *seed;
        }
        if (samples) {
            if (*samples < 1) {
                throw Error(Errc::ConfigInvalid, "samples: must be at least 1");
            }
            cfg.samples = *samples;
        }
        if (report_path) {
            cfg.report_path = *report_path;
        }
        report = run_suite(cfg);
        emit_report(report, cfg.report_path);
    } catch (const Error& e) {
        return config_error(err, e);
    }

    out << "family " << to_string(cfg.family) << ", n = " << cfg.field.dim() << ", " << cfg.samples
        << " samples, seed " << cfg.seed << '\n';
    for (const auto& r : report.results) {
        const auto t = report.timings.find(r.name);
        out << (r.pass ? "PASS " : "FAIL ") << r.name << "  residual " << sci(r.max_residual) << "  tol "
            << sci(r.tolerance);
        if (!r.verdict.empty()) {
            out << "  locally symmetric: " << r.verdict;
        }
        if (t != report.timings.end()) {
            out << "  (" << sci(t->second) << " s)";
        }
        out << '\n';
    }
    out << "overall " << (report.overall_pass ? "PASS" : "FAIL") << ", report written to " << cfg.report_path
        << '\n';
    return report.overall_pass ? kExitPass : kExitCheckFailure;
}

int run_family(const std::string& which, const std::string& path, std::ostream& out, std::ostream& err)
{
    const nlohmann::json doc = which == "d1" ? d1_template() : d2_template();
    std::ofstream file(path, std::ios::trunc);
    if (!file) {
        err << "error: cannot write " << path << '\n';
        return kExitConfigError;
    }
    file << doc.dump(2) << '\n';
    if (!file) {
        err << "error: failed writing " << path << '\n';
        return kExitConfigError;
    }
    out << "wrote " << which << " template to " << path << '\n';
    return kExitPass;
}

int run_pullback_command(const std::string& path, std::ostream& out, std::ostream& err)
{
    VerificationConfig cfg;
    PullbackResult res;
    try {
        cfg = load_config(path);
        res = run_pullback(cfg);
    } catch (const Error& e) {
        if (e.code() == Errc::ConfigInvalid || e.code() == Errc::IoFailure ||
            e.code() == Errc::SpecInvariantViolated || e.code() == Errc::StencilOutsideBox) {
            return config_error(err, e);
        }
        err << "error: " << e.what() << '\n';
        return kExitCheckFailure;
    }
    const auto it = cfg.tolerances.find("pullback");
    const double tol = it != cfg.tolerances.end() ? it->second : 1e-5;
    const bool pass = res.max_residual <= tol;
    out << (pass ? "PASS" : "FAIL") << " pullback on " << res.points.size() << " grid points, residual "
        << sci(res.max_residual) << ", tol " << sci(tol) << '\n';
    return pass ? kExitPass : kExitCheckFailure;
}

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Builds and verifies conformally symmetric metrics"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
    std::optional<std::string> report_path;
    auto* verify = app.add_subcommand("verify", "Run the check suite on a config");
    verify->add_option("--config", config_path, "Config file")->required();
    verify->add_option("--seed", seed, "Override the sampling seed");
    verify->add_option("--samples", samples, "Override the sample count");
    verify->add_option("--report", report_path, "Override the report path");

    std::string which;
    std::string out_path;
    auto* family = app.add_subcommand("family", "Write a template config");
    family->add_option("kind", which, "d1 or d2")->required()->check(CLI::IsMember({"d1", "d2"}));
    family->add_option("--out", out_path, "Output path")->required();

    std::string pullback_config;
    auto* pullback = app.add_subcommand("pullback", "Run only the pullback grid of a d1 config");
    pullback->add_option("--config", pullback_config, "Config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitConfigError;
    }

    try {
        if (verify->parsed()) {
            return run_verify(config_path, seed, samples, report_path, out, err);
        }
        if (family->parsed()) {
            return run_family(which, out_path, out, err);
        }
        return run_pullback_command(pullback_config, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
}

} // namespace cosym
