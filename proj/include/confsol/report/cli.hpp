#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "confsol/report/config.hpp"
#include "confsol/report/fuzz_suite.hpp"
#include "confsol/report/io.hpp"
#include "confsol/report/lemma_suite.hpp"
#include "confsol/report/ode_suite.hpp"
#include "confsol/report/run_report.hpp"
#include "confsol/report/soliton_suite.hpp"
#include "confsol/version.hpp"

namespace confsol::report {

enum ExitCode : int { exit_pass = 0, exit_check_failure = 1, exit_config_error = 2, exit_io_error = 3 };

inline RunReport run_suite(const RunConfig& c) {
    if (c.self_test && c.suite != "identity-fuzz")
        throw ConfigError("--self-test is only available for identity-fuzz");
    if (c.suite == "lemma-scan") return cmd_lemma_scan(c);
    if (c.suite == "identity-fuzz") return cmd_identity_fuzz(c);
    if (c.suite == "ode-run") return cmd_ode_run(c);
    if (c.suite == "soliton-verify") return cmd_soliton_verify(c);
    throw ConfigError("unknown suite '" + c.suite + "'");
}

inline std::string summary_filename(const std::string& suite) { return suite + ".summary.json"; }

/// Runs a suite and writes its CSVs, summary and timing into the output directory.
inline RunReport execute(const RunConfig& c) {
    const auto start = std::chrono::steady_clock::now();
    RunReport rep = run_suite(c);
    rep.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    ensure_directory(c.output_dir);
    for (const auto& a : rep.artifacts) write_atomic(c.output_dir / a.filename, a.contents);
    write_json(c.output_dir / summary_filename(c.suite), rep.to_json());
    write_json(c.output_dir / (c.suite + ".timing.json"),
               {{"suite", c.suite}, {"duration_seconds", rep.duration_seconds}, {"jobs", c.jobs}});
    return rep;
}

struct Aggregate {
    nlohmann::json document;
    bool all_passed = true;
};

/// Collects every *.summary.json in `dir` into one document.
inline Aggregate aggregate_summaries(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw IoError("no such output directory " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.size() > 13 && name.ends_with(".summary.json"))
            files.push_back(entry.path());
    }
    if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
    if (files.empty()) throw IoError("no suite summaries found in " + dir.string());
    std::sort(files.begin(), files.end());

    Aggregate agg;
    auto& suites = agg.document["suites"] = nlohmann::json::object();
    std::vector<std::string> missing;
    for (const auto& path : files) {
        std::ifstream in(path);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw IoError("cannot parse " + path.string() + ": " + e.what());
        }
        const auto suite = doc.value("suite", path.filename().string());
        const bool passed = doc.value("passed", false);
        agg.all_passed = agg.all_passed && passed;
        suites[suite] = {{"passed", passed},
                         {"checks", doc.contains("checks") ? doc["checks"].size() : 0},
                         {"failures", doc.value("failures", nlohmann::json::array())},
                         {"warnings", doc.value("warnings", nlohmann::json::array())},
                         {"summary", doc.value("summary", nlohmann::json::object())}};
    }
    for (const auto& name : suite_names())
        if (!suites.contains(name)) missing.push_back(name);
    agg.document["tool_version"] = confsol::version;
    agg.document["all_passed"] = agg.all_passed;
    agg.document["missing_suites"] = missing;
    return agg;
}

inline void print_report(const RunReport& rep, std::ostream& out) {
    const auto failures = rep.failures();
    out << rep.suite << ": " << (failures.empty() ? "PASS" : "FAIL") << " (" << rep.checks.size() << " checks, "
        << failures.size() << " failed, " << rep.duration_seconds << " s)\n";
    for (const auto& c : rep.checks)
        if (!c.passed) out << "  failed " << c.name << ": " << c.value << " " << c.relation << " " << c.limit << "\n";
    for (const auto& w : rep.warnings) out << "  warning: " << w << "\n";
}

struct CliOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> jobs;
    bool self_test = false;
};

inline RunConfig resolve_config(const std::string& suite, const CliOptions& o) {
    RunConfig c = default_config(suite);
    if (!o.config_path.empty()) apply_document(c, load_document(o.config_path));
    if (o.seed) c.seed = *o.seed;
    if (o.out) c.output_dir = *o.out;
    if (o.jobs) c.jobs = *o.jobs;
    c.self_test = o.self_test;
    validate(c);
    return c;
}

/// Entry point shared by the executable and the tests; returns the exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Verification suites for conformally flat shrinking soliton estimates", "confsol"};
    app.set_version_flag("--version", confsol::version);
    app.require_subcommand(1);

    CliOptions opts;
    std::string report_out = "out";
    for (const auto& name : suite_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " suite");
        sub->add_option("--config", opts.config_path, "JSON config file");
        sub->add_option("--seed", opts.seed, "RNG seed (overrides the config)");
        sub->add_option("--out", opts.out, "output directory (overrides the config)");
        sub->add_option("--jobs", opts.jobs, "worker threads");
        sub->add_flag("--self-test", opts.self_test, "inject a known fault; the run must fail");
    }
    auto* report = app.add_subcommand("report", "aggregate suite summaries into report.json");
    report->add_option("--out", report_out, "directory holding the summaries");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_pass : exit_config_error;
    }

    try {
        if (report->parsed()) {
            const auto agg = aggregate_summaries(report_out);
            write_json(std::filesystem::path(report_out) / "report.json", agg.document);
            for (const auto& [name, s] : agg.document["suites"].items())
                out << name << ": " << (s["passed"].get<bool>() ? "PASS" : "FAIL") << "\n";
            return agg.all_passed ? exit_pass : exit_check_failure;
        }
        std::string suite;
        for (const auto* sub : app.get_subcommands()) suite = sub->get_name();
        const RunConfig config = resolve_config(suite, opts);
        const auto rep = execute(config);
        print_report(rep, out);
        return rep.exit_code();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return exit_io_error;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "I/O error: " << e.what() << "\n";
        return exit_io_error;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
}

}  // namespace confsol::report
