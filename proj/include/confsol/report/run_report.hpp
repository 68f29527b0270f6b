#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "confsol/report/config.hpp"
#include "confsol/version.hpp"

namespace confsol::report {

struct Check {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double limit = 0.0;
    std::string relation;  // "<=" or ">="
    std::string note;
};

struct Artifact {
    std::string filename;
    std::string contents;
};

struct RunReport {
    std::string suite;
    std::string tool_version = confsol::version;
    std::vector<Check> checks;
    nlohmann::json summary = nlohmann::json::object();
    nlohmann::json config;
    std::vector<std::string> warnings;
    double duration_seconds = 0.0;  // kept out of the summary document
    std::vector<Artifact> artifacts;

    void check_le(std::string name, double value, double limit, std::string note = {}) {
        checks.push_back({std::move(name), value <= limit, value, limit, "<=", std::move(note)});
    }

    void check_ge(std::string name, double value, double limit, std::string note = {}) {
        checks.push_back({std::move(name), value >= limit, value, limit, ">=", std::move(note)});
    }

    std::vector<std::string> failures() const {
        std::vector<std::string> out;
        for (const auto& c : checks)
            if (!c.passed) out.push_back(c.name);
        return out;
    }

    bool passed() const { return failures().empty(); }

    int exit_code() const { return passed() ? 0 : 1; }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["suite"] = suite;
        j["tool_version"] = tool_version;
        j["passed"] = passed();
        j["failures"] = failures();
        j["warnings"] = warnings;
        auto& arr = j["checks"] = nlohmann::json::array();
        for (const auto& c : checks) {
            nlohmann::json e{{"name", c.name}, {"passed", c.passed}, {"value", c.value},
                             {"limit", c.limit}, {"relation", c.relation}};
            if (!c.note.empty()) e["note"] = c.note;
            arr.push_back(std::move(e));
        }
        j["summary"] = summary;
        j["config"] = config;
        return j;
    }
};

inline RunReport start_report(const RunConfig& c) {
    RunReport r;
    r.suite = c.suite;
    r.config = echo(c);
    r.warnings = c.warnings;
    return r;
}

/// Stream id for a seeded sub-run: suite part, two labels, and a chunk.
inline std::uint64_t stream_key(std::uint64_t part, std::uint64_t a, std::uint64_t b, std::uint64_t chunk = 0) {
    return (part << 48) ^ (a << 32) ^ (b << 20) ^ chunk;
}

/// Splits `total` items into `chunks` slots; slot c gets items [begin, end).
inline std::pair<std::size_t, std::size_t> chunk_range(std::size_t total, std::size_t chunks, std::size_t c) {
    const std::size_t base = total / chunks, extra = total % chunks;
    const std::size_t begin = c * base + std::min(c, extra);
    return {begin, begin + base + (c < extra ? 1 : 0)};
}

namespace detail {

inline nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace detail

inline std::string label(const char* key, long long v) { return std::string(key) + "=" + std::to_string(v); }

}  // namespace confsol::report
