#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>

#include <json.hpp>

namespace confsol::report {

/// Output directory or file could not be written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw IoError("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
}

/// Writes to a sibling temp file, then renames over the target.
inline void write_atomic(const std::filesystem::path& target, const std::string& contents) {
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << contents;
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename onto " + target.string());
    }
}

inline void write_json(const std::filesystem::path& target, const nlohmann::json& doc) {
    write_atomic(target, doc.dump(2) + "\n");
}

/// Shortest round-trip formatting, empty for non-finite values.
inline std::string csv_number(double v) {
    if (!std::isfinite(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvBuilder {
public:
    template <class... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((emit(cells, first)), ...);
        out_ << '\n';
    }

    void raw_row(const std::string& line) { out_ << line << '\n'; }

    std::string str() const { return out_.str(); }

private:
    void emit(const std::string& s, bool& first) { sep(first), out_ << s; }
    void emit(const char* s, bool& first) { sep(first), out_ << s; }
    void emit(double v, bool& first) { sep(first), out_ << csv_number(v); }
    void emit(int v, bool& first) { sep(first), out_ << v; }
    void emit(std::size_t v, bool& first) { sep(first), out_ << v; }
    void emit(bool v, bool& first) { sep(first), out_ << (v ? 1 : 0); }

    void sep(bool& first) {
        if (!first) out_ << ',';
        first = false;
    }

    std::ostringstream out_;
};

}  // namespace confsol::report
