#pragma once

// Minimal RFC-4180 CSV reading/writing for report files and config side-files.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rvpp {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& w) : std::runtime_error(w) {}
};

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    size_t i = 0;
    auto end_field = [&] { row.push_back(field); field.clear(); };
    auto end_row = [&] {
        end_field();
        rows.push_back(row);
        row.clear();
    };
    while (i < text.size()) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') { field += '"'; i += 2; continue; }
                quoted = false;
                ++i;
            } else { field += c; ++i; }
        } else if (c == '"') { quoted = true; ++i; }
        else if (c == ',') { end_field(); ++i; }
        else if (c == '\r') { ++i; }
        else if (c == '\n') { end_row(); ++i; }
        else { field += c; ++i; }
    }
    if (!field.empty() || !row.empty()) end_row();
    return rows;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

/// Writes atomically: temp file in the same directory, then rename.
inline void write_text_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + tmp);
        f << content;
        if (!f) throw IoError("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot rename onto " + path);
}

} // namespace rvpp
