#pragma once

// Fixed-format MPS writer and reader for the solver exchange files, plus the
// adapter solution format: one status line followed by "name value" pairs.
// Section order on write is NAME, OBJSENSE, ROWS, COLUMNS (with INTORG/INTEND
// markers around integer columns), RHS, BOUNDS, ENDATA, always in that order.

#include "milp.hpp"

#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rvpp {

struct NameCollision : std::runtime_error {
    explicit NameCollision(const std::string& n)
        : std::runtime_error("MPS name collision after sanitization: " + n) {}
};

struct MalformedLine : std::runtime_error {
    MalformedLine(int line, const std::string& what)
        : std::runtime_error("malformed line " + std::to_string(line) + ": " + what),
          line_number(line) {}
    int line_number;
};

/// Maps an arbitrary identifier onto an MPS-legal token.
inline std::string mps_sanitize(const std::string& name) {
    std::string s;
    s.reserve(name.size());
    for (char c : name) {
        if (std::isalnum((unsigned char)c) || c == '_') s.push_back(c);
        else s.push_back('_');
    }
    if (s.empty() || std::isdigit((unsigned char)s[0])) s.insert(s.begin(), 'x');
    return s;
}

namespace detail {

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

} // namespace detail

/// Serializes the instance; also returns the sanitized column names in order
/// via `col_names` when the caller needs to map the solution back.
inline std::string write_mps(const MilpInstance& m, std::vector<std::string>* col_names = nullptr) {
    std::map<std::string, int> seen;
    std::vector<std::string> cn(m.num_vars()), rn(m.num_rows());
    auto unique_name = [&seen](const std::string& raw) {
        std::string s = mps_sanitize(raw);
        if (!seen.emplace(s, 1).second) throw NameCollision(s);
        return s;
    };
    for (int j = 0; j < m.num_vars(); ++j) cn[j] = unique_name(m.var(j).name);
    for (int i = 0; i < m.num_rows(); ++i)
        rn[i] = unique_name("R" + std::to_string(i) + "_" + m.row(i).tag);
    if (col_names) *col_names = cn;

    std::ostringstream os;
    os << "NAME          " << mps_sanitize(m.name) << "\n";
    os << "OBJSENSE\n    " << (m.maximize ? "MAX" : "MIN") << "\n";
    os << "ROWS\n";
    os << " N  OBJ\n";
    for (int i = 0; i < m.num_rows(); ++i) {
        char s = m.row(i).sense == RowSense::LE ? 'L' : m.row(i).sense == RowSense::GE ? 'G' : 'E';
        os << " " << s << "  " << rn[i] << "\n";
    }

    // column-wise coefficients
    std::vector<std::vector<std::pair<int, double>>> bycol(m.num_vars());
    for (int i = 0; i < m.num_rows(); ++i)
        for (const auto& [j, c] : m.row(i).coeffs)
            if (c != 0.0) bycol[j].emplace_back(i, c);

    os << "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    for (int j = 0; j < m.num_vars(); ++j) {
        const bool want_int = m.var(j).kind == VarKind::Binary;
        if (want_int != in_int) {
            os << "    MARKER" << marker++ << "  'MARKER'  "
               << (want_int ? "'INTORG'" : "'INTEND'") << "\n";
            in_int = want_int;
        }
        if (m.var(j).obj != 0.0)
            os << "    " << cn[j] << "  OBJ  " << detail::fmt_num(m.var(j).obj) << "\n";
        for (const auto& [i, c] : bycol[j])
            os << "    " << cn[j] << "  " << rn[i] << "  " << detail::fmt_num(c) << "\n";
        if (m.var(j).obj == 0.0 && bycol[j].empty())
            os << "    " << cn[j] << "  OBJ  0\n"; // keep the column declared
    }
    if (in_int) os << "    MARKER" << marker++ << "  'MARKER'  'INTEND'\n";

    os << "RHS\n";
    for (int i = 0; i < m.num_rows(); ++i)
        if (m.row(i).rhs != 0.0)
            os << "    RHS  " << rn[i] << "  " << detail::fmt_num(m.row(i).rhs) << "\n";

    os << "BOUNDS\n";
    for (int j = 0; j < m.num_vars(); ++j) {
        const auto& v = m.var(j);
        if (v.kind == VarKind::Binary) {
            os << " BV BND  " << cn[j] << "\n";
            continue;
        }
        const bool def_lb = v.lb == 0.0, def_ub = !std::isfinite(v.ub);
        if (def_lb && def_ub) continue;
        if (std::isfinite(v.lb) && v.lb == v.ub) {
            os << " FX BND  " << cn[j] << "  " << detail::fmt_num(v.lb) << "\n";
            continue;
        }
        if (!std::isfinite(v.lb)) os << " MI BND  " << cn[j] << "\n";
        else if (v.lb != 0.0) os << " LO BND  " << cn[j] << "  " << detail::fmt_num(v.lb) << "\n";
        if (std::isfinite(v.ub)) os << " UP BND  " << cn[j] << "  " << detail::fmt_num(v.ub) << "\n";
    }
    os << "ENDATA\n";
    return os.str();
}

/// Reads back the subset of MPS emitted by write_mps.
inline MilpInstance parse_mps(const std::string& text) {
    MilpInstance m;
    std::istringstream is(text);
    std::string line, section;
    std::map<std::string, int> row_of;
    std::map<std::string, char> row_sense;
    bool in_int = false;
    int lineno = 0;
    std::string objname = "OBJ";

    std::map<std::string, std::vector<std::pair<std::string, double>>> colcoef; // keeps insertion order below
    std::vector<std::string> colorder;
    std::map<std::string, double> colobj;
    std::map<std::string, bool> colint;
    std::map<std::string, std::pair<double, double>> bounds;
    std::vector<std::pair<std::string, double>> rhs;
    std::vector<std::pair<char, std::string>> rows;

    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '*') continue;
        if (!std::isspace((unsigned char)line[0])) {
            auto toks = detail::split_ws(line);
            section = toks[0];
            if (section == "NAME" && toks.size() > 1) m.name = toks[1];
            if (section == "ENDATA") break;
            continue;
        }
        auto toks = detail::split_ws(line);
        if (toks.empty()) continue;
        if (section == "OBJSENSE") {
            m.maximize = toks[0] == "MAX" || toks[0] == "MAXIMIZE";
        } else if (section == "ROWS") {
            if (toks.size() != 2) throw MalformedLine(lineno, "ROWS entry needs sense and name");
            if (toks[0] == "N") { objname = toks[1]; continue; }
            rows.emplace_back(toks[0][0], toks[1]);
            row_sense[toks[1]] = toks[0][0];
        } else if (section == "COLUMNS") {
            if (toks.size() >= 3 && toks[1] == "'MARKER'") {
                in_int = toks[2] == "'INTORG'";
                continue;
            }
            if (toks.size() < 3 || (toks.size() - 1) % 2 != 0)
                throw MalformedLine(lineno, "COLUMNS entry needs name then row/value pairs");
            const std::string& col = toks[0];
            if (!colcoef.count(col)) { colcoef[col]; colorder.push_back(col); colint[col] = in_int; }
            for (size_t k = 1; k + 1 < toks.size(); k += 2) {
                double v;
                try { v = std::stod(toks[k + 1]); }
                catch (...) { throw MalformedLine(lineno, "bad number " + toks[k + 1]); }
                if (toks[k] == objname) colobj[col] += v;
                else if (row_sense.count(toks[k])) colcoef[col].emplace_back(toks[k], v);
                else throw MalformedLine(lineno, "unknown row " + toks[k]);
            }
        } else if (section == "RHS") {
            if (toks.size() < 3 || (toks.size() - 1) % 2 != 0)
                throw MalformedLine(lineno, "RHS entry needs set name then row/value pairs");
            for (size_t k = 1; k + 1 < toks.size(); k += 2) {
                if (!row_sense.count(toks[k])) throw MalformedLine(lineno, "unknown row " + toks[k]);
                try { rhs.emplace_back(toks[k], std::stod(toks[k + 1])); }
                catch (...) { throw MalformedLine(lineno, "bad number " + toks[k + 1]); }
            }
        } else if (section == "BOUNDS") {
            if (toks.size() < 3) throw MalformedLine(lineno, "BOUNDS entry too short");
            const std::string& kind = toks[0];
            const std::string& col = toks[2];
            if (!colcoef.count(col)) throw MalformedLine(lineno, "unknown column " + col);
            auto& [lo, hi] = bounds.emplace(col, std::make_pair(0.0, kInf)).first->second;
            auto val = [&]() {
                if (toks.size() < 4) throw MalformedLine(lineno, "missing bound value");
                try { return std::stod(toks[3]); }
                catch (...) { throw MalformedLine(lineno, "bad number " + toks[3]); }
            };
            if (kind == "UP") hi = val();
            else if (kind == "LO") lo = val();
            else if (kind == "FX") { lo = hi = val(); }
            else if (kind == "MI") lo = -kInf;
            else if (kind == "PL") hi = kInf;
            else if (kind == "BV") { lo = 0.0; hi = 1.0; colint[col] = true; }
            else if (kind == "FR") { lo = -kInf; hi = kInf; }
            else throw MalformedLine(lineno, "unsupported bound kind " + kind);
        }
    }

    for (const auto& col : colorder) {
        double lo = 0.0, hi = kInf;
        if (auto it = bounds.find(col); it != bounds.end()) std::tie(lo, hi) = it->second;
        m.add_var(col, lo, hi, colint[col] ? VarKind::Binary : VarKind::Continuous, colobj[col]);
    }
    std::map<std::string, int> rowidx;
    for (const auto& [s, rname] : rows) {
        RowSense sense = s == 'L' ? RowSense::LE : s == 'G' ? RowSense::GE : RowSense::EQ;
        rowidx[rname] = m.add_row(rname, sense, 0.0, {});
    }
    for (const auto& col : colorder) {
        const int j = m.find_var(col);
        for (const auto& [rname, v] : colcoef[col]) {
            MilpRow& r = m.row(rowidx[rname]);
            r.coeffs.emplace_back(j, v);
        }
    }
    for (const auto& [rname, v] : rhs) m.row(rowidx[rname]).rhs = v;
    return m;
}

} // namespace rvpp
