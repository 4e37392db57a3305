#include "hsym/cli/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hsym::cli {

Section& RunReport::section(const std::string& title) {
    for (auto& s : symbolic)
        if (s.title == title) return s;
    symbolic.push_back({title, {}});
    return symbolic.back();
}

void RunReport::value(const std::string& label, double v) { numeric.emplace_back(label, fmt(v)); }

bool RunReport::check(const std::string& name, bool passed, const std::string& detail) {
    checks.push_back({name, passed, detail});
    return passed;
}

bool RunReport::passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

std::string RunReport::render_symbolic() const {
    std::ostringstream out;
    out << "problem: " << problem << " (" << kind << ")\n";
    for (const auto& s : symbolic) {
        out << "[" << s.title << "]\n";
        for (const auto& l : s.lines) out << l << "\n";
    }
    return out.str();
}

std::string RunReport::render() const {
    std::ostringstream out;
    out << "command: " << command << "\n";
    out << "spec: " << spec_hash << "\n";
    out << render_symbolic();
    if (!numeric.empty()) {
        out << "[numeric]\n";
        for (const auto& [k, v] : numeric) out << k << " = " << v << "\n";
    }
    if (!tables.empty()) {
        out << "[csv]\n";
        for (const auto& t : tables) out << t.name << ".csv (" << t.rows.size() << " rows)\n";
    }
    out << "[checks]\n";
    for (const auto& c : checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.detail.empty()) out << ": " << c.detail;
        out << "\n";
    }
    out << "result: " << (passed() ? "PASS" : "FAIL") << "\n";
    return out.str();
}

std::string fmt(double v) {
    if (v == 0.0) v = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

std::string fmt_fixed(double v, int digits) {
    if (v == 0.0) v = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void write_csv(const CsvTable& t, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / (t.name + ".csv");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    for (size_t i = 0; i < t.headers.size(); ++i) f << (i ? "," : "") << t.headers[i];
    f << "\n";
    char buf[64];
    for (const auto& row : t.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.12g", row[i] == 0.0 ? 0.0 : row[i]);
            f << (i ? "," : "") << buf;
        }
        f << "\n";
    }
}

std::string compare_golden(const std::string& path, const std::string& actual, bool update) {
    std::ifstream in(path, std::ios::binary);
    if (!in || update) {
        in.close();
        std::ofstream out(path, std::ios::binary);
        if (!out) return "cannot write golden file " + path;
        out << actual;
        return "";
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string expected = ss.str();
    if (expected == actual) return "";
    std::istringstream a(expected), b(actual);
    std::string la, lb;
    for (int line = 1;; ++line) {
        bool ga = static_cast<bool>(std::getline(a, la)), gb = static_cast<bool>(std::getline(b, lb));
        if (!ga && !gb) break;
        if (!ga || !gb || la != lb)
            return "golden mismatch at line " + std::to_string(line) + ": expected '" + (ga ? la : "<eof>") +
                   "', got '" + (gb ? lb : "<eof>") + "'";
    }
    return "golden mismatch";
}

} // namespace hsym::cli
