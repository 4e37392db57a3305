#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace hsym::cli {

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct Section {
    std::string title;
    std::vector<std::string> lines;
};

struct CsvTable {
    std::string name;                        // file stem
    std::vector<std::string> headers;
    std::vector<std::vector<double>> rows;
};

struct RunReport {
    std::string problem;
    std::string kind;
    std::string spec_hash;
    std::string command;
    std::vector<Section> symbolic;
    std::vector<std::pair<std::string, std::string>> numeric;
    std::vector<Check> checks;
    std::vector<CsvTable> tables;

    Section& section(const std::string& title);
    void line(const std::string& title, const std::string& text) { section(title).lines.push_back(text); }
    void value(const std::string& label, double v);
    void value(const std::string& label, const std::string& v) { numeric.emplace_back(label, v); }
    bool check(const std::string& name, bool passed, const std::string& detail = "");
    bool passed() const;

    std::string render_symbolic() const;   // golden file content
    std::string render() const;
};

// %.6e, with -0 printed as 0
std::string fmt(double v);
std::string fmt_fixed(double v, int digits);

void write_csv(const CsvTable& t, const std::string& dir);

// Reads the golden file; a missing file is created from `actual`. Returns the diagnostic
// for a mismatch, empty on agreement.
std::string compare_golden(const std::string& path, const std::string& actual, bool update);

} // namespace hsym::cli
