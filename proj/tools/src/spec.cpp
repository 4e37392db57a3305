#include "hsym/cli/spec.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hsym::cli {

namespace {

const std::set<std::string> kFixedKeys = {
    "problem.name", "problem.kind", "problem.description",
    "equation.var", "equation.dep", "equation.param", "equation.lhs",
    "symbols.parameters", "symbols.constants", "symbols.functions",
    "method.order", "method.n_derivs", "method.paint", "method.most_divergent",
    "method.reference_order", "method.unknowns", "method.order_assumptions", "method.frozen",
    "method.drop_in_forcing", "method.zeroth_names", "method.zeroth_template", "method.post",
    "method.dimension", "method.delta", "method.profile",
    "ics.at",
    "bcs.left", "bcs.left_value", "bcs.right", "bcs.right_value",
    "ansatz.switch", "ansatz.directions", "ansatz.dependent", "ansatz.shapes", "ansatz.match", "ansatz.rules",
    "validation.grid", "validation.window", "validation.times", "validation.x_max", "validation.points",
    "validation.ratio", "validation.cells", "validation.step", "validation.order",
    "tol.sup_error", "tol.order_min", "tol.order_max", "tol.bare_ratio", "tol.drift", "tol.textbook_ratio",
    "tol.oracle", "tol.closed_form", "tol.series", "tol.ratio_min", "tol.ratio_max",
};

const std::set<std::string> kOrderKeys = {"mode", "names", "template"};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool is_ident(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

// dep followed only by primes
int prime_count(const std::string& s, const std::string& dep) {
    if (s.compare(0, dep.size(), dep) != 0) return -1;
    for (size_t i = dep.size(); i < s.size(); ++i)
        if (s[i] != '\'') return -1;
    return static_cast<int>(s.size() - dep.size());
}

} // namespace

std::string kind_name(ProblemKind k) {
    switch (k) {
    case ProblemKind::OdeHiddenScale: return "ode-hidden-scale";
    case ProblemKind::Switchback: return "switchback";
    case ProblemKind::PerturbationSymmetry: return "perturbation-symmetry";
    case ProblemKind::Burgers: return "burgers";
    }
    return "?";
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::optional<double> parse_number(const std::string& s) {
    std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    for (char c : t)
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' || c == '+' || c == '-'))
            return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) return std::nullopt;
    return v;
}

void ProblemSpec::fail(const std::string& key, const std::string& msg) const {
    auto it = entries.find(key);
    throw SpecError(origin, it == entries.end() ? 0 : it->second.line, msg);
}

std::string ProblemSpec::str(const std::string& key, const std::string& fallback) const {
    auto it = entries.find(key);
    return it == entries.end() ? fallback : it->second.text;
}

double ProblemSpec::number(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) throw SpecError(origin, 0, "missing required key " + key);
    auto v = parse_number(it->second.text);
    if (!v) fail(key, "malformed number '" + it->second.text + "' for " + key);
    return *v;
}

double ProblemSpec::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

int ProblemSpec::integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    double v = number(key);
    if (v != static_cast<int>(v)) fail(key, "expected an integer for " + key);
    return static_cast<int>(v);
}

bool ProblemSpec::flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& t = entries.at(key).text;
    if (t == "true" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "no" || t == "0") return false;
    fail(key, "expected true or false for " + key);
}

std::vector<std::string> ProblemSpec::list(const std::string& key) const {
    return has(key) ? split_list(entries.at(key).text) : std::vector<std::string>{};
}

std::vector<double> ProblemSpec::numbers(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : list(key)) {
        auto v = parse_number(s);
        if (!v) fail(key, "malformed number '" + s + "' in " + key);
        out.push_back(*v);
    }
    return out;
}

exprcore::Expr ProblemSpec::expr(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) throw SpecError(origin, 0, "missing required key " + key);
    try {
        return exprcore::parse(it->second.text);
    } catch (const std::exception& e) {
        fail(key, std::string("cannot parse ") + key + ": " + e.what());
    }
}

std::vector<double> ProblemSpec::grid(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) throw SpecError(origin, 0, "missing required key " + key);
    std::vector<std::string> parts;
    std::stringstream ss(it->second.text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) fail(key, "grid " + key + " must be a:b:n");
    auto a = parse_number(parts[0]), b = parse_number(parts[1]), n = parse_number(parts[2]);
    if (!a || !b || !n) fail(key, "malformed number in grid " + key);
    if (*n < 2 || *n != static_cast<long>(*n)) fail(key, "grid " + key + " needs an integer count >= 2");
    std::vector<double> out;
    const long count = static_cast<long>(*n);
    for (long i = 0; i < count; ++i) out.push_back(*a + (*b - *a) * static_cast<double>(i) / static_cast<double>(count - 1));
    return out;
}

std::map<std::string, exprcore::Q> ProblemSpec::rationals(const std::string& key) const {
    std::map<std::string, exprcore::Q> out;
    for (const auto& item : list(key)) {
        auto colon = item.find(':');
        if (colon == std::string::npos) fail(key, "expected sym:p/q in " + key);
        std::string sym = trim(item.substr(0, colon)), val = trim(item.substr(colon + 1));
        try {
            exprcore::Q q(val);
            q.canonicalize();
            out[sym] = q;
        } catch (const std::exception&) {
            fail(key, "malformed number '" + val + "' in " + key);
        }
    }
    return out;
}

std::map<std::string, double> ProblemSpec::parameter_values() const {
    std::map<std::string, double> out;
    for (const auto& [k, v] : entries)
        if (k.rfind("params.", 0) == 0) out[k.substr(7)] = number(k);
    return out;
}

std::vector<std::pair<int, double>> ProblemSpec::initial_conditions() const {
    std::vector<std::pair<int, double>> out;
    for (const auto& [k, v] : entries) {
        if (k.rfind("ics.", 0) != 0 || k == "ics.at") continue;
        out.emplace_back(prime_count(k.substr(4), dep), number(k));
    }
    std::sort(out.begin(), out.end());
    return out;
}

ProblemSpec parse_spec_text(const std::string& text, const std::string& origin) {
    ProblemSpec s;
    s.origin = origin;
    s.hash = fnv1a_hex(text);

    std::istringstream in(text);
    int lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        auto hashpos = line.find('#');
        if (hashpos != std::string::npos) line.resize(hashpos);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw SpecError(origin, lineno, "expected 'section.key = value'");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        auto dot = key.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == key.size())
            throw SpecError(origin, lineno, "expected 'section.key = value'");
        if (value.empty()) throw SpecError(origin, lineno, "empty value for " + key);
        std::string section = key.substr(0, dot), name = key.substr(dot + 1);
        bool known = kFixedKeys.count(key) > 0;
        if (!known && (section == "params" || section == "sweep")) known = is_ident(name);
        if (!known && section == "ics") known = !name.empty();
        if (!known && section.size() > 5 && section.rfind("order", 0) == 0 &&
            section.find_first_not_of("0123456789", 5) == std::string::npos)
            known = kOrderKeys.count(name) > 0;
        if (!known) throw SpecError(origin, lineno, "unknown key " + key);
        if (s.entries.count(key)) throw SpecError(origin, lineno, "duplicate key " + key);
        s.entries[key] = {value, lineno};
    }

    if (!s.has("problem.name")) throw SpecError(origin, 0, "missing required key problem.name");
    if (!s.has("problem.kind")) throw SpecError(origin, 0, "missing required key problem.kind");
    s.name = s.str("problem.name");
    const std::string kind = s.str("problem.kind");
    if (kind == "ode-hidden-scale") s.kind = ProblemKind::OdeHiddenScale;
    else if (kind == "switchback") s.kind = ProblemKind::Switchback;
    else if (kind == "perturbation-symmetry") s.kind = ProblemKind::PerturbationSymmetry;
    else if (kind == "burgers") s.kind = ProblemKind::Burgers;
    else s.fail("problem.kind", "unknown problem kind '" + kind + "'");

    s.var = s.str("equation.var", s.var);
    s.dep = s.str("equation.dep", s.dep);
    s.param = s.str("equation.param", s.param);
    s.parameters = s.list("symbols.parameters");
    s.constants = s.list("symbols.constants");
    s.functions = s.list("symbols.functions");

    std::set<std::string> params(s.parameters.begin(), s.parameters.end());
    params.insert(s.param);
    std::set<std::string> declared = params;
    for (const auto* l : {&s.constants, &s.functions})
        declared.insert(l->begin(), l->end());
    declared.insert(s.var);
    declared.insert(s.dep);
    declared.insert("mu");
    declared.insert("pi");
    for (const auto& key : {"method.zeroth_names", "ansatz.directions"})
        for (const auto& n : s.list(key)) declared.insert(n);
    if (s.has("ansatz.switch")) declared.insert(s.str("ansatz.switch"));
    for (const auto& [k, v] : s.entries)
        if (k.size() > 6 && k.rfind("order", 0) == 0 && k.substr(k.find('.')) == ".names")
            for (const auto& n : s.list(k)) declared.insert(n);
    for (const auto& r : s.list("ansatz.rules")) {
        auto colon = r.find(':');
        if (colon == std::string::npos) s.fail("ansatz.rules", "expected sym:derivative in ansatz.rules");
    }

    auto check_symbols = [&](const std::string& key, const exprcore::Expr& e) {
        for (const auto& sym : e.symbols()) {
            if (declared.count(sym) || prime_count(sym, s.dep) >= 0) continue;
            s.fail(key, "undeclared symbol '" + sym + "' in " + key);
        }
    };
    for (const auto& [k, v] : s.entries) {
        bool is_expr = k == "equation.lhs" || k == "method.zeroth_template" ||
                       (k.rfind("order", 0) == 0 && k.size() > 9 && k.substr(k.find('.')) == ".template");
        if (is_expr) check_symbols(k, s.expr(k));
        if (k == "ansatz.shapes")
            for (const auto& item : s.list(k)) {
                try {
                    check_symbols(k, exprcore::parse(item));
                } catch (const exprcore::ParseError& e) {
                    s.fail(k, std::string("cannot parse ansatz.shapes: ") + e.what());
                }
            }
        if (k.rfind("params.", 0) == 0 || k.rfind("sweep.", 0) == 0) {
            std::string sym = k.substr(k.find('.') + 1);
            if (!params.count(sym)) s.fail(k, "undeclared symbol '" + sym + "' in " + k);
            if (k[0] == 'p') s.number(k);
            else if (s.numbers(k).empty()) s.fail(k, "empty sweep list " + k);
        }
        if (k.rfind("ics.", 0) == 0 && k != "ics.at") {
            if (prime_count(k.substr(4), s.dep) < 0) s.fail(k, "undeclared symbol '" + k.substr(4) + "' in " + k);
            s.number(k);
        }
        if (k.rfind("tol.", 0) == 0 || k == "ics.at" || k == "validation.x_max" || k == "validation.ratio" ||
            k == "method.order" || k == "method.n_derivs" || k == "method.reference_order" ||
            k == "validation.points" || k == "validation.order" || k == "validation.cells" || k == "validation.step" || k == "method.dimension" || k == "method.delta" ||
            k == "bcs.left" || k == "bcs.left_value" || k == "bcs.right" || k == "bcs.right_value")
            s.number(k);
        if (k == "validation.times") s.numbers(k);
        if (k == "validation.grid" || k == "validation.window") s.grid(k);
        if (k == "method.order_assumptions") s.rationals(k);
    }
    return s;
}

ProblemSpec parse_spec(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw SpecError(path, 0, "cannot open spec file");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_spec_text(ss.str(), path);
}

} // namespace hsym::cli
