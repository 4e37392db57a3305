#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

namespace hsym::cli {

using namespace detail;

namespace {

RunReport header(const ProblemSpec& spec, const std::string& command) {
    RunReport r;
    r.problem = spec.name;
    r.kind = kind_name(spec.kind);
    r.spec_hash = spec.hash;
    r.command = command;
    return r;
}

// pipeline errors surface as failed checks
template <class F>
void guarded(RunReport& r, const std::string& stage, F&& f) {
    try {
        f();
    } catch (const SpecError&) {
        throw;
    } catch (const std::exception& e) {
        r.check(stage, false, e.what());
    }
}

} // namespace

RunReport run_derive(const ProblemSpec& spec) {
    RunReport r = header(spec, "derive");
    guarded(r, "derivation", [&] {
        switch (spec.kind) {
        case ProblemKind::OdeHiddenScale: derive_ode(spec, r); break;
        case ProblemKind::Switchback: derive_switchback(spec, r); break;
        case ProblemKind::PerturbationSymmetry: derive_symmetry(spec, r); break;
        case ProblemKind::Burgers: derive_burgers(spec, r); break;
        }
    });
    return r;
}

RunReport run_validate(const ProblemSpec& spec, const RunOptions& opts) {
    RunReport r = header(spec, "validate");
    guarded(r, "validation", [&] {
        switch (spec.kind) {
        case ProblemKind::OdeHiddenScale: validate_ode(spec, opts, r); break;
        case ProblemKind::Switchback: validate_switchback(spec, opts, r); break;
        case ProblemKind::PerturbationSymmetry: validate_symmetry(spec, opts, r); break;
        case ProblemKind::Burgers: validate_burgers(spec, opts, r); break;
        }
    });
    return r;
}

std::map<std::string, double> point_metrics(const ProblemSpec& spec, const std::map<std::string, double>& params) {
    switch (spec.kind) {
    case ProblemKind::OdeHiddenScale: return metrics_ode(spec, params);
    case ProblemKind::Switchback: return metrics_switchback(spec, params);
    case ProblemKind::PerturbationSymmetry: return metrics_symmetry(spec, params);
    case ProblemKind::Burgers: return metrics_burgers(spec, params);
    }
    return {};
}

std::vector<SweepPoint> run_sweep(const ProblemSpec& spec, unsigned threads) {
    std::vector<std::pair<std::string, std::vector<double>>> axes;
    for (const auto& [k, v] : spec.entries)
        if (k.rfind("sweep.", 0) == 0) axes.emplace_back(k.substr(6), spec.numbers(k));
    if (axes.empty()) throw std::invalid_argument(spec.origin + ": no sweep.<parameter> lists to sweep");

    std::vector<SweepPoint> points(1);
    for (const auto& [sym, values] : axes) {
        std::vector<SweepPoint> next;
        for (const auto& p : points)
            for (double v : values) {
                SweepPoint q = p;
                q.params[sym] = v;
                next.push_back(std::move(q));
            }
        points = std::move(next);
    }

    if (threads == 0) threads = 1;
    for (size_t start = 0; start < points.size(); start += threads) {
        std::vector<std::future<void>> batch;
        for (size_t i = start; i < std::min(points.size(), start + threads); ++i)
            batch.push_back(std::async(std::launch::async, [&spec, &pt = points[i]] {
                try {
                    pt.metrics = point_metrics(spec, pt.params);
                } catch (const std::exception& e) {
                    pt.error = e.what();
                }
            }));
        for (auto& f : batch) f.get();
    }
    return points;
}

RunReport sweep_report(const ProblemSpec& spec, const std::vector<SweepPoint>& points) {
    RunReport r = header(spec, "sweep");
    std::vector<std::string> metric_names;
    for (const auto& p : points)
        for (const auto& [k, v] : p.metrics)
            if (std::find(metric_names.begin(), metric_names.end(), k) == metric_names.end()) metric_names.push_back(k);
    CsvTable t{spec.name + "_sweep", {}, {}};
    if (!points.empty())
        for (const auto& [k, v] : points.front().params) t.headers.push_back(k);
    for (const auto& m : metric_names) t.headers.push_back(m);
    for (const auto& p : points) {
        std::string label;
        std::vector<double> row;
        for (const auto& [k, v] : p.params) {
            label += (label.empty() ? "" : ",") + k + "=" + fmt(v);
            row.push_back(v);
        }
        for (const auto& m : metric_names) {
            auto it = p.metrics.find(m);
            row.push_back(it == p.metrics.end() ? NAN : it->second);
            if (it != p.metrics.end()) r.value(m + "(" + label + ")", it->second);
        }
        r.check("point " + label, p.error.empty(), p.error);
        t.rows.push_back(std::move(row));
    }
    r.tables.push_back(std::move(t));
    return r;
}

} // namespace hsym::cli
