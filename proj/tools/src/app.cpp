#include "hsym/cli/app.hpp"

#include "hsym/cli/pipelines.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <ostream>
#include <thread>

namespace hsym::cli {

namespace {

std::string golden_path(const ProblemSpec& spec, const std::string& explicit_path) {
    if (!explicit_path.empty()) return explicit_path;
    return std::filesystem::path(spec.origin).replace_extension(".golden").string();
}

int finish(const RunReport& r, const ProblemSpec& spec, bool check, bool update, const std::string& golden,
           const std::string& csv_dir, std::ostream& out) {
    RunReport rep = r;
    if (check || update) {
        const std::string path = golden_path(spec, golden);
        const std::string diag = compare_golden(path, rep.render_symbolic(), update);
        rep.check("golden " + std::filesystem::path(path).filename().string(), diag.empty(), diag);
    }
    if (!csv_dir.empty())
        for (const auto& t : rep.tables) write_csv(t, csv_dir);
    out << rep.render();
    return rep.passed() ? 0 : 1;
}

} // namespace

int run_app(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"hidden scale symmetry derivations and validation"};
    app.require_subcommand(1);

    std::string spec_path, csv_dir, golden;
    bool check = false, update = false, textbook = false;
    unsigned seed = RunOptions{}.seed;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());

    auto* derive = app.add_subcommand("derive", "symbolic pipeline: series, painting, FT system, flows, uniform solution");
    auto* validate = app.add_subcommand("validate", "symbolic pipeline plus numeric oracles and checks");
    auto* sweep = app.add_subcommand("sweep", "error metrics over the sweep.<parameter> lists");
    for (auto* sc : {derive, validate, sweep}) {
        sc->add_option("spec", spec_path, "problem spec file")->required()->check(CLI::ExistingFile);
        sc->add_option("--csv-dir", csv_dir, "directory for CSV output");
    }
    for (auto* sc : {derive, validate}) {
        sc->add_flag("--check", check, "compare the symbolic report with the golden file");
        sc->add_flag("--update-golden", update, "rewrite the golden file");
        sc->add_option("--golden", golden, "golden file (default: spec path with .golden)");
    }
    validate->add_flag("--compare-textbook", textbook, "include the textbook strained coordinate");
    validate->add_option("--seed", seed, "seed for randomized checks");
    sweep->add_option("--threads", threads, "parallel parameter points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        const ProblemSpec spec = parse_spec(spec_path);
        if (derive->parsed()) return finish(run_derive(spec), spec, check, update, golden, csv_dir, out);
        if (validate->parsed()) {
            RunOptions opts;
            opts.numeric = true;
            opts.compare_textbook = textbook;
            opts.seed = seed;
            return finish(run_validate(spec, opts), spec, check, update, golden, csv_dir, out);
        }
        auto points = run_sweep(spec, threads);
        return finish(sweep_report(spec, points), spec, false, false, "", csv_dir, out);
    } catch (const SpecError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace hsym::cli
