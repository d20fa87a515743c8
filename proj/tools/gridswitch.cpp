// gridswitch: contingency analysis with corrective transmission switching.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridswitch/gridswitch.hpp"

namespace {

enum ExitCode { Ok = 0, InputError = 1, BaseCaseFailure = 2, InternalError = 3 };

}  // namespace

int main(int argc, char** argv) {
    using namespace gridswitch;
    CLI::App app{"Contingency analysis with corrective transmission switching"};
    app.set_version_flag("--version", "gridswitch 0.3.0");

    RunConfig cfg;
    std::string mode = "tntc", format = "human", out_path, sens_path;
    std::vector<std::string> methods;
    bool include_overloaded = false, no_q_limits = false;

    app.add_option("--case", cfg.case_path, "MATPOWER case file")->required()->check(CLI::ExistingFile);
    app.add_option("--mode", mode, "powerflow, rtca or tntc")
        ->check(CLI::IsMember({"powerflow", "rtca", "tntc"}))
        ->capture_default_str();
    app.add_option("--method", methods, "Ranking method: tsdf:N, ftdf:N or ce (repeatable)");
    app.add_option("--top-k", cfg.tntc.top_k, "Solutions kept per contingency")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--tol", cfg.solver.tol, "Power flow mismatch tolerance, p.u.")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--max-iter", cfg.solver.max_iter, "Newton iterations per pass")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--qlim-passes", cfg.solver.qlim_passes, "Reactive-limit switching passes")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app.add_flag("--no-q-limits", no_q_limits, "Ignore generator reactive limits");
    app.add_option("--switch-tol", cfg.tntc.tolerance, "Violation comparison tolerance, MVA")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app.add_flag("--include-overloaded", include_overloaded, "Allow overloaded lines as switching candidates");
    app.add_option("--workers", cfg.workers, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--format", format, "human, delimited or structured")
        ->check(CLI::IsMember({"human", "delimited", "structured"}))
        ->capture_default_str();
    app.add_option("--out", out_path, "Output file (default: standard output)");
    app.add_option("--sensitivity", sens_path, "Write TSDF/FTDF factors of critical contingencies to a CSV file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? Ok : InputError;
    }

    try {
        cfg.mode = parse_mode(mode);
        cfg.format = parse_format(format);
        cfg.solver.enforce_q_limits = !no_q_limits;
        cfg.tntc.exclude_overloaded = !include_overloaded;
        for (const std::string& m : methods) cfg.methods.push_back(parse_method(m));
        if (cfg.mode == RunMode::Tntc && cfg.methods.empty()) cfg.methods.push_back(parse_method("ftdf:20"));
        if (!out_path.empty()) cfg.output_path = out_path;
        if (!sens_path.empty()) cfg.sensitivity_path = sens_path;

        const RunReport report = run_pipeline(cfg);
        emit_report(report, cfg.format, cfg.output_path, std::cout);
        return Ok;
    } catch (const BaseCaseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return BaseCaseFailure;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return InputError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return InternalError;
    }
}
