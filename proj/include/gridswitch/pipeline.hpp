#pragma once

// End-to-end run: base case, contingency scan, critical selection, switching.

#include <chrono>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "gridswitch/branch_flow.hpp"
#include "gridswitch/error.hpp"
#include "gridswitch/matpower.hpp"
#include "gridswitch/network.hpp"
#include "gridswitch/power_flow.hpp"
#include "gridswitch/rtca.hpp"
#include "gridswitch/tntc.hpp"
#include "gridswitch/validation.hpp"

namespace gridswitch {

enum class RunMode { PowerFlow, Rtca, Tntc };
enum class OutputFormat { Human, Delimited, Structured };

/// The base case could not be solved; nothing downstream can run.
class BaseCaseError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    std::string case_path;
    RunMode mode = RunMode::Tntc;
    std::vector<RankingMethod> methods;
    SolverParams solver{};
    TntcOptions tntc{};
    unsigned workers = 1;
    OutputFormat format = OutputFormat::Human;
    std::optional<std::string> output_path;
    std::optional<std::string> sensitivity_path;  // CSV of factors for critical contingencies
};

struct BaseSummary {
    std::string case_name;
    std::size_t buses = 0, branches = 0, generators = 0;
    bool converged = false;
    int iterations = 0;
    double max_mismatch = 0.0;    // p.u.
    double total_load_mw = 0.0;
    double total_generation_mw = 0.0;
    double losses_mw = 0.0;
    double slack_p_mw = 0.0, slack_q_mvar = 0.0;
    std::size_t q_limited_buses = 0;
    std::size_t voltage_violations = 0;
    ViolationSet normal_violations;
    std::vector<std::string> warnings;
};

struct StageTiming {
    double parse = 0.0, base = 0.0, rtca = 0.0;
    std::vector<double> tntc;  // per method
};

struct MethodResult {
    RankingMethod method;
    TntcRun run;
};

struct RunReport {
    RunConfig config;
    BaseSummary base;
    std::optional<RtcaReport> rtca;
    std::vector<MethodResult> tntc;
    StageTiming timing;
};

[[nodiscard]] inline BaseSummary summarize_base(const NetworkCase& c, const PowerFlowSolution& sol) {
    BaseSummary s;
    s.case_name = c.name();
    s.buses = c.bus_count();
    s.branches = c.branch_count();
    s.generators = c.generator_count();
    s.converged = sol.converged;
    s.iterations = sol.iterations;
    s.max_mismatch = sol.max_mismatch;
    for (const Bus& b : c.buses()) s.total_load_mw += b.active_load;
    if (!sol.converged) return s;
    s.slack_p_mw = sol.slack_injection.real();
    s.slack_q_mvar = sol.slack_injection.imag();
    const auto slack = c.slack_bus();
    for (std::size_t g = 0; g < c.generator_count(); ++g) {
        const Generator& gen = c.generators()[g];
        if (gen.in_service && (!slack || gen.bus != *slack)) s.total_generation_mw += gen.p_set;
    }
    s.total_generation_mw += s.slack_p_mw;
    double shunt = 0.0;
    for (std::size_t i = 0; i < c.bus_count(); ++i)
        shunt += c.buses()[i].shunt_conductance * sol.v_mag[i] * sol.v_mag[i];
    s.losses_mw = s.total_generation_mw - s.total_load_mw - shunt;
    s.q_limited_buses = sol.q_limited.size();
    s.voltage_violations = check_voltage_limits(sol.v_mag, c).size();
    s.normal_violations = check_limits(sol.branch_flows, c, RatingTier::Normal);
    return s;
}

/// Executes the configured stages. Throws ParseError/ValidationError for bad
/// input, BaseCaseError when the base power flow fails.
[[nodiscard]] inline RunReport run_pipeline(const RunConfig& config) {
    using clock = std::chrono::steady_clock;
    auto seconds = [](clock::time_point t0) { return std::chrono::duration<double>(clock::now() - t0).count(); };
    if (config.mode == RunMode::Tntc && config.methods.empty())
        throw ValidationError("mode tntc needs at least one ranking method");
    if (config.tntc.top_k < 1) throw ValidationError("top-k must be at least 1");

    RunReport rep;
    rep.config = config;

    auto t0 = clock::now();
    const NetworkCase c = load_case(config.case_path);
    const ValidationReport v = validate_case(c);
    if (!v.ok()) {
        std::string msg = "invalid case '" + config.case_path + "':";
        for (const std::string& e : v.errors) msg += "\n  " + e;
        throw ValidationError(msg);
    }
    rep.timing.parse = seconds(t0);

    t0 = clock::now();
    const PowerFlowSolution base = solve_power_flow(c, {}, nullptr, config.solver);
    rep.timing.base = seconds(t0);
    rep.base = summarize_base(c, base);
    rep.base.warnings = v.warnings;
    if (!base.converged) throw BaseCaseError("base-case power flow failed: " + base.diagnostic);
    if (config.mode == RunMode::PowerFlow) return rep;

    t0 = clock::now();
    rep.rtca = run_rtca(c, base, build_contingency_list(c), config.solver, config.workers);
    rep.timing.rtca = seconds(t0);
    if (config.mode == RunMode::Rtca) return rep;

    if (config.sensitivity_path) {
        std::vector<SensitivityRecord> records;
        for (std::size_t i : rep.rtca->critical) {
            auto part = sensitivity_records(c, rep.rtca->results[i], config.tntc);
            records.insert(records.end(), part.begin(), part.end());
        }
        std::ofstream out(*config.sensitivity_path);
        if (!out) throw Error("cannot open sensitivity file '" + *config.sensitivity_path + "' for writing");
        write_sensitivity_table(out, records);
    }

    for (const RankingMethod& m : config.methods) {
        t0 = clock::now();
        rep.tntc.push_back({m, run_tntc(c, *rep.rtca, m, config.tntc, config.solver, config.workers)});
        rep.timing.tntc.push_back(seconds(t0));
    }
    return rep;
}

}  // namespace gridswitch
