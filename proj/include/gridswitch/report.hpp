#pragma once

// Report emission: human tables, delimited rows, structured JSON (with reader).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridswitch/error.hpp"
#include "gridswitch/pipeline.hpp"

namespace gridswitch {

inline constexpr int report_schema_version = 1;

[[nodiscard]] inline const char* to_string(RunMode m) {
    switch (m) {
        case RunMode::PowerFlow: return "powerflow";
        case RunMode::Rtca: return "rtca";
        case RunMode::Tntc: return "tntc";
    }
    return "?";
}
[[nodiscard]] inline const char* to_string(OutputFormat f) {
    switch (f) {
        case OutputFormat::Human: return "human";
        case OutputFormat::Delimited: return "delimited";
        case OutputFormat::Structured: return "structured";
    }
    return "?";
}
[[nodiscard]] inline RunMode parse_mode(const std::string& s) {
    if (s == "powerflow") return RunMode::PowerFlow;
    if (s == "rtca") return RunMode::Rtca;
    if (s == "tntc") return RunMode::Tntc;
    throw ValidationError("unknown mode '" + s + "'");
}
[[nodiscard]] inline OutputFormat parse_format(const std::string& s) {
    if (s == "human") return OutputFormat::Human;
    if (s == "delimited") return OutputFormat::Delimited;
    if (s == "structured") return OutputFormat::Structured;
    throw ValidationError("unknown format '" + s + "'");
}
[[nodiscard]] inline const char* to_string(ContingencyKind k) {
    return k == ContingencyKind::Generator ? "generator" : "branch";
}

using Json = nlohmann::ordered_json;

namespace report_detail {

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }
inline double number_from(const Json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline Json violations_json(const ViolationSet& vs) {
    Json arr = Json::array();
    for (const Violation& v : vs.entries)
        arr.push_back({{"branch", v.branch.value}, {"loading", v.loading}, {"rating", v.rating}, {"excess", v.excess}});
    return {{"total_excess", vs.total_excess}, {"entries", arr}};
}
inline ViolationSet violations_from(const Json& j) {
    ViolationSet vs;
    vs.total_excess = j.at("total_excess").get<double>();
    for (const Json& e : j.at("entries"))
        vs.entries.push_back({BranchId{e.at("branch").get<int>()}, e.at("loading").get<double>(),
                              e.at("rating").get<double>(), e.at("excess").get<double>()});
    return vs;
}

inline Json contingency_json(const Contingency& c) {
    return {{"kind", to_string(c.kind)}, {"element", c.element}, {"label", c.label}};
}
inline Contingency contingency_from(const Json& j) {
    return {j.at("kind").get<std::string>() == "generator" ? ContingencyKind::Generator : ContingencyKind::Branch,
            j.at("element").get<int>(), j.at("label").get<std::string>()};
}

inline Json stats_json(const ViolationStats& s) {
    return {{"count", s.count}, {"max", s.max},       {"min", s.min},
            {"mean", s.mean},   {"median", s.median}, {"stddev", s.stddev}};
}
inline ViolationStats stats_from(const Json& j) {
    return {j.at("count").get<std::size_t>(), j.at("max").get<double>(),    j.at("min").get<double>(),
            j.at("mean").get<double>(),       j.at("median").get<double>(), j.at("stddev").get<double>()};
}

inline Json evaluation_json(const SwitchEvaluation& e) {
    Json lines = Json::array();
    for (const LineReduction& l : e.line_vrp) lines.push_back({{"branch", l.branch.value}, {"vrp", l.vrp}});
    return {{"branch", e.branch.value},
            {"depth", e.depth},
            {"solved", e.solved},
            {"pareto", e.pareto},
            {"vrp", e.vrp},
            {"line_vrp", lines},
            {"total_excess_after", e.total_excess_after},
            {"loading_after_worst", e.loading_after_worst},
            {"post_violations", violations_json(e.post_violations)}};
}
inline SwitchEvaluation evaluation_from(const Json& j, const Contingency& c) {
    SwitchEvaluation e;
    e.contingency = c;
    e.branch = BranchId{j.at("branch").get<int>()};
    e.depth = j.at("depth").get<int>();
    e.solved = j.at("solved").get<bool>();
    e.pareto = j.at("pareto").get<bool>();
    e.vrp = j.at("vrp").get<double>();
    for (const Json& l : j.at("line_vrp")) e.line_vrp.push_back({BranchId{l.at("branch").get<int>()}, l.at("vrp").get<double>()});
    e.total_excess_after = j.at("total_excess_after").get<double>();
    e.loading_after_worst = j.at("loading_after_worst").get<double>();
    e.post_violations = violations_from(j.at("post_violations"));
    return e;
}

inline Json summary_json(const TntcSummary& s) {
    Json depth = Json::array();
    for (double d : s.average_depth) depth.push_back(number_or_null(d));
    return {{"contingencies", s.contingencies},
            {"epsilon", s.epsilon},
            {"mu", s.mu},
            {"n1", s.n1},
            {"n2", s.n2},
            {"n3", s.n3},
            {"average_vrp", s.average_vrp},
            {"total_excess_before", s.total_excess_before},
            {"total_excess_after", s.total_excess_after},
            {"average_depth", depth}};
}
inline TntcSummary summary_from(const Json& j, const RankingMethod& m) {
    TntcSummary s;
    s.method = m;
    s.contingencies = j.at("contingencies").get<std::size_t>();
    s.epsilon = j.at("epsilon").get<double>();
    s.mu = j.at("mu").get<double>();
    s.n1 = j.at("n1").get<std::size_t>();
    s.n2 = j.at("n2").get<std::size_t>();
    s.n3 = j.at("n3").get<std::size_t>();
    s.average_vrp = j.at("average_vrp").get<std::vector<double>>();
    s.total_excess_before = j.at("total_excess_before").get<double>();
    s.total_excess_after = j.at("total_excess_after").get<std::vector<double>>();
    for (const Json& d : j.at("average_depth")) s.average_depth.push_back(number_from(d));
    return s;
}

}  // namespace report_detail

/// Structured report. Execution details (worker count, timings) are kept in a
/// separate block so reports of identical runs compare byte-for-byte without it.
[[nodiscard]] inline Json report_to_json(const RunReport& r, bool include_execution = true) {
    using namespace report_detail;
    const RunConfig& cfg = r.config;
    Json methods = Json::array();
    for (const RankingMethod& m : cfg.methods) methods.push_back(m.name());
    Json j;
    j["schema"] = "gridswitch.report";
    j["schema_version"] = report_schema_version;
    j["config"] = {{"case_path", cfg.case_path},
                   {"mode", to_string(cfg.mode)},
                   {"methods", methods},
                   {"top_k", cfg.tntc.top_k},
                   {"tolerance_mva", cfg.tntc.tolerance},
                   {"exclude_overloaded", cfg.tntc.exclude_overloaded},
                   {"allow_transformers", cfg.tntc.switching.allow_transformers},
                   {"solver",
                    {{"tol", cfg.solver.tol},
                     {"max_iter", cfg.solver.max_iter},
                     {"qlim_passes", cfg.solver.qlim_passes},
                     {"enforce_q_limits", cfg.solver.enforce_q_limits}}}};
    const BaseSummary& b = r.base;
    j["base"] = {{"case_name", b.case_name},
                 {"buses", b.buses},
                 {"branches", b.branches},
                 {"generators", b.generators},
                 {"converged", b.converged},
                 {"iterations", b.iterations},
                 {"max_mismatch", b.max_mismatch},
                 {"total_load_mw", b.total_load_mw},
                 {"total_generation_mw", b.total_generation_mw},
                 {"losses_mw", b.losses_mw},
                 {"slack_p_mw", b.slack_p_mw},
                 {"slack_q_mvar", b.slack_q_mvar},
                 {"q_limited_buses", b.q_limited_buses},
                 {"voltage_violations", b.voltage_violations},
                 {"normal_violations", violations_json(b.normal_violations)},
                 {"warnings", b.warnings}};
    if (r.rtca) {
        Json rows = Json::array();
        for (const ContingencyResult& c : r.rtca->results) {
            Json row = contingency_json(c.contingency);
            row["status"] = to_string(c.status);
            row["iterations"] = c.iterations;
            row["violations"] = violations_json(c.violations);
            row["diagnostic"] = c.diagnostic;
            rows.push_back(std::move(row));
        }
        j["rtca"] = {{"contingencies", rows}, {"critical", r.rtca->critical}, {"stats", stats_json(r.rtca->stats)}};
    }
    if (!r.tntc.empty()) {
        Json arr = Json::array();
        for (const MethodResult& mr : r.tntc) {
            Json cons = Json::array();
            for (const ContingencyTntc& ct : mr.run.contingencies) {
                Json cands = Json::array();
                for (const CandidateEntry& e : ct.candidates.entries)
                    cands.push_back({{"branch", e.branch.value}, {"score", e.score}, {"rank", e.rank}});
                Json sols = Json::array();
                for (const SwitchEvaluation& e : ct.solutions) sols.push_back(evaluation_json(e));
                cons.push_back({{"contingency", contingency_json(ct.contingency)},
                                {"pre_violations", violations_json(ct.pre_violations)},
                                {"candidates", cands},
                                {"evaluated", ct.evaluations.size()},
                                {"solutions", sols}});
            }
            arr.push_back({{"method", mr.method.name()}, {"summary", summary_json(mr.run.summary)}, {"contingencies", cons}});
        }
        j["tntc"] = arr;
    }
    if (include_execution) {
        Json timing = {{"parse_s", r.timing.parse}, {"base_s", r.timing.base}, {"rtca_s", r.timing.rtca}};
        if (r.rtca) {
            timing["rtca_generator_s"] = r.rtca->timing.generator_seconds;
            timing["rtca_branch_s"] = r.rtca->timing.branch_seconds;
        }
        timing["tntc_s"] = r.timing.tntc;
        j["execution"] = {{"workers", cfg.workers}, {"timing", timing}};
    }
    return j;
}

/// Reads a structured report back. Fields the writer does not emit (solver
/// states, non-selected evaluations) come back empty.
[[nodiscard]] inline RunReport report_from_json(const Json& j) {
    using namespace report_detail;
    if (j.value("schema", "") != "gridswitch.report")
        throw ParseError("not a gridswitch report");
    if (j.at("schema_version").get<int>() != report_schema_version)
        throw ParseError("unsupported report schema version " + j.at("schema_version").dump());
    RunReport r;
    const Json& cfg = j.at("config");
    r.config.case_path = cfg.at("case_path").get<std::string>();
    r.config.mode = parse_mode(cfg.at("mode").get<std::string>());
    for (const Json& m : cfg.at("methods")) {
        const std::string name = m.get<std::string>();
        if (name == "CE") r.config.methods.push_back({RankingKind::CE, 0});
        else r.config.methods.push_back(parse_method(name.substr(0, 4) + ":" + name.substr(4)));
    }
    r.config.tntc.top_k = cfg.at("top_k").get<std::size_t>();
    r.config.tntc.tolerance = cfg.at("tolerance_mva").get<double>();
    r.config.tntc.exclude_overloaded = cfg.at("exclude_overloaded").get<bool>();
    r.config.tntc.switching.allow_transformers = cfg.at("allow_transformers").get<bool>();
    const Json& sv = cfg.at("solver");
    r.config.solver.tol = sv.at("tol").get<double>();
    r.config.solver.max_iter = sv.at("max_iter").get<int>();
    r.config.solver.qlim_passes = sv.at("qlim_passes").get<int>();
    r.config.solver.enforce_q_limits = sv.at("enforce_q_limits").get<bool>();

    const Json& b = j.at("base");
    r.base.case_name = b.at("case_name").get<std::string>();
    r.base.buses = b.at("buses").get<std::size_t>();
    r.base.branches = b.at("branches").get<std::size_t>();
    r.base.generators = b.at("generators").get<std::size_t>();
    r.base.converged = b.at("converged").get<bool>();
    r.base.iterations = b.at("iterations").get<int>();
    r.base.max_mismatch = b.at("max_mismatch").get<double>();
    r.base.total_load_mw = b.at("total_load_mw").get<double>();
    r.base.total_generation_mw = b.at("total_generation_mw").get<double>();
    r.base.losses_mw = b.at("losses_mw").get<double>();
    r.base.slack_p_mw = b.at("slack_p_mw").get<double>();
    r.base.slack_q_mvar = b.at("slack_q_mvar").get<double>();
    r.base.q_limited_buses = b.at("q_limited_buses").get<std::size_t>();
    r.base.voltage_violations = b.at("voltage_violations").get<std::size_t>();
    r.base.normal_violations = violations_from(b.at("normal_violations"));
    r.base.warnings = b.at("warnings").get<std::vector<std::string>>();

    if (j.contains("rtca")) {
        RtcaReport rt;
        for (const Json& row : j.at("rtca").at("contingencies")) {
            ContingencyResult c;
            c.contingency = contingency_from(row);
            const std::string st = row.at("status").get<std::string>();
            c.status = st == "solved" ? ContingencyStatus::Solved
                       : st == "rejected" ? ContingencyStatus::Rejected
                                          : ContingencyStatus::Unsolved;
            c.iterations = row.at("iterations").get<int>();
            c.violations = violations_from(row.at("violations"));
            c.diagnostic = row.at("diagnostic").get<std::string>();
            rt.results.push_back(std::move(c));
        }
        rt.critical = j.at("rtca").at("critical").get<std::vector<std::size_t>>();
        rt.stats = stats_from(j.at("rtca").at("stats"));
        r.rtca = std::move(rt);
    }
    if (j.contains("tntc")) {
        for (const Json& mj : j.at("tntc")) {
            MethodResult mr;
            const std::string name = mj.at("method").get<std::string>();
            mr.method = name == "CE" ? RankingMethod{RankingKind::CE, 0}
                                     : parse_method(name.substr(0, 4) + ":" + name.substr(4));
            for (const Json& cj : mj.at("contingencies")) {
                ContingencyTntc ct;
                ct.contingency = contingency_from(cj.at("contingency"));
                ct.pre_violations = violations_from(cj.at("pre_violations"));
                ct.candidates.contingency = ct.contingency;
                ct.candidates.method = mr.method;
                for (const Json& e : cj.at("candidates"))
                    ct.candidates.entries.push_back(
                        {BranchId{e.at("branch").get<int>()}, e.at("score").get<double>(), e.at("rank").get<int>()});
                ct.evaluations.resize(cj.at("evaluated").get<std::size_t>());
                for (const Json& e : cj.at("solutions")) ct.solutions.push_back(evaluation_from(e, ct.contingency));
                mr.run.contingencies.push_back(std::move(ct));
            }
            mr.run.summary = summary_from(mj.at("summary"), mr.method);
            r.tntc.push_back(std::move(mr));
        }
    }
    if (j.contains("execution")) {
        const Json& ex = j.at("execution");
        r.config.workers = ex.at("workers").get<unsigned>();
        const Json& t = ex.at("timing");
        r.timing.parse = t.at("parse_s").get<double>();
        r.timing.base = t.at("base_s").get<double>();
        r.timing.rtca = t.at("rtca_s").get<double>();
        r.timing.tntc = t.at("tntc_s").get<std::vector<double>>();
        if (r.rtca && t.contains("rtca_generator_s")) {
            r.rtca->timing.generator_seconds = t.at("rtca_generator_s").get<double>();
            r.rtca->timing.branch_seconds = t.at("rtca_branch_s").get<double>();
        }
    }
    return r;
}

namespace report_detail {

inline std::string fixed(double v, int digits = 1) {
    if (!std::isfinite(v)) return "-";
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

inline std::string pad(const std::string& s, std::size_t w) {
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}
inline std::string lpad(const std::string& s, std::size_t w) {
    return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

inline const ContingencyResult* find_result(const RtcaReport& rt, const Contingency& c) {
    for (const ContingencyResult& r : rt.results)
        if (r.contingency == c) return &r;
    return nullptr;
}

}  // namespace report_detail

inline void write_human(std::ostream& os, const RunReport& r) {
    using namespace report_detail;
    const BaseSummary& b = r.base;
    os << "Case " << b.case_name << ": " << b.buses << " buses, " << b.branches << " branches, " << b.generators
       << " generators\n";
    for (const std::string& w : b.warnings) os << "  warning: " << w << '\n';
    os << "\nBase case power flow\n";
    os << "  converged " << (b.converged ? "yes" : "no") << " in " << b.iterations << " iterations, max mismatch "
       << std::scientific << std::setprecision(2) << b.max_mismatch << std::defaultfloat << " p.u.\n";
    os << "  load " << fixed(b.total_load_mw) << " MW, generation " << fixed(b.total_generation_mw) << " MW, losses "
       << fixed(b.losses_mw, 2) << " MW\n";
    os << "  slack output " << fixed(b.slack_p_mw) << " MW / " << fixed(b.slack_q_mvar) << " MVAr, "
       << b.q_limited_buses << " PV bus(es) at a reactive limit\n";
    os << "  voltage violations: " << b.voltage_violations << ", normal-rating overloads: "
       << b.normal_violations.size() << '\n';
    for (const Violation& v : b.normal_violations.entries)
        os << "    branch " << v.branch.value << ": " << fixed(v.loading) << " / " << fixed(v.rating) << " MVA\n";

    if (r.rtca) {
        const RtcaReport& rt = *r.rtca;
        std::size_t gens = 0, rejected = 0;
        for (const ContingencyResult& c : rt.results) {
            gens += c.contingency.kind == ContingencyKind::Generator;
            rejected += c.status == ContingencyStatus::Rejected;
        }
        os << "\nContingency analysis\n";
        os << "  " << rt.results.size() << " contingencies (" << gens << " generator, " << rt.results.size() - gens
           << " branch), " << rt.unsolved_count() << " unsolved, " << rejected << " rejected\n";
        os << "  generator scan " << fixed(rt.timing.generator_seconds, 2) << " s, branch scan "
           << fixed(rt.timing.branch_seconds, 2) << " s\n";
        for (const ContingencyResult& c : rt.results)
            if (c.status != ContingencyStatus::Solved)
                os << "    " << c.contingency.label << ": " << to_string(c.status) << " (" << c.diagnostic << ")\n";
        os << "\n  Critical contingencies: " << rt.critical.size() << '\n';
        if (!rt.critical.empty()) {
            os << "  " << pad("Contingency", 16) << lpad("Lines", 6) << lpad("Excess MVA", 12) << lpad("Worst", 8)
               << lpad("Loading", 10) << lpad("Rating", 9) << lpad("Rel %", 8) << '\n';
            for (std::size_t i : rt.critical) {
                const ContingencyResult& c = rt.results[i];
                const Violation& w = c.violations.entries.front();
                os << "  " << pad(c.contingency.label, 16) << lpad(std::to_string(c.violations.size()), 6)
                   << lpad(fixed(c.violations.total_excess), 12) << lpad(std::to_string(w.branch.value), 8)
                   << lpad(fixed(w.loading), 10) << lpad(fixed(w.rating), 9) << lpad(fixed(w.relative_percent()), 8)
                   << '\n';
            }
            const ViolationStats& s = rt.stats;
            os << "\n  Statistics of critical-contingency violations (MVA)\n";
            os << "    count " << s.count << "  max " << fixed(s.max) << "  min " << fixed(s.min) << "  mean "
               << fixed(s.mean) << "  median " << fixed(s.median) << "  std " << fixed(s.stddev) << '\n';
        }
    }

    if (!r.tntc.empty()) {
        os << "\nViolation reduction in percent with TNTC solutions\n";
        for (const MethodResult& mr : r.tntc) {
            const std::size_t k = r.config.tntc.top_k;
            os << "  " << mr.method.name() << '\n';
            os << "    " << pad("Contingency", 16);
            for (std::size_t i = 1; i <= k; ++i) os << lpad("#" + std::to_string(i), 16);
            os << '\n';
            for (const ContingencyTntc& ct : mr.run.contingencies) {
                os << "    " << pad(ct.contingency.label, 16);
                for (std::size_t i = 0; i < k; ++i) {
                    if (i < ct.solutions.size())
                        os << lpad(fixed(100.0 * ct.solutions[i].vrp) + "% (" +
                                       std::to_string(ct.solutions[i].branch.value) + ")",
                                   16);
                    else
                        os << lpad("-", 16);
                }
                os << '\n';
            }
        }
        os << "\nStatistics of TNTC results\n";
        os << "  " << pad("Method", 10) << lpad("eps %", 8) << lpad("mu", 7) << lpad("n1", 5) << lpad("n2", 5)
           << lpad("n3", 5) << lpad("Time s", 10) << '\n';
        for (std::size_t m = 0; m < r.tntc.size(); ++m) {
            const TntcSummary& s = r.tntc[m].run.summary;
            os << "  " << pad(s.method.name(), 10) << lpad(fixed(100.0 * s.epsilon), 8) << lpad(fixed(s.mu, 2), 7)
               << lpad(std::to_string(s.n1), 5) << lpad(std::to_string(s.n2), 5) << lpad(std::to_string(s.n3), 5)
               << lpad(fixed(m < r.timing.tntc.size() ? r.timing.tntc[m] : s.solution_time, 3), 10) << '\n';
        }
        auto per_rank = [&](const char* title, auto value, int digits) {
            os << '\n' << title << '\n' << "  " << pad("Method", 10);
            for (std::size_t i = 1; i <= r.config.tntc.top_k; ++i) os << lpad("#" + std::to_string(i), 9);
            os << '\n';
            for (const MethodResult& mr : r.tntc) {
                os << "  " << pad(mr.method.name(), 10);
                for (std::size_t i = 0; i < r.config.tntc.top_k; ++i) os << lpad(fixed(value(mr.run.summary, i), digits), 9);
                os << '\n';
            }
        };
        per_rank("Average violation reduction in percent with the five best solutions",
                 [](const TntcSummary& s, std::size_t i) { return 100.0 * s.average_vrp[i]; }, 1);
        per_rank("Total violation (MVA) in the post-switching situations",
                 [](const TntcSummary& s, std::size_t i) { return s.total_excess_after[i]; }, 1);
        per_rank("Average depth of beneficial TNTC solutions",
                 [](const TntcSummary& s, std::size_t i) { return s.average_depth[i]; }, 2);
    }
}

inline void write_delimited(std::ostream& os, const RunReport& r) {
    using report_detail::fixed;
    os << std::setprecision(10);
    os << "#base,case,buses,branches,generators,converged,iterations,max_mismatch,slack_p_mw,slack_q_mvar\n";
    os << "base," << r.base.case_name << ',' << r.base.buses << ',' << r.base.branches << ',' << r.base.generators
       << ',' << r.base.converged << ',' << r.base.iterations << ',' << r.base.max_mismatch << ','
       << r.base.slack_p_mw << ',' << r.base.slack_q_mvar << '\n';
    if (r.rtca) {
        os << "#contingency,kind,element,status,total_excess_mva,worst_branch,worst_excess_mva,relative_pct,ms\n";
        for (const ContingencyResult& c : r.rtca->results) {
            const bool any = !c.violations.empty();
            os << "contingency," << to_string(c.contingency.kind) << ',' << c.contingency.element << ','
               << to_string(c.status) << ',' << c.violations.total_excess << ','
               << (any ? std::to_string(c.violations.entries.front().branch.value) : std::string()) << ','
               << (any ? c.violations.entries.front().excess : 0.0) << ',' << c.worst_relative_percent() << ','
               << fixed(1000.0 * c.elapsed, 3) << '\n';
        }
    }
    if (!r.tntc.empty()) {
        os << "#solution,method,kind,element,rank,branch,vrp,residual_mva,depth,pareto\n";
        for (const MethodResult& mr : r.tntc)
            for (const ContingencyTntc& ct : mr.run.contingencies)
                for (std::size_t i = 0; i < ct.solutions.size(); ++i) {
                    const SwitchEvaluation& e = ct.solutions[i];
                    os << "solution," << mr.method.name() << ',' << to_string(ct.contingency.kind) << ','
                       << ct.contingency.element << ',' << i + 1 << ',' << e.branch.value << ',' << e.vrp << ','
                       << e.total_excess_after << ',' << e.depth << ',' << e.pareto << '\n';
                }
        os << "#summary,method,contingencies,epsilon,mu,n1,n2,n3,residual_best_mva\n";
        for (const MethodResult& mr : r.tntc) {
            const TntcSummary& s = mr.run.summary;
            os << "summary," << s.method.name() << ',' << s.contingencies << ',' << s.epsilon << ',' << s.mu << ','
               << s.n1 << ',' << s.n2 << ',' << s.n3 << ','
               << (s.total_excess_after.empty() ? 0.0 : s.total_excess_after.front()) << '\n';
        }
    }
}

inline void write_report(std::ostream& os, const RunReport& r, OutputFormat format, bool include_execution = true) {
    switch (format) {
        case OutputFormat::Human: write_human(os, r); break;
        case OutputFormat::Delimited: write_delimited(os, r); break;
        case OutputFormat::Structured: os << report_to_json(r, include_execution).dump(2) << '\n'; break;
    }
}

/// Writes to `path`, or to `fallback` when no path is given.
inline void emit_report(const RunReport& r, OutputFormat format, const std::optional<std::string>& path,
                        std::ostream& fallback) {
    if (!path) {
        write_report(fallback, r, format);
        return;
    }
    std::ofstream out(*path);
    if (!out) throw Error("cannot open output file '" + *path + "' for writing");
    write_report(out, r, format);
    if (!out) throw Error("failed writing output file '" + *path + "'");
}

}  // namespace gridswitch
