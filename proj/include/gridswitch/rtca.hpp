#pragma once

// N-1 contingency analysis: list building, AC simulation, critical selection.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gridswitch/branch_flow.hpp"
#include "gridswitch/network.hpp"
#include "gridswitch/parallel.hpp"
#include "gridswitch/power_flow.hpp"
#include "gridswitch/topology.hpp"

namespace gridswitch {

enum class ContingencyKind { Generator, Branch };

struct Contingency {
    ContingencyKind kind = ContingencyKind::Branch;
    int element = 0;  // generator or branch id
    std::string label;

    [[nodiscard]] TopologyMask mask() const {
        return kind == ContingencyKind::Branch ? TopologyMask{BranchId{element}}
                                               : TopologyMask::of_generator(GeneratorId{element});
    }
    bool operator==(const Contingency& o) const { return kind == o.kind && element == o.element; }
};

[[nodiscard]] inline Contingency branch_contingency(BranchId b) {
    return {ContingencyKind::Branch, b.value, "branch " + std::to_string(b.value)};
}
[[nodiscard]] inline Contingency generator_contingency(GeneratorId g) {
    return {ContingencyKind::Generator, g.value, "generator " + std::to_string(g.value)};
}

enum class ContingencyStatus {
    Solved,
    Unsolved,  // AC power flow failed
    Rejected,  // not simulated (removes the only slack generator)
};

[[nodiscard]] inline const char* to_string(ContingencyStatus s) {
    switch (s) {
        case ContingencyStatus::Solved: return "solved";
        case ContingencyStatus::Unsolved: return "unsolved";
        case ContingencyStatus::Rejected: return "rejected";
    }
    return "?";
}

struct ContingencyResult {
    Contingency contingency;
    ContingencyStatus status = ContingencyStatus::Unsolved;
    ViolationSet violations;           // emergency tier
    std::vector<double> switch_line_flows;  // from-end MW per branch, 0 when inactive
    std::optional<PowerFlowSolution> state;  // kept for critical contingencies only
    int iterations = 0;
    double elapsed = 0.0;  // seconds
    std::string diagnostic;

    [[nodiscard]] bool solved() const noexcept { return status == ContingencyStatus::Solved; }
    [[nodiscard]] bool critical() const noexcept { return solved() && !violations.empty(); }

    /// Worst violation relative to its emergency rating, percent.
    [[nodiscard]] double worst_relative_percent() const {
        return violations.empty() ? 0.0 : violations.entries.front().relative_percent();
    }
};

struct ViolationStats {
    std::size_t count = 0;
    double max = 0.0, min = 0.0, mean = 0.0, median = 0.0, stddev = 0.0;  // MVA
};

/// Summary statistics; stddev is the sample (n − 1) deviation.
[[nodiscard]] inline ViolationStats violation_stats(std::vector<double> values) {
    ViolationStats s;
    s.count = values.size();
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    s.min = values.front();
    s.max = values.back();
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    const std::size_t h = values.size() / 2;
    s.median = values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

struct RtcaTiming {
    double generator_seconds = 0.0;
    double branch_seconds = 0.0;
};

struct RtcaReport {
    std::vector<ContingencyResult> results;  // contingency-list order
    std::vector<std::size_t> critical;       // indices into results, descending total excess
    ViolationStats stats;                    // over critical contingencies
    RtcaTiming timing;

    [[nodiscard]] std::size_t unsolved_count() const {
        return static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](const ContingencyResult& r) {
            return r.status == ContingencyStatus::Unsolved;
        }));
    }
};

/// True when removing generator g leaves the slack bus without an in-service generator.
[[nodiscard]] inline bool removes_slack_generation(const NetworkCase& c, GeneratorId g) {
    const auto slack = c.slack_bus();
    if (!slack || c.generator(g).bus != *slack) return false;
    for (const Generator& other : c.generators())
        if (other.in_service && other.id != g && other.bus == *slack) return false;
    return true;
}

/// In-service generators, then in-service non-radial branches, each ascending by id.
[[nodiscard]] inline std::vector<Contingency> build_contingency_list(const NetworkCase& c) {
    std::vector<Contingency> out;
    for (const Generator& g : c.generators())
        if (g.in_service) out.push_back(generator_contingency(g.id));
    const auto radial = radial_branches(c);
    for (const Branch& br : c.branches())
        if (br.in_service && !std::binary_search(radial.begin(), radial.end(), br.id))
            out.push_back(branch_contingency(br.id));
    return out;
}

/// AC post-contingency solve warm-started from `base`, checked at the emergency tier.
[[nodiscard]] inline ContingencyResult simulate_contingency(PowerFlowSolver& solver, const PowerFlowSolution& base,
                                                            const Contingency& con, const SolverParams& params = {}) {
    const NetworkCase& c = solver.network();
    const auto t0 = std::chrono::steady_clock::now();
    ContingencyResult r;
    r.contingency = con;
    if (con.kind == ContingencyKind::Generator && removes_slack_generation(c, GeneratorId{con.element})) {
        r.status = ContingencyStatus::Rejected;
        r.diagnostic = "removes the only in-service generator at the slack bus";
        return r;
    }
    PowerFlowSolution sol = solver.solve(con.mask(), &base, params);
    r.iterations = sol.iterations;
    if (!sol.converged) {
        r.status = ContingencyStatus::Unsolved;
        r.diagnostic = sol.diagnostic;
    } else {
        r.status = ContingencyStatus::Solved;
        r.violations = check_limits(sol.branch_flows, c, RatingTier::Emergency);
        r.switch_line_flows.resize(sol.branch_flows.size());
        for (std::size_t k = 0; k < sol.branch_flows.size(); ++k) r.switch_line_flows[k] = sol.branch_flows[k].p_from;
        if (!r.violations.empty()) r.state = std::move(sol);
    }
    r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

/// Critical result indices ordered by descending total excess, ties by list position.
[[nodiscard]] inline std::vector<std::size_t> critical_indices(const std::vector<ContingencyResult>& results) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < results.size(); ++i)
        if (results[i].critical()) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return results[a].violations.total_excess > results[b].violations.total_excess;
    });
    return idx;
}

[[nodiscard]] inline std::vector<Contingency> select_critical(const RtcaReport& report) {
    std::vector<Contingency> out;
    for (std::size_t i : critical_indices(report.results)) out.push_back(report.results[i].contingency);
    return out;
}

/// Simulates every contingency over `workers` threads. Results keep list order.
[[nodiscard]] inline RtcaReport run_rtca(const NetworkCase& c, const PowerFlowSolution& base,
                                         const std::vector<Contingency>& list, const SolverParams& params = {},
                                         unsigned workers = 1) {
    RtcaReport rep;
    rep.results.resize(list.size());
    const auto split = static_cast<std::size_t>(std::partition_point(list.begin(), list.end(), [](const Contingency& x) {
                                                    return x.kind == ContingencyKind::Generator;
                                                }) - list.begin());
    auto scan = [&](std::size_t first, std::size_t last) {
        const auto t0 = std::chrono::steady_clock::now();
        parallel_for(
            last - first, workers, [&] { return PowerFlowSolver(c); },
            [&](PowerFlowSolver& solver, std::size_t i) {
                rep.results[first + i] = simulate_contingency(solver, base, list[first + i], params);
            });
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    rep.timing.generator_seconds = scan(0, split);
    rep.timing.branch_seconds = scan(split, list.size());

    rep.critical = critical_indices(rep.results);
    std::vector<double> totals;
    for (std::size_t i : rep.critical) totals.push_back(rep.results[i].violations.total_excess);
    rep.stats = violation_stats(std::move(totals));
    return rep;
}

}  // namespace gridswitch
