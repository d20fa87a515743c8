#pragma once

// Corrective line switching for critical contingencies: candidate ranking by
// TSDF/FTDF, AC evaluation, Pareto filtering and summary metrics.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridswitch/branch_flow.hpp"
#include "gridswitch/dc_sensitivity.hpp"
#include "gridswitch/error.hpp"
#include "gridswitch/parallel.hpp"
#include "gridswitch/power_flow.hpp"
#include "gridswitch/rtca.hpp"
#include "gridswitch/topology.hpp"

namespace gridswitch {

/// Calls into ranking/evaluation, for checking that other modes never reach them.
inline std::atomic<long>& tntc_call_counter() {
    static std::atomic<long> counter{0};
    return counter;
}

enum class RankingKind { TSDF, FTDF, CE };

struct RankingMethod {
    RankingKind kind = RankingKind::FTDF;
    int list_size = 20;  // ignored for CE

    [[nodiscard]] std::string name() const {
        switch (kind) {
            case RankingKind::TSDF: return "TSDF" + std::to_string(list_size);
            case RankingKind::FTDF: return "FTDF" + std::to_string(list_size);
            case RankingKind::CE: return "CE";
        }
        return "?";
    }
    bool operator==(const RankingMethod&) const = default;
};

/// Parses "tsdf:N", "ftdf:N" or "ce" (case-insensitive).
[[nodiscard]] inline RankingMethod parse_method(std::string_view text) {
    std::string s(text);
    for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (s == "ce") return {RankingKind::CE, 0};
    const auto colon = s.find(':');
    const std::string head = s.substr(0, colon);
    RankingKind kind;
    if (head == "tsdf") kind = RankingKind::TSDF;
    else if (head == "ftdf") kind = RankingKind::FTDF;
    else throw ValidationError("unknown ranking method '" + std::string(text) + "' (expected tsdf:N, ftdf:N or ce)");
    if (colon == std::string::npos) throw ValidationError("ranking method '" + std::string(text) + "' needs a list size");
    int n = 0;
    try {
        std::size_t used = 0;
        n = std::stoi(s.substr(colon + 1), &used);
        if (used != s.size() - colon - 1) n = 0;
    } catch (const std::exception&) {
        n = 0;
    }
    if (n < 1) throw ValidationError("ranking method '" + std::string(text) + "': list size must be a positive integer");
    return {kind, n};
}

struct TntcOptions {
    std::size_t top_k = 5;
    double tolerance = 0.01;           // MVA, all violation comparisons
    bool exclude_overloaded = true;    // drop the overloaded lines themselves from the candidates
    SwitchingOptions switching{};
};

struct CandidateEntry {
    BranchId branch;
    double score = 0.0;  // directed factor sum; 0 for CE
    int rank = 0;        // 1-based
};

struct CandidateList {
    Contingency contingency;
    RankingMethod method;
    std::vector<CandidateEntry> entries;
};

/// Directed factor of each candidate: TSDF and FTDF for every overloaded line.
struct CandidateFactors {
    BranchId branch;
    std::vector<double> tsdf;  // per overloaded line
    double p_kc = 0.0;         // MW
};

/// Switchable candidates for a critical result, with their factors against
/// its overloaded lines, ascending by branch id.
[[nodiscard]] inline std::vector<CandidateFactors> candidate_factors(const NetworkCase& c, const ContingencyResult& r,
                                                                     const TntcOptions& opts = {}) {
    const TopologyMask mask = r.contingency.mask();
    std::vector<BranchId> overloaded;
    for (const Violation& v : r.violations.entries) overloaded.push_back(v.branch);
    const SwitchingFactors factors(c, mask, overloaded);
    std::vector<CandidateFactors> out;
    for (BranchId k : switchable_branches(c, mask, opts.switching)) {
        if (opts.exclude_overloaded && r.violations.find(k)) continue;
        auto t = factors.tsdf(k);
        if (!t) continue;  // numerically islanding; the graph test normally catches these first
        out.push_back({k, std::move(*t), r.switch_line_flows[static_cast<std::size_t>(k.value - 1)]});
    }
    return out;
}

/// Records of every (overloaded line, candidate) factor pair, for debug dumps.
[[nodiscard]] inline std::vector<SensitivityRecord> sensitivity_records(const NetworkCase& c, const ContingencyResult& r,
                                                                        const TntcOptions& opts = {}) {
    std::vector<SensitivityRecord> out;
    for (const CandidateFactors& cf : candidate_factors(c, r, opts))
        for (std::size_t i = 0; i < cf.tsdf.size(); ++i)
            out.push_back({r.contingency.label, r.violations.entries[i].branch, cf.branch, cf.tsdf[i], cf.p_kc,
                           compute_ftdf(cf.tsdf[i], cf.p_kc)});
    return out;
}

/// Candidate list for one critical contingency. TSDF/FTDF: ascending by the
/// sum over overloaded lines m of sign(P_m,c) times the factor, ties by id,
/// truncated to N. CE: every switchable branch in id order.
[[nodiscard]] inline CandidateList rank_candidates(const NetworkCase& c, const ContingencyResult& r,
                                                   const RankingMethod& method, const TntcOptions& opts = {}) {
    ++tntc_call_counter();
    CandidateList out{r.contingency, method, {}};
    if (method.kind == RankingKind::CE) {
        const TopologyMask mask = r.contingency.mask();
        for (BranchId k : switchable_branches(c, mask, opts.switching)) {
            if (opts.exclude_overloaded && r.violations.find(k)) continue;
            out.entries.push_back({k, 0.0, 0});
        }
    } else {
        std::vector<double> direction;
        for (const Violation& v : r.violations.entries)
            direction.push_back(r.switch_line_flows[static_cast<std::size_t>(v.branch.value - 1)] < 0.0 ? -1.0 : 1.0);
        for (const CandidateFactors& cf : candidate_factors(c, r, opts)) {
            double score = 0.0;
            for (std::size_t i = 0; i < cf.tsdf.size(); ++i) {
                const double f = method.kind == RankingKind::FTDF ? compute_ftdf(cf.tsdf[i], cf.p_kc) : cf.tsdf[i];
                score += direction[i] * f;
            }
            out.entries.push_back({cf.branch, score, 0});
        }
        std::sort(out.entries.begin(), out.entries.end(), [](const CandidateEntry& a, const CandidateEntry& b) {
            if (a.score != b.score) return a.score < b.score;
            return a.branch < b.branch;
        });
        if (out.entries.size() > static_cast<std::size_t>(method.list_size))
            out.entries.resize(static_cast<std::size_t>(method.list_size));
    }
    for (std::size_t i = 0; i < out.entries.size(); ++i) out.entries[i].rank = static_cast<int>(i) + 1;
    return out;
}

/// True iff post reduces the total (or clears it), adds no new overloads and
/// raises no existing one, all within `tol` MVA.
[[nodiscard]] inline bool pareto_check(const ViolationSet& pre, const ViolationSet& post, double tol = 0.01) {
    const bool reduced = post.total_excess <= pre.total_excess - tol || (post.empty() && pre.total_excess > 0.0);
    if (!reduced) return false;
    for (const Violation& v : post.entries) {
        const Violation* before = pre.find(v.branch);
        if (!before) return false;
        if (v.excess > before->excess + tol) return false;
    }
    return true;
}

struct LineReduction {
    BranchId branch;
    double vrp = 0.0;  // fraction
};

struct SwitchEvaluation {
    Contingency contingency;
    BranchId branch;
    int depth = 0;  // rank in the candidate list
    bool solved = false;
    ViolationSet post_violations;
    bool pareto = false;
    std::vector<LineReduction> line_vrp;  // per originally overloaded line
    double vrp = 0.0;                     // aggregate; 0 unless Pareto
    double total_excess_after = 0.0;      // MVA
    double loading_after_worst = 0.0;     // MVA on the worst pre-switch overload
    std::string diagnostic;

    [[nodiscard]] bool eliminates() const noexcept { return pareto && post_violations.empty(); }
};

/// AC evaluation of opening k under the critical contingency `r`, warm
/// started from its post-contingency state.
[[nodiscard]] inline SwitchEvaluation evaluate_switch(PowerFlowSolver& solver, const ContingencyResult& r, BranchId k,
                                                      int depth, const SolverParams& params = {},
                                                      double tol = 0.01) {
    ++tntc_call_counter();
    const NetworkCase& c = solver.network();
    SwitchEvaluation e;
    e.contingency = r.contingency;
    e.branch = k;
    e.depth = depth;
    const PowerFlowSolution sol = solver.solve(r.contingency.mask().with(k), r.state ? &*r.state : nullptr, params);
    if (!sol.converged) {
        e.diagnostic = sol.diagnostic;
        return e;
    }
    e.solved = true;
    e.post_violations = check_limits(sol.branch_flows, c, RatingTier::Emergency);
    e.total_excess_after = e.post_violations.total_excess;
    e.pareto = pareto_check(r.violations, e.post_violations, tol);
    if (!r.violations.empty())
        e.loading_after_worst =
            sol.branch_flows[static_cast<std::size_t>(r.violations.entries.front().branch.value - 1)].loading();
    for (const Violation& v : r.violations.entries) {
        const double after = e.post_violations.excess_on(v.branch);
        e.line_vrp.push_back({v.branch, std::clamp((v.excess - after) / v.excess, 0.0, 1.0)});
    }
    if (e.pareto) {
        e.vrp = e.post_violations.empty()
                    ? 1.0
                    : std::clamp((r.violations.total_excess - e.total_excess_after) / r.violations.total_excess, 0.0, 1.0);
    }
    return e;
}

struct BeneficialResult {
    std::vector<SwitchEvaluation> evaluations;  // every candidate, list order
    std::vector<SwitchEvaluation> solutions;    // top-k beneficial
};

/// Orders beneficial evaluations: descending VRP, ascending depth, ascending id.
[[nodiscard]] inline std::vector<SwitchEvaluation> select_beneficial(const std::vector<SwitchEvaluation>& evals,
                                                                     std::size_t top_k) {
    std::vector<SwitchEvaluation> keep;
    for (const SwitchEvaluation& e : evals)
        if (e.pareto && e.vrp > 0.0) keep.push_back(e);
    std::sort(keep.begin(), keep.end(), [](const SwitchEvaluation& a, const SwitchEvaluation& b) {
        if (a.vrp != b.vrp) return a.vrp > b.vrp;
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.branch < b.branch;
    });
    if (keep.size() > top_k) keep.resize(top_k);
    return keep;
}

/// Evaluates every candidate (in parallel, merged in list order) and keeps the
/// top-k Pareto improvements.
[[nodiscard]] inline BeneficialResult find_beneficial(const NetworkCase& c, const ContingencyResult& r,
                                                      const CandidateList& candidates, std::size_t top_k,
                                                      const SolverParams& params = {}, double tol = 0.01,
                                                      unsigned workers = 1) {
    BeneficialResult out;
    out.evaluations.resize(candidates.entries.size());
    parallel_for(
        candidates.entries.size(), workers, [&] { return PowerFlowSolver(c); },
        [&](PowerFlowSolver& solver, std::size_t i) {
            const CandidateEntry& ce = candidates.entries[i];
            out.evaluations[i] = evaluate_switch(solver, r, ce.branch, ce.rank, params, tol);
        });
    out.solutions = select_beneficial(out.evaluations, top_k);
    return out;
}

struct ContingencyTntc {
    Contingency contingency;
    ViolationSet pre_violations;
    CandidateList candidates;
    std::vector<SwitchEvaluation> evaluations;
    std::vector<SwitchEvaluation> solutions;
    double seconds = 0.0;

    [[nodiscard]] double best_vrp() const { return solutions.empty() ? 0.0 : solutions.front().vrp; }
};

struct TntcSummary {
    RankingMethod method;
    std::size_t contingencies = 0;
    double epsilon = 0.0;  // mean best-solution VRP, fraction
    double mu = 0.0;       // mean count of eliminating candidates
    std::size_t n1 = 0, n2 = 0, n3 = 0;
    std::vector<double> average_vrp;         // per solution rank; missing ranks count as 0
    std::vector<double> total_excess_after;  // per solution rank, MVA; missing ranks keep the unswitched violation
    std::vector<double> average_depth;       // per solution rank over contingencies that have it; NaN if none
    double total_excess_before = 0.0;
    double solution_time = 0.0;  // seconds
};

[[nodiscard]] inline TntcSummary compute_summary(const std::vector<ContingencyTntc>& runs, const RankingMethod& method,
                                                 std::size_t top_k = 5) {
    TntcSummary s;
    s.method = method;
    s.contingencies = runs.size();
    s.average_vrp.assign(top_k, 0.0);
    s.total_excess_after.assign(top_k, 0.0);
    s.average_depth.assign(top_k, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> depth_sum(top_k, 0.0);
    std::vector<std::size_t> depth_count(top_k, 0);
    for (const ContingencyTntc& run : runs) {
        s.solution_time += run.seconds;
        s.total_excess_before += run.pre_violations.total_excess;
        s.epsilon += run.best_vrp();
        if (run.solutions.empty()) ++s.n3;
        else if (run.solutions.front().eliminates()) ++s.n1;
        else ++s.n2;
        s.mu += static_cast<double>(std::count_if(run.evaluations.begin(), run.evaluations.end(),
                                                  [](const SwitchEvaluation& e) { return e.eliminates(); }));
        for (std::size_t rnk = 0; rnk < top_k; ++rnk) {
            if (rnk < run.solutions.size()) {
                s.average_vrp[rnk] += run.solutions[rnk].vrp;
                s.total_excess_after[rnk] += run.solutions[rnk].total_excess_after;
                depth_sum[rnk] += run.solutions[rnk].depth;
                ++depth_count[rnk];
            } else {
                s.total_excess_after[rnk] += run.pre_violations.total_excess;
            }
        }
    }
    if (!runs.empty()) {
        const double n = static_cast<double>(runs.size());
        s.epsilon /= n;
        s.mu /= n;
        for (double& v : s.average_vrp) v /= n;
    }
    for (std::size_t rnk = 0; rnk < top_k; ++rnk)
        if (depth_count[rnk]) s.average_depth[rnk] = depth_sum[rnk] / static_cast<double>(depth_count[rnk]);
    return s;
}

struct TntcRun {
    std::vector<ContingencyTntc> contingencies;  // critical order
    TntcSummary summary;
};

/// Ranking, evaluation and selection for every critical result of `rtca`.
[[nodiscard]] inline TntcRun run_tntc(const NetworkCase& c, const RtcaReport& rtca, const RankingMethod& method,
                                      const TntcOptions& opts = {}, const SolverParams& params = {},
                                      unsigned workers = 1) {
    TntcRun out;
    for (std::size_t idx : rtca.critical) {
        const ContingencyResult& r = rtca.results[idx];
        const auto t0 = std::chrono::steady_clock::now();
        ContingencyTntc run;
        run.contingency = r.contingency;
        run.pre_violations = r.violations;
        run.candidates = rank_candidates(c, r, method, opts);
        BeneficialResult b = find_beneficial(c, r, run.candidates, opts.top_k, params, opts.tolerance, workers);
        run.evaluations = std::move(b.evaluations);
        run.solutions = std::move(b.solutions);
        run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.contingencies.push_back(std::move(run));
    }
    out.summary = compute_summary(out.contingencies, method, opts.top_k);
    return out;
}

}  // namespace gridswitch
