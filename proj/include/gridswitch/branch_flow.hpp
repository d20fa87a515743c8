#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "gridswitch/network.hpp"
#include "gridswitch/ybus.hpp"

namespace gridswitch {

/// Both-end flows of one branch in MW / MVAr / MVA.
struct BranchFlow {
    BranchId id;
    bool in_service = false;
    double p_from = 0.0, q_from = 0.0;
    double p_to = 0.0, q_to = 0.0;
    double s_from = 0.0, s_to = 0.0;

    /// Apparent-power loading checked against ratings: the larger end.
    [[nodiscard]] double loading() const noexcept { return std::max(s_from, s_to); }
};

/// Per-branch flows for a voltage state given in internal bus order.
/// Inactive (out-of-service or masked) branches report zero flow.
[[nodiscard]] inline std::vector<BranchFlow> compute_branch_flows(std::span<const double> v_mag,
                                                                 std::span<const double> v_ang,
                                                                 const NetworkCase& c,
                                                                 const TopologyMask& mask = {}) {
    std::vector<BranchFlow> out(c.branch_count());
    const double base = c.base_mva();
    for (std::size_t k = 0; k < c.branch_count(); ++k) {
        BranchFlow& bf = out[k];
        bf.id = c.branches()[k].id;
        if (!branch_active(c, mask, k)) continue;
        bf.in_service = true;
        auto [f, t] = c.branch_ends(k);
        const Complex vf = std::polar(v_mag[f], v_ang[f]);
        const Complex vt = std::polar(v_mag[t], v_ang[t]);
        const BranchAdmittance y = branch_admittance(c.branches()[k]);
        const Complex sf = vf * std::conj(y.ff * vf + y.ft * vt) * base;
        const Complex st = vt * std::conj(y.tf * vf + y.tt * vt) * base;
        bf.p_from = sf.real();
        bf.q_from = sf.imag();
        bf.p_to = st.real();
        bf.q_to = st.imag();
        bf.s_from = std::abs(sf);
        bf.s_to = std::abs(st);
    }
    return out;
}

struct Violation {
    BranchId branch;
    double loading = 0.0;  // MVA
    double rating = 0.0;   // MVA
    double excess = 0.0;   // MVA, > 0

    [[nodiscard]] double relative_percent() const noexcept {
        return rating > 0.0 ? 100.0 * excess / rating : 0.0;
    }
    bool operator==(const Violation&) const = default;
};

/// Branch overloads at one rating tier, sorted by descending excess (ties by
/// ascending branch id).
struct ViolationSet {
    std::vector<Violation> entries;
    double total_excess = 0.0;

    [[nodiscard]] bool empty() const noexcept { return entries.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }

    [[nodiscard]] const Violation* find(BranchId b) const {
        for (const Violation& v : entries)
            if (v.branch == b) return &v;
        return nullptr;
    }
    /// Excess on `b`, zero when the branch is within its rating.
    [[nodiscard]] double excess_on(BranchId b) const {
        const Violation* v = find(b);
        return v ? v->excess : 0.0;
    }

    bool operator==(const ViolationSet&) const = default;
};

[[nodiscard]] inline ViolationSet make_violation_set(std::vector<Violation> entries) {
    std::sort(entries.begin(), entries.end(), [](const Violation& a, const Violation& b) {
        if (a.excess != b.excess) return a.excess > b.excess;
        return a.branch < b.branch;
    });
    ViolationSet vs;
    vs.entries = std::move(entries);
    for (const Violation& v : vs.entries) vs.total_excess += v.excess;
    return vs;
}

/// Overloads of monitored (non-zero rating) in-service branches.
[[nodiscard]] inline ViolationSet check_limits(std::span<const BranchFlow> flows, const NetworkCase& c,
                                               RatingTier tier) {
    std::vector<Violation> found;
    for (const BranchFlow& bf : flows) {
        if (!bf.in_service) continue;
        const double rating = c.branch(bf.id).rating(tier);
        if (!(rating > 0.0)) continue;
        const double loading = bf.loading();
        if (loading > rating) found.push_back({bf.id, loading, rating, loading - rating});
    }
    return make_violation_set(std::move(found));
}

struct VoltageViolation {
    BusId bus;
    double v_mag = 0.0;
    double bound = 0.0;  // the violated limit
    bool below = false;
};

/// Buses outside [v_min, v_max]. Reported only; never used for switching.
[[nodiscard]] inline std::vector<VoltageViolation> check_voltage_limits(std::span<const double> v_mag,
                                                                       const NetworkCase& c) {
    std::vector<VoltageViolation> out;
    for (std::size_t i = 0; i < c.bus_count(); ++i) {
        const Bus& b = c.buses()[i];
        if (b.type == BusType::Isolated) continue;
        if (v_mag[i] < b.v_min) out.push_back({b.id, v_mag[i], b.v_min, true});
        else if (v_mag[i] > b.v_max) out.push_back({b.id, v_mag[i], b.v_max, false});
    }
    return out;
}

}  // namespace gridswitch
