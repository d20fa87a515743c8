#pragma once

// Linear (DC) sensitivity factors: PTDF, LODF, TSDF, FTDF.

#include <cmath>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "gridswitch/error.hpp"
#include "gridswitch/network.hpp"
#include "gridswitch/sparse_lu.hpp"
#include "gridswitch/topology.hpp"

namespace gridswitch {

/// Denominator magnitude below which an outage or switch is treated as islanding.
inline constexpr double islanding_threshold = 1e-6;

/// Reduced nodal susceptance matrix of one topology (slack row/column
/// removed), factorized once.
class DcModel {
public:
    DcModel(const NetworkCase& c, const TopologyMask& mask, std::optional<BusId> slack = std::nullopt)
        : case_(&c), mask_(mask) {
        check_mask(c, mask);
        if (!is_connected(c, mask))
            throw DisconnectedNetworkError("DC model: network is disconnected after applying the topology mask");
        const auto s = slack ? slack : c.slack_bus();
        if (!s) throw ValidationError("DC model: case has no slack bus");
        slack_ = *s;
        slack_index_ = c.bus_index(slack_);

        const std::size_t n = c.bus_count();
        reduced_.assign(n, -1);
        int next = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (i != slack_index_ && c.buses()[i].type != BusType::Isolated) reduced_[i] = next++;
        dim_ = next;

        std::vector<Eigen::Triplet<double, int>> trip;
        for (std::size_t k = 0; k < c.branch_count(); ++k) {
            if (!branch_active(c, mask, k)) continue;
            auto [f, t] = c.branch_ends(k);
            const double b = 1.0 / c.branches()[k].x;
            const int rf = reduced_[f], rt = reduced_[t];
            if (rf >= 0) trip.emplace_back(rf, rf, b);
            if (rt >= 0) trip.emplace_back(rt, rt, b);
            if (rf >= 0 && rt >= 0) {
                trip.emplace_back(rf, rt, -b);
                trip.emplace_back(rt, rf, -b);
            }
        }
        RealSparse bmat(dim_, dim_);
        bmat.setFromTriplets(trip.begin(), trip.end());
        bmat.makeCompressed();
        if (dim_ > 0 && !lu_.factorize(bmat))
            throw Error("DC model: singular susceptance matrix");
    }

    [[nodiscard]] const NetworkCase& network() const noexcept { return *case_; }
    [[nodiscard]] const TopologyMask& mask() const noexcept { return mask_; }
    [[nodiscard]] BusId slack() const noexcept { return slack_; }
    [[nodiscard]] std::size_t slack_index() const noexcept { return slack_index_; }

    /// Bus angles (radians, slack at 0) for per-bus injections in p.u. or MW;
    /// the slack entry of `injection` is ignored.
    [[nodiscard]] Eigen::VectorXd angles(std::span<const double> injection) const {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim_);
        for (std::size_t i = 0; i < reduced_.size(); ++i)
            if (reduced_[i] >= 0) rhs[reduced_[i]] = injection[i];
        const Eigen::VectorXd red = dim_ > 0 ? lu_.solve(rhs) : rhs;
        Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(reduced_.size()));
        for (std::size_t i = 0; i < reduced_.size(); ++i)
            if (reduced_[i] >= 0) theta[static_cast<Eigen::Index>(i)] = red[reduced_[i]];
        return theta;
    }

    /// Branch flows (θf − θt)/x in the injection unit; inactive branches 0.
    [[nodiscard]] std::vector<double> flows(std::span<const double> injection) const {
        const Eigen::VectorXd theta = angles(injection);
        const NetworkCase& c = *case_;
        std::vector<double> out(c.branch_count(), 0.0);
        for (std::size_t k = 0; k < c.branch_count(); ++k) {
            if (!branch_active(c, mask_, k)) continue;
            auto [f, t] = c.branch_ends(k);
            out[k] = (theta[static_cast<Eigen::Index>(f)] - theta[static_cast<Eigen::Index>(t)]) /
                     c.branches()[k].x;
        }
        return out;
    }

    /// Full-bus vector z with B_r z = e_f − e_t (slack entries zero). Row l of
    /// the PTDF matrix is this vector for branch l divided by x_l.
    [[nodiscard]] Eigen::VectorXd transfer_angles(std::size_t from, std::size_t to) const {
        std::vector<double> inj(reduced_.size(), 0.0);
        inj[from] += 1.0;
        inj[to] -= 1.0;
        return angles(inj);
    }

private:
    const NetworkCase* case_;
    TopologyMask mask_;
    BusId slack_{};
    std::size_t slack_index_ = 0;
    std::vector<int> reduced_;
    int dim_ = 0;
    SparseLu lu_;
};

/// DC branch flows (MW) for per-bus injections (MW); the slack absorbs the
/// balance. Throws DisconnectedNetworkError for a split network.
[[nodiscard]] inline std::vector<double> dc_flows(const NetworkCase& c, const TopologyMask& mask,
                                                  std::span<const double> injections_mw) {
    return DcModel(c, mask).flows(injections_mw);
}

/// Rows = monitored branches, columns = buses (internal order).
struct PtdfMatrix {
    Eigen::MatrixXd values;
    std::vector<BranchId> monitored;
    BusId slack_bus;
    TopologyMask mask;

    [[nodiscard]] double at(std::size_t row, std::size_t bus) const {
        return values(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(bus));
    }
    [[nodiscard]] std::optional<std::size_t> row_of(BranchId b) const {
        for (std::size_t r = 0; r < monitored.size(); ++r)
            if (monitored[r] == b) return r;
        return std::nullopt;
    }
};

/// PTDF rows for `monitored` (all active branches when empty). One reduced-B
/// back-solve per monitored branch.
[[nodiscard]] inline PtdfMatrix compute_ptdf(const NetworkCase& c, const TopologyMask& mask,
                                             std::optional<BusId> slack = std::nullopt,
                                             std::span<const BranchId> monitored = {}) {
    const DcModel model(c, mask, slack);
    PtdfMatrix out;
    out.slack_bus = model.slack();
    out.mask = mask;
    if (monitored.empty()) {
        for (std::size_t k = 0; k < c.branch_count(); ++k)
            if (branch_active(c, mask, k)) out.monitored.push_back(c.branches()[k].id);
    } else {
        out.monitored.assign(monitored.begin(), monitored.end());
    }
    out.values.resize(static_cast<Eigen::Index>(out.monitored.size()), static_cast<Eigen::Index>(c.bus_count()));
    for (std::size_t r = 0; r < out.monitored.size(); ++r) {
        const BranchId id = out.monitored[r];
        if (mask.removes(id) || !c.branch(id).in_service)
            throw ValidationError("PTDF: monitored branch " + std::to_string(id.value) + " is not active");
        const std::size_t pos = static_cast<std::size_t>(id.value - 1);
        auto [f, t] = c.branch_ends(pos);
        out.values.row(static_cast<Eigen::Index>(r)) =
            model.transfer_angles(f, t).transpose() / c.branches()[pos].x;
    }
    return out;
}

/// LODF of monitored branch l for the outage of c. Both must be rows of `ptdf`.
/// Throws IslandingError when c bridges the PTDF topology.
[[nodiscard]] inline double compute_lodf(const PtdfMatrix& ptdf, const NetworkCase& c, BranchId outaged,
                                         BranchId monitored) {
    if (outaged == monitored) return -1.0;
    const auto rc = ptdf.row_of(outaged);
    const auto rl = ptdf.row_of(monitored);
    if (!rc || !rl) throw ValidationError("LODF: branch is not a row of the PTDF matrix");
    auto [f, t] = c.branch_ends(static_cast<std::size_t>(outaged.value - 1));
    const double denom = 1.0 - (ptdf.at(*rc, f) - ptdf.at(*rc, t));
    if (std::abs(denom) < islanding_threshold)
        throw IslandingError("LODF: outage of branch " + std::to_string(outaged.value) + " islands the network");
    return (ptdf.at(*rl, f) - ptdf.at(*rl, t)) / denom;
}

/// TSDF of overloaded line m for opening k in the network without
/// contingency element c (an empty mask for generator contingencies).
[[nodiscard]] inline double compute_tsdf(const NetworkCase& c, const TopologyMask& contingency_mask,
                                         BranchId k, BranchId m) {
    if (k == m) return -1.0;
    const BranchId rows[] = {m, k};
    const PtdfMatrix p = compute_ptdf(c, contingency_mask, std::nullopt, rows);
    return compute_lodf(p, c, k, m);
}

[[nodiscard]] inline double compute_ftdf(double tsdf, double p_kc_mw) noexcept { return tsdf * p_kc_mw; }

/// Switching factors of every candidate k against a fixed set of overloaded
/// lines m, for one post-contingency topology. Factorizes once and solves
/// one transfer per overloaded line plus one per candidate.
class SwitchingFactors {
public:
    SwitchingFactors(const NetworkCase& c, const TopologyMask& post_contingency, std::span<const BranchId> overloaded)
        : case_(&c), model_(c, post_contingency), overloaded_(overloaded.begin(), overloaded.end()) {
        for (BranchId m : overloaded_) {
            const std::size_t pos = static_cast<std::size_t>(m.value - 1);
            auto [f, t] = c.branch_ends(pos);
            ptdf_rows_.push_back(model_.transfer_angles(f, t) / c.branches()[pos].x);
        }
    }

    [[nodiscard]] std::span<const BranchId> overloaded() const noexcept { return overloaded_; }

    /// TSDF of every overloaded line (in constructor order) for opening k.
    /// Empty when k islands the topology.
    [[nodiscard]] std::optional<std::vector<double>> tsdf(BranchId k) const {
        const NetworkCase& c = *case_;
        const std::size_t pos = static_cast<std::size_t>(k.value - 1);
        auto [f, t] = c.branch_ends(pos);
        const Eigen::VectorXd z = model_.transfer_angles(f, t);
        const double own = (z[static_cast<Eigen::Index>(f)] - z[static_cast<Eigen::Index>(t)]) / c.branches()[pos].x;
        const double denom = 1.0 - own;
        if (std::abs(denom) < islanding_threshold) return std::nullopt;
        std::vector<double> out(overloaded_.size());
        for (std::size_t r = 0; r < overloaded_.size(); ++r) {
            if (overloaded_[r] == k) {
                out[r] = -1.0;
                continue;
            }
            const Eigen::VectorXd& row = ptdf_rows_[r];
            out[r] = (row[static_cast<Eigen::Index>(f)] - row[static_cast<Eigen::Index>(t)]) / denom;
        }
        return out;
    }

private:
    const NetworkCase* case_;
    DcModel model_;
    std::vector<BranchId> overloaded_;
    std::vector<Eigen::VectorXd> ptdf_rows_;
};

/// One (contingency, overloaded line, candidate) factor triple.
struct SensitivityRecord {
    std::string contingency;
    BranchId overloaded;
    BranchId candidate;
    double tsdf = 0.0;
    double p_kc = 0.0;  // MW
    double ftdf = 0.0;  // MW
};

inline void write_sensitivity_table(std::ostream& os, std::span<const SensitivityRecord> records) {
    os << "contingency,m,k,tsdf,p_kc,ftdf\n";
    os.precision(10);
    for (const SensitivityRecord& r : records)
        os << r.contingency << ',' << r.overloaded.value << ',' << r.candidate.value << ',' << r.tsdf << ','
           << r.p_kc << ',' << r.ftdf << '\n';
}

}  // namespace gridswitch
