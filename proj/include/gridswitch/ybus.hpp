#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/SparseCore>

#include "gridswitch/error.hpp"
#include "gridswitch/network.hpp"
#include "gridswitch/topology.hpp"

namespace gridswitch {

using Complex = std::complex<double>;
using ComplexSparse = Eigen::SparseMatrix<Complex, Eigen::ColMajor, int>;

/// Two-port admittances of the standard pi model with an ideal
/// phase-shifting transformer on the from side.
struct BranchAdmittance {
    Complex ff, ft, tf, tt;
};

[[nodiscard]] inline BranchAdmittance branch_admittance(const Branch& br) {
    const Complex ys = 1.0 / Complex(br.r, br.x);
    const Complex shunt(0.0, br.charging_susceptance / 2.0);
    const Complex tap = std::polar(br.tap_ratio, br.phase_shift * std::numbers::pi / 180.0);
    const Complex tt = ys + shunt;
    return {tt / std::norm(tap), -ys / std::conj(tap), -ys / tap, tt};
}

/// Bus admittance matrix in internal (file-order) bus indexing.
struct AdmittanceMatrix {
    ComplexSparse entries;
    std::vector<BusId> bus_ids;

    [[nodiscard]] std::size_t dimension() const noexcept { return bus_ids.size(); }
    [[nodiscard]] Complex at(std::size_t i, std::size_t j) const { return entries.coeff(static_cast<int>(i), static_cast<int>(j)); }
};

/// Fixed sparsity pattern over every in-service branch plus the full
/// diagonal. Masked branches keep their slots but receive no values, so all
/// topologies of one case share a single pattern.
class YbusPattern {
public:
    explicit YbusPattern(const NetworkCase& c) : case_(&c) {
        const int n = static_cast<int>(c.bus_count());
        std::vector<Eigen::Triplet<Complex, int>> trip;
        trip.reserve(c.bus_count() + 4 * c.branch_count());
        for (int i = 0; i < n; ++i) trip.emplace_back(i, i, Complex(1.0, 0.0));
        for (std::size_t k = 0; k < c.branch_count(); ++k) {
            if (!c.branches()[k].in_service) continue;
            auto [f, t] = c.branch_ends(k);
            trip.emplace_back(static_cast<int>(f), static_cast<int>(t), Complex(1.0, 0.0));
            trip.emplace_back(static_cast<int>(t), static_cast<int>(f), Complex(1.0, 0.0));
        }
        pattern_.resize(n, n);
        pattern_.setFromTriplets(trip.begin(), trip.end());
        pattern_.makeCompressed();

        diag_.resize(c.bus_count());
        for (int i = 0; i < n; ++i) diag_[static_cast<std::size_t>(i)] = position(i, i);
        stamps_.resize(c.branch_count(), {-1, -1, -1, -1});
        admittances_.resize(c.branch_count());
        for (std::size_t k = 0; k < c.branch_count(); ++k) {
            if (!c.branches()[k].in_service) continue;
            auto [f, t] = c.branch_ends(k);
            const int fi = static_cast<int>(f), ti = static_cast<int>(t);
            stamps_[k] = {position(fi, fi), position(fi, ti), position(ti, fi), position(ti, ti)};
            admittances_[k] = branch_admittance(c.branches()[k]);
        }
    }

    [[nodiscard]] const ComplexSparse& pattern() const noexcept { return pattern_; }

    /// Writes Ybus values for `mask` into `y`, which must share the pattern.
    void assemble(const TopologyMask& mask, ComplexSparse& y) const {
        const NetworkCase& c = *case_;
        if (y.nonZeros() != pattern_.nonZeros()) y = pattern_;
        Complex* v = y.valuePtr();
        std::fill(v, v + y.nonZeros(), Complex(0.0, 0.0));
        const double base = c.base_mva();
        for (std::size_t i = 0; i < c.bus_count(); ++i) {
            const Bus& b = c.buses()[i];
            v[diag_[i]] += Complex(b.shunt_conductance, b.shunt_susceptance) / base;
        }
        for (std::size_t k = 0; k < c.branch_count(); ++k) {
            if (!branch_active(c, mask, k)) continue;
            const auto& s = stamps_[k];
            const auto& a = admittances_[k];
            v[s[0]] += a.ff;
            v[s[1]] += a.ft;
            v[s[2]] += a.tf;
            v[s[3]] += a.tt;
        }
    }

    /// Offset of entry (row, col) inside the compressed value array.
    [[nodiscard]] int position(int row, int col) const {
        const int* outer = pattern_.outerIndexPtr();
        const int* inner = pattern_.innerIndexPtr();
        const int* first = inner + outer[col];
        const int* last = inner + outer[col + 1];
        const int* it = std::lower_bound(first, last, row);
        if (it == last || *it != row) return -1;
        return static_cast<int>(it - inner);
    }

private:
    const NetworkCase* case_;
    ComplexSparse pattern_;
    std::vector<int> diag_;
    std::vector<std::array<int, 4>> stamps_;
    std::vector<BranchAdmittance> admittances_;
};

/// Bus admittance matrix of the case with `mask` applied. Throws
/// DisconnectedNetworkError when the masked network is split.
[[nodiscard]] inline AdmittanceMatrix build_ybus(const NetworkCase& c, const TopologyMask& mask = {}) {
    check_mask(c, mask);
    if (!is_connected(c, mask))
        throw DisconnectedNetworkError("network is disconnected after applying the topology mask");
    YbusPattern pat(c);
    AdmittanceMatrix out;
    out.entries = pat.pattern();
    pat.assemble(mask, out.entries);
    out.entries.prune([](const int&, const int&, const Complex& v) { return v != Complex(0.0, 0.0); });
    out.entries.makeCompressed();
    out.bus_ids.reserve(c.bus_count());
    for (const Bus& b : c.buses()) out.bus_ids.push_back(b.id);
    return out;
}

}  // namespace gridswitch
