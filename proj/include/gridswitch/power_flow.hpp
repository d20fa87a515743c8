#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gridswitch/branch_flow.hpp"
#include "gridswitch/network.hpp"
#include "gridswitch/sparse_lu.hpp"
#include "gridswitch/ybus.hpp"

namespace gridswitch {

struct SolverParams {
    double tol = 1e-8;     // max |mismatch|, p.u.
    int max_iter = 30;     // Newton steps per pass
    int qlim_passes = 5;   // PV->PQ switching rounds
    bool enforce_q_limits = true;
    bool inherit_bus_types = false;  // keep the start solution's PV->PQ switches
};

struct PowerFlowSolution {
    std::vector<double> v_mag;  // p.u., internal bus order
    std::vector<double> v_ang;  // radians
    bool converged = false;
    int iterations = 0;  // Newton steps over all passes
    double max_mismatch = std::numeric_limits<double>::infinity();
    std::vector<BranchFlow> branch_flows;
    Complex slack_injection{0.0, 0.0};  // MW + j MVAr generated at the slack bus
    std::vector<BusType> bus_types;     // after reactive-limit switching
    std::vector<double> q_gen;          // MVAr generated per bus (specified value on PQ buses)
    std::vector<BusId> q_limited;       // PV buses held at a reactive limit
    std::string diagnostic;
};

/// Newton-Raphson AC power flow in polar form. The Jacobian always spans all
/// 2n voltage variables; fixed variables get identity rows, so one symbolic
/// factorization serves every topology and bus-type state of the case.
///
/// Not thread-safe: each worker owns its solver. The case must outlive it.
/// Each solve pivots afresh, so results do not depend on earlier solves.
class PowerFlowSolver {
public:
    explicit PowerFlowSolver(const NetworkCase& c) : case_(&c), pattern_(c) {
        const int n = static_cast<int>(c.bus_count());
        const ComplexSparse& yp = pattern_.pattern();
        y_ = yp;

        std::vector<Eigen::Triplet<double, int>> trip;
        trip.reserve(4 * static_cast<std::size_t>(yp.nonZeros()));
        for (int j = 0; j < n; ++j) {
            for (ComplexSparse::InnerIterator it(yp, j); it; ++it) {
                const int i = it.row();
                trip.emplace_back(i, j, 1.0);
                trip.emplace_back(n + i, j, 1.0);
                trip.emplace_back(i, n + j, 1.0);
                trip.emplace_back(n + i, n + j, 1.0);
            }
        }
        jac_.resize(2 * n, 2 * n);
        jac_.setFromTriplets(trip.begin(), trip.end());
        jac_.makeCompressed();

        jpos_.resize(static_cast<std::size_t>(yp.nonZeros()));
        const int* outer = yp.outerIndexPtr();
        const int* inner = yp.innerIndexPtr();
        for (int j = 0; j < n; ++j) {
            for (int p = outer[j]; p < outer[j + 1]; ++p) {
                const int i = inner[p];
                jpos_[static_cast<std::size_t>(p)] = {jac_position(i, j), jac_position(n + i, j),
                                                      jac_position(i, n + j),
                                                      jac_position(n + i, n + j)};
            }
        }
        lu_.analyze(jac_);
    }

    [[nodiscard]] const NetworkCase& network() const noexcept { return *case_; }

    /// Solves the case with `mask` applied. `start` (same case, any mask)
    /// seeds the voltages; bus types always restart from the case definition.
    [[nodiscard]] PowerFlowSolution solve(const TopologyMask& mask = {},
                                          const PowerFlowSolution* start = nullptr,
                                          const SolverParams& params = {}) {
        const NetworkCase& c = *case_;
        const std::size_t n = c.bus_count();
        const double base = c.base_mva();
        pattern_.assemble(mask, y_);
        lu_.reset();

        // Bus specification.
        std::vector<BusType> type(n);
        std::vector<double> p_inj(n, 0.0), q_inj(n, 0.0), v_set(n, 1.0);
        std::vector<double> q_max(n, 0.0), q_min(n, 0.0);
        std::vector<int> gen_count(n, 0);
        for (std::size_t g = 0; g < c.generator_count(); ++g) {
            if (!generator_active(c, mask, g)) continue;
            const Generator& gen = c.generators()[g];
            const std::size_t b = c.generator_bus_index(g);
            p_inj[b] += gen.p_set / base;
            q_inj[b] += gen.q_set / base;
            q_max[b] += gen.q_max / base;
            q_min[b] += gen.q_min / base;
            v_set[b] = gen.v_set;
            ++gen_count[b];
        }
        for (std::size_t i = 0; i < n; ++i) {
            const Bus& b = c.buses()[i];
            type[i] = b.type;
            if (type[i] == BusType::PV && gen_count[i] == 0) type[i] = BusType::PQ;
            p_inj[i] -= b.active_load / base;
            q_inj[i] -= b.reactive_load / base;
        }
        std::vector<char> limited(n, 0);
        if (params.inherit_bus_types && start && start->bus_types.size() == n) {
            for (BusId id : start->q_limited) {
                const std::size_t i = c.bus_index(id);
                if (type[i] != BusType::PV) continue;
                type[i] = BusType::PQ;
                q_inj[i] = (start->q_gen[i] - c.buses()[i].reactive_load) / base;
                limited[i] = 1;
            }
        }

        PowerFlowSolution sol;
        sol.v_mag.resize(n);
        sol.v_ang.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (start && start->v_mag.size() == n) {
                sol.v_mag[i] = start->v_mag[i];
                sol.v_ang[i] = start->v_ang[i];
            } else {
                sol.v_mag[i] = c.buses()[i].v_init;
                sol.v_ang[i] = c.buses()[i].angle_init * std::numbers::pi / 180.0;
            }
            if ((type[i] == BusType::PV || type[i] == BusType::Slack) && gen_count[i] > 0)
                sol.v_mag[i] = v_set[i];
            if (!(sol.v_mag[i] > 0.0)) sol.v_mag[i] = 1.0;
        }

        const int passes = params.enforce_q_limits ? params.qlim_passes : 0;
        for (int pass = 0;; ++pass) {
            if (!newton(type, p_inj, q_inj, params, sol)) break;
            if (pass >= passes) break;
            // PV buses outside their aggregate reactive range become PQ at the bound.
            bool changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (type[i] != BusType::PV) continue;
                const double qg = s_[i].imag() + c.buses()[i].reactive_load / base;
                if (qg > q_max[i] + qlim_slack) {
                    type[i] = BusType::PQ;
                    q_inj[i] = q_max[i] - c.buses()[i].reactive_load / base;
                    limited[i] = 1;
                    changed = true;
                } else if (qg < q_min[i] - qlim_slack) {
                    type[i] = BusType::PQ;
                    q_inj[i] = q_min[i] - c.buses()[i].reactive_load / base;
                    limited[i] = 1;
                    changed = true;
                }
            }
            if (!changed) break;
        }

        sol.bus_types = type;
        sol.q_gen.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double qd = c.buses()[i].reactive_load / base;
            const bool computed = type[i] == BusType::PV || type[i] == BusType::Slack;
            sol.q_gen[i] = ((computed ? s_[i].imag() : q_inj[i]) + qd) * base;
            if (limited[i]) sol.q_limited.push_back(c.buses()[i].id);
        }
        if (sol.converged) {
            sol.branch_flows = compute_branch_flows(sol.v_mag, sol.v_ang, c, mask);
            for (std::size_t i = 0; i < n; ++i) {
                if (type[i] != BusType::Slack) continue;
                const Bus& b = c.buses()[i];
                sol.slack_injection = s_[i] * base + Complex(b.active_load, b.reactive_load);
            }
        }
        return sol;
    }

private:
    static constexpr double qlim_slack = 1e-9;
    static constexpr double divergence_bound = 1e6;

    [[nodiscard]] int jac_position(int row, int col) const {
        const int* outer = jac_.outerIndexPtr();
        const int* inner = jac_.innerIndexPtr();
        const int* first = inner + outer[col];
        const int* last = inner + outer[col + 1];
        const int* it = std::lower_bound(first, last, row);
        return static_cast<int>(it - inner);
    }

    void evaluate(const PowerFlowSolution& sol) {
        const int n = static_cast<int>(case_->bus_count());
        v_.resize(n);
        i_.assign(static_cast<std::size_t>(n), Complex(0.0, 0.0));
        for (int k = 0; k < n; ++k) v_[static_cast<std::size_t>(k)] = std::polar(sol.v_mag[k], sol.v_ang[k]);
        const int* outer = y_.outerIndexPtr();
        const int* inner = y_.innerIndexPtr();
        const Complex* val = y_.valuePtr();
        for (int j = 0; j < n; ++j)
            for (int p = outer[j]; p < outer[j + 1]; ++p)
                i_[static_cast<std::size_t>(inner[p])] += val[p] * v_[static_cast<std::size_t>(j)];
        s_.resize(static_cast<std::size_t>(n));
        for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) s_[k] = v_[k] * std::conj(i_[k]);
    }

    /// One Newton pass at fixed bus types. Updates sol in place; returns
    /// false when the pass fails (non-convergence or singular Jacobian).
    bool newton(const std::vector<BusType>& type, const std::vector<double>& p_inj,
                const std::vector<double>& q_inj, const SolverParams& params, PowerFlowSolution& sol) {
        const std::size_t n = case_->bus_count();
        std::vector<char> fix_p(n), fix_q(n);
        for (std::size_t i = 0; i < n; ++i) {
            fix_p[i] = type[i] == BusType::Slack || type[i] == BusType::Isolated;
            fix_q[i] = type[i] != BusType::PQ;
        }
        Eigen::VectorXd f(2 * n);
        sol.converged = false;
        for (int iter = 0;; ++iter) {
            evaluate(sol);
            double worst = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double dp = fix_p[i] ? 0.0 : s_[i].real() - p_inj[i];
                const double dq = fix_q[i] ? 0.0 : s_[i].imag() - q_inj[i];
                f[static_cast<Eigen::Index>(i)] = dp;
                f[static_cast<Eigen::Index>(n + i)] = dq;
                worst = std::max({worst, std::abs(dp), std::abs(dq)});
            }
            if (!std::isfinite(worst) || worst > divergence_bound) {
                sol.max_mismatch = worst;
                sol.diagnostic = "diverged after " + std::to_string(iter) + " iterations";
                return false;
            }
            sol.max_mismatch = worst;
            if (worst <= params.tol) {
                sol.converged = true;
                return true;
            }
            if (iter >= params.max_iter) {
                sol.diagnostic = "no convergence after " + std::to_string(params.max_iter) +
                                 " iterations (max mismatch " + std::to_string(worst) + " p.u.)";
                return false;
            }
            fill_jacobian(fix_p, fix_q);
            if (!lu_.factorize(jac_)) {
                sol.diagnostic = "singular Jacobian";
                return false;
            }
            const Eigen::VectorXd dx = lu_.solve(-f);
            for (std::size_t i = 0; i < n; ++i) {
                sol.v_ang[i] += dx[static_cast<Eigen::Index>(i)];
                sol.v_mag[i] += dx[static_cast<Eigen::Index>(n + i)];
            }
            ++sol.iterations;
        }
    }

    void fill_jacobian(const std::vector<char>& fix_p, const std::vector<char>& fix_q) {
        const int n = static_cast<int>(case_->bus_count());
        double* jv = jac_.valuePtr();
        const int* outer = y_.outerIndexPtr();
        const int* inner = y_.innerIndexPtr();
        const Complex* val = y_.valuePtr();
        const Complex jj(0.0, 1.0);
        for (int j = 0; j < n; ++j) {
            const Complex vj = v_[static_cast<std::size_t>(j)];
            const double mj = std::abs(vj);
            for (int p = outer[j]; p < outer[j + 1]; ++p) {
                const int i = inner[p];
                const std::size_t ui = static_cast<std::size_t>(i);
                const Complex y = val[p];
                const Complex vi = v_[ui];
                Complex d_ang, d_mag;
                if (i == j) {
                    d_ang = jj * (s_[ui] - std::norm(vi) * std::conj(y));
                    d_mag = std::conj(y) * mj + s_[ui] / mj;
                } else {
                    d_ang = -jj * vi * std::conj(y * vj);
                    d_mag = vi * std::conj(y) * std::conj(vj) / mj;
                }
                const auto& pos = jpos_[static_cast<std::size_t>(p)];
                const bool diag = i == j;
                jv[pos[0]] = fix_p[ui] ? (diag ? 1.0 : 0.0) : d_ang.real();
                jv[pos[1]] = fix_q[ui] ? 0.0 : d_ang.imag();
                jv[pos[2]] = fix_p[ui] ? 0.0 : d_mag.real();
                jv[pos[3]] = fix_q[ui] ? (diag ? 1.0 : 0.0) : d_mag.imag();
            }
        }
    }

    const NetworkCase* case_;
    YbusPattern pattern_;
    ComplexSparse y_;
    RealSparse jac_;
    std::vector<std::array<int, 4>> jpos_;
    SparseLu lu_;
    std::vector<Complex> v_, i_, s_;
};

[[nodiscard]] inline PowerFlowSolution solve_power_flow(const NetworkCase& c, const TopologyMask& mask = {},
                                                        const PowerFlowSolution* start = nullptr,
                                                        const SolverParams& params = {}) {
    PowerFlowSolver solver(c);
    return solver.solve(mask, start, params);
}

/// Largest nodal balance residual (p.u.) of a solution, recomputed from a
/// freshly built admittance matrix. P is checked at every non-slack bus, Q at
/// every bus the solution reports as PQ.
[[nodiscard]] inline double compute_mismatch(const NetworkCase& c, const TopologyMask& mask,
                                             const PowerFlowSolution& sol) {
    const AdmittanceMatrix y = build_ybus(c, mask);
    const std::size_t n = c.bus_count();
    const double base = c.base_mva();
    std::vector<Complex> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::polar(sol.v_mag[i], sol.v_ang[i]);
    std::vector<Complex> cur(n, Complex(0.0, 0.0));
    for (int j = 0; j < y.entries.outerSize(); ++j)
        for (ComplexSparse::InnerIterator it(y.entries, j); it; ++it)
            cur[static_cast<std::size_t>(it.row())] += it.value() * v[static_cast<std::size_t>(j)];
    std::vector<double> pg(n, 0.0);
    for (std::size_t g = 0; g < c.generator_count(); ++g)
        if (generator_active(c, mask, g)) pg[c.generator_bus_index(g)] += c.generators()[g].p_set;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Bus& b = c.buses()[i];
        const BusType t = sol.bus_types.empty() ? b.type : sol.bus_types[i];
        if (t == BusType::Slack || t == BusType::Isolated) continue;
        const Complex s = v[i] * std::conj(cur[i]);
        worst = std::max(worst, std::abs(s.real() - (pg[i] - b.active_load) / base));
        if (t == BusType::PQ)
            worst = std::max(worst, std::abs(s.imag() - (sol.q_gen[i] - b.reactive_load) / base));
    }
    return worst;
}

}  // namespace gridswitch
