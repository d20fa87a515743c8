#pragma once

// Case builders and independent reference computations for the test suites.

#include <cmath>
#include <complex>
#include <numbers>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridswitch/gridswitch.hpp"

namespace gstest {

using namespace gridswitch;

#ifndef GRIDSWITCH_DATA_DIR
#define GRIDSWITCH_DATA_DIR "data"
#endif

inline std::string data_path(const std::string& file) { return std::string(GRIDSWITCH_DATA_DIR) + "/" + file; }

inline const NetworkCase& ieee24() {
    static const NetworkCase c = load_case(data_path("rts24_tntc.m"));
    return c;
}

inline Bus bus(int id, BusType type, double pd = 0.0, double qd = 0.0) {
    Bus b;
    b.id = BusId{id};
    b.type = type;
    b.active_load = pd;
    b.reactive_load = qd;
    b.base_kv = 138.0;
    return b;
}

inline Branch line(int from, int to, double r, double x, double b = 0.0, double rating = 0.0) {
    Branch br;
    br.from_bus = BusId{from};
    br.to_bus = BusId{to};
    br.r = r;
    br.x = x;
    br.charging_susceptance = b;
    br.rate_normal = rating;
    br.rate_emergency = rating;
    return br;
}

inline Generator gen(int bus_id, double p, double v = 1.0, double qmax = 9999.0, double qmin = -9999.0) {
    Generator g;
    g.bus = BusId{bus_id};
    g.p_set = p;
    g.v_set = v;
    g.q_max = qmax;
    g.q_min = qmin;
    g.p_max = std::max(p, 0.0) + 100.0;
    return g;
}

/// Slack bus 1 with unit voltage, PQ bus 2 with the given load, one series line.
inline NetworkCase two_bus(double load_mw, double load_mvar, double r, double x, double b = 0.0) {
    return NetworkCase("two_bus", 100.0, {bus(1, BusType::Slack), bus(2, BusType::PQ, load_mw, load_mvar)},
                       {line(1, 2, r, x, b)}, {gen(1, 0.0)});
}

/// Triangle 1-2, 1-3, 2-3 with equal reactance; slack at `slack`.
inline NetworkCase triangle(int slack = 3, double x = 0.1) {
    std::vector<Bus> buses;
    for (int i = 1; i <= 3; ++i) buses.push_back(bus(i, i == slack ? BusType::Slack : BusType::PQ));
    return NetworkCase("triangle", 100.0, buses, {line(1, 2, 0.0, x), line(1, 3, 0.0, x), line(2, 3, 0.0, x)},
                       {gen(slack, 0.0)});
}

struct RandomSpec {
    int buses = 12;
    double extra_edge_ratio = 0.6;
    bool resistive = true;
    bool charging = true;
    int generators = 3;
    bool parallel_lines = true;
};

/// Random connected network: a random spanning tree plus extra edges, loads on
/// every non-slack bus and a few PV generators. Ratings are left at zero.
inline NetworkCase random_network(unsigned seed, RandomSpec spec = {}) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = spec.buses;
    std::vector<Bus> buses;
    for (int i = 1; i <= n; ++i) {
        Bus b = bus(i, i == 1 ? BusType::Slack : BusType::PQ, i == 1 ? 0.0 : 5.0 + 25.0 * u(rng),
                    i == 1 ? 0.0 : 8.0 * u(rng));
        buses.push_back(b);
    }
    std::vector<Branch> branches;
    auto add = [&](int f, int t) {
        const double x = 0.03 + 0.15 * u(rng);
        const double r = spec.resistive ? x * (0.05 + 0.25 * u(rng)) : 0.0;
        const double b = spec.charging ? 0.02 * u(rng) : 0.0;
        branches.push_back(line(f, t, r, x, b));
    };
    for (int i = 2; i <= n; ++i) add(1 + static_cast<int>(u(rng) * (i - 1)), i);
    const int extra = static_cast<int>(spec.extra_edge_ratio * n);
    for (int e = 0; e < extra; ++e) {
        int f = 1 + static_cast<int>(u(rng) * n), t = 1 + static_cast<int>(u(rng) * n);
        if (f == t) continue;
        add(f, t);
    }
    if (spec.parallel_lines && n > 2) add(branches.front().from_bus.value, branches.front().to_bus.value);

    std::vector<Generator> gens{gen(1, 0.0, 1.02)};
    std::vector<int> pv;
    for (int g = 0; g < spec.generators && g + 2 <= n; ++g) {
        const int id = 2 + static_cast<int>(u(rng) * (n - 1));
        if (std::find(pv.begin(), pv.end(), id) != pv.end()) continue;
        pv.push_back(id);
        buses[static_cast<std::size_t>(id - 1)].type = BusType::PV;
        gens.push_back(gen(id, 20.0 + 40.0 * u(rng), 0.99 + 0.04 * u(rng)));
    }
    return NetworkCase("random_" + std::to_string(seed), 100.0, buses, branches, gens);
}

/// Active-branch connectivity by breadth-first search.
inline bool bfs_connected(const NetworkCase& c, const TopologyMask& mask) {
    const std::size_t n = c.bus_count();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t k = 0; k < c.branch_count(); ++k) {
        if (!branch_active(c, mask, k)) continue;
        auto [f, t] = c.branch_ends(k);
        adj[f].push_back(t);
        adj[t].push_back(f);
    }
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = true;
    std::size_t count = 1;
    while (!q.empty()) {
        const std::size_t v = q.front();
        q.pop();
        for (std::size_t w : adj[v])
            if (!seen[w]) {
                seen[w] = true;
                ++count;
                q.push(w);
            }
    }
    return count == n;
}

/// Bridges by removing each active branch in turn.
inline std::vector<BranchId> brute_force_bridges(const NetworkCase& c, const TopologyMask& mask = {}) {
    std::vector<BranchId> out;
    for (std::size_t k = 0; k < c.branch_count(); ++k) {
        if (!branch_active(c, mask, k)) continue;
        if (!bfs_connected(c, mask.with(c.branches()[k].id))) out.push_back(c.branches()[k].id);
    }
    return out;
}

/// Dense DC power flow: full B from reactances, slack row and column deleted,
/// solved by full-pivot LU. Returns branch flows in MW.
inline std::vector<double> dense_dc_flows(const NetworkCase& c, const TopologyMask& mask,
                                          const std::vector<double>& injection_mw) {
    const std::size_t n = c.bus_count();
    const std::size_t s = c.bus_index(*c.slack_bus());
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < c.branch_count(); ++k) {
        if (!branch_active(c, mask, k)) continue;
        auto [f, t] = c.branch_ends(k);
        const double y = 1.0 / c.branches()[k].x;
        const auto fi = static_cast<Eigen::Index>(f), ti = static_cast<Eigen::Index>(t);
        b(fi, fi) += y;
        b(ti, ti) += y;
        b(fi, ti) -= y;
        b(ti, fi) -= y;
    }
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < n; ++i)
        if (i != s) keep.push_back(static_cast<Eigen::Index>(i));
    const auto m = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd br(m, m);
    Eigen::VectorXd p(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        p[i] = injection_mw[static_cast<std::size_t>(keep[static_cast<std::size_t>(i)])];
        for (Eigen::Index j = 0; j < m; ++j) br(i, j) = b(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
    }
    const Eigen::VectorXd th = br.fullPivLu().solve(p);
    std::vector<double> theta(n, 0.0);
    for (Eigen::Index i = 0; i < m; ++i) theta[static_cast<std::size_t>(keep[static_cast<std::size_t>(i)])] = th[i];
    std::vector<double> flows(c.branch_count(), 0.0);
    for (std::size_t k = 0; k < c.branch_count(); ++k) {
        if (!branch_active(c, mask, k)) continue;
        auto [f, t] = c.branch_ends(k);
        flows[k] = (theta[f] - theta[t]) / c.branches()[k].x;
    }
    return flows;
}

/// Dense admittance matrix assembled directly from the pi model.
inline Eigen::MatrixXcd dense_ybus(const NetworkCase& c, const TopologyMask& mask = {}) {
    using cd = std::complex<double>;
    const auto n = static_cast<Eigen::Index>(c.bus_count());
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < c.bus_count(); ++i) {
        const Bus& b = c.buses()[i];
        y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) +=
            cd(b.shunt_conductance, b.shunt_susceptance) / c.base_mva();
    }
    for (std::size_t k = 0; k < c.branch_count(); ++k) {
        if (!branch_active(c, mask, k)) continue;
        const Branch& br = c.branches()[k];
        auto [f, t] = c.branch_ends(k);
        const cd ys = cd(1.0, 0.0) / cd(br.r, br.x);
        const cd bc(0.0, br.charging_susceptance / 2.0);
        const double ang = br.phase_shift * std::numbers::pi / 180.0;
        const cd a = br.tap_ratio * cd(std::cos(ang), std::sin(ang));
        const auto fi = static_cast<Eigen::Index>(f), ti = static_cast<Eigen::Index>(t);
        y(fi, fi) += (ys + bc) / (a * std::conj(a));
        y(fi, ti) += -ys / std::conj(a);
        y(ti, fi) += -ys / a;
        y(ti, ti) += ys + bc;
    }
    return y;
}

struct DenseSolution {
    std::vector<double> v_mag, v_ang;
    bool converged = false;
};

/// Reference AC power flow without reactive limits: rectangular residuals
/// and a finite-difference dense Jacobian, flat start at setpoints.
inline DenseSolution dense_power_flow(const NetworkCase& c, const TopologyMask& mask = {}, double tol = 1e-11) {
    using cd = std::complex<double>;
    const std::size_t n = c.bus_count();
    const Eigen::MatrixXcd y = dense_ybus(c, mask);
    std::vector<double> psp(n, 0.0), qsp(n, 0.0), vset(n, 1.0);
    std::vector<BusType> type(n);
    std::vector<bool> has_gen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        type[i] = c.buses()[i].type;
        psp[i] = -c.buses()[i].active_load / c.base_mva();
        qsp[i] = -c.buses()[i].reactive_load / c.base_mva();
    }
    for (std::size_t g = 0; g < c.generator_count(); ++g) {
        if (!generator_active(c, mask, g)) continue;
        const std::size_t i = c.generator_bus_index(g);
        psp[i] += c.generators()[g].p_set / c.base_mva();
        vset[i] = c.generators()[g].v_set;
        has_gen[i] = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (type[i] == BusType::PV && !has_gen[i]) type[i] = BusType::PQ;
        if (type[i] == BusType::PQ)
            for (std::size_t g = 0; g < c.generator_count(); ++g)
                if (generator_active(c, mask, g) && c.generator_bus_index(g) == i)
                    qsp[i] += c.generators()[g].q_set / c.base_mva();
    }

    DenseSolution sol;
    sol.v_mag.assign(n, 1.0);
    sol.v_ang.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (type[i] != BusType::PQ) sol.v_mag[i] = vset[i];

    std::vector<std::pair<std::size_t, bool>> vars;  // (bus, is_magnitude)
    for (std::size_t i = 0; i < n; ++i)
        if (type[i] != BusType::Slack) vars.push_back({i, false});
    for (std::size_t i = 0; i < n; ++i)
        if (type[i] == BusType::PQ) vars.push_back({i, true});
    const auto m = static_cast<Eigen::Index>(vars.size());

    auto residual = [&](const std::vector<double>& vm, const std::vector<double>& va) {
        Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = std::polar(vm[i], va[i]);
        const Eigen::VectorXcd cur = y * v;
        Eigen::VectorXd f(m);
        for (Eigen::Index r = 0; r < m; ++r) {
            const auto [i, mag] = vars[static_cast<std::size_t>(r)];
            const cd s = v[static_cast<Eigen::Index>(i)] * std::conj(cur[static_cast<Eigen::Index>(i)]);
            f[r] = mag ? s.imag() - qsp[i] : s.real() - psp[i];
        }
        return f;
    };

    for (int it = 0; it < 50; ++it) {
        const Eigen::VectorXd f = residual(sol.v_mag, sol.v_ang);
        if (f.cwiseAbs().maxCoeff() < tol) {
            sol.converged = true;
            return sol;
        }
        Eigen::MatrixXd jac(m, m);
        const double h = 1e-7;
        for (Eigen::Index col = 0; col < m; ++col) {
            auto vm = sol.v_mag, va = sol.v_ang;
            const auto [i, mag] = vars[static_cast<std::size_t>(col)];
            (mag ? vm[i] : va[i]) += h;
            auto vm2 = sol.v_mag, va2 = sol.v_ang;
            (mag ? vm2[i] : va2[i]) -= h;
            jac.col(col) = (residual(vm, va) - residual(vm2, va2)) / (2.0 * h);
        }
        const Eigen::VectorXd dx = jac.fullPivLu().solve(-f);
        for (Eigen::Index r = 0; r < m; ++r) {
            const auto [i, mag] = vars[static_cast<std::size_t>(r)];
            (mag ? sol.v_mag[i] : sol.v_ang[i]) += dx[r];
        }
    }
    return sol;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/// Copy of `c` with every branch rated at `factor` times its base-case
/// loading (normal) and `factor * emergency_ratio` (emergency).
inline NetworkCase rated_copy(const NetworkCase& c, double factor, double emergency_ratio = 1.1) {
    const PowerFlowSolution s = solve_power_flow(c);
    std::vector<Branch> branches(c.branches().begin(), c.branches().end());
    for (std::size_t k = 0; k < branches.size(); ++k) {
        const double l = std::max(s.branch_flows[k].loading(), 1.0);
        branches[k].rate_normal = std::round(factor * l * 10.0) / 10.0;
        branches[k].rate_emergency = std::round(factor * emergency_ratio * l * 10.0) / 10.0;
    }
    return NetworkCase(c.name() + "_rated", c.base_mva(), std::vector<Bus>(c.buses().begin(), c.buses().end()),
                       branches, std::vector<Generator>(c.generators().begin(), c.generators().end()));
}

inline SolverParams no_q_limits() {
    SolverParams p;
    p.enforce_q_limits = false;
    return p;
}

}  // namespace gstest
