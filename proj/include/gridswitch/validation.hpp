#pragma once

#include <string>
#include <vector>

#include "gridswitch/network.hpp"
#include "gridswitch/topology.hpp"

namespace gridswitch {

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    [[nodiscard]] bool ok() const noexcept { return errors.empty(); }
};

namespace validation_detail {

inline std::string describe_component(const std::vector<BusId>& buses) {
    constexpr std::size_t shown = 8;
    std::string s = "{";
    for (std::size_t i = 0; i < buses.size() && i < shown; ++i) {
        if (i) s += ", ";
        s += std::to_string(buses[i].value);
    }
    if (buses.size() > shown) s += ", ... (" + std::to_string(buses.size()) + " buses)";
    return s + "}";
}

}  // namespace validation_detail

/// Engineering checks on a parsed case. Never throws; findings go in the report.
[[nodiscard]] inline ValidationReport validate_case(const NetworkCase& c) {
    ValidationReport rep;

    int slack_count = 0;
    for (const Bus& b : c.buses()) {
        const std::string tag = "bus " + std::to_string(b.id.value);
        if (b.type == BusType::Slack) ++slack_count;
        if (!(b.v_min < b.v_max)) rep.errors.push_back(tag + ": v_min must be below v_max");
        if (!(b.base_kv > 0.0)) rep.errors.push_back(tag + ": base_kv must be positive");
    }
    if (slack_count == 0) rep.errors.push_back("no slack bus");
    if (slack_count > 1) rep.errors.push_back("more than one slack bus (" + std::to_string(slack_count) + ")");

    if (auto slack = c.slack_bus()) {
        bool has_gen = false;
        for (const Generator& g : c.generators()) has_gen |= g.in_service && g.bus == *slack;
        if (!has_gen)
            rep.errors.push_back("slack bus " + std::to_string(slack->value) +
                                 " has no in-service generator");
    }

    std::size_t unmonitored = 0;
    for (const Branch& br : c.branches()) {
        if (!br.in_service) continue;
        const std::string tag = "branch " + std::to_string(br.id.value);
        if (br.x == 0.0) rep.errors.push_back(tag + ": zero reactance");
        if (br.x < 0.0) rep.warnings.push_back(tag + ": negative reactance");
        if (br.rate_normal == 0.0 || br.rate_emergency == 0.0) ++unmonitored;
        if (br.rate_normal > 0.0 && br.rate_emergency > 0.0 && br.rate_emergency < br.rate_normal)
            rep.warnings.push_back(tag + ": emergency rating below normal rating");
    }
    if (unmonitored > 0)
        rep.warnings.push_back(std::to_string(unmonitored) +
                               " in-service branch(es) have a zero rating (unmonitored)");

    for (const Generator& g : c.generators()) {
        const std::string tag = "generator " + std::to_string(g.id.value);
        if (g.q_min > g.q_max) rep.errors.push_back(tag + ": q_min exceeds q_max");
        if (g.p_min > g.p_max) rep.errors.push_back(tag + ": p_min exceeds p_max");
    }

    const auto comps = connected_components(c);
    if (comps.size() > 1) {
        std::string msg = "network is split into " + std::to_string(comps.size()) + " islands:";
        for (std::size_t i = 0; i < comps.size(); ++i)
            msg += (i ? ", " : " ") + validation_detail::describe_component(comps[i]);
        rep.errors.push_back(msg);
    }
    return rep;
}

}  // namespace gridswitch
