#pragma once

// Reader/writer for MATPOWER version-2 case files (the `mpc.baseMVA`,
// `mpc.bus`, `mpc.gen`, `mpc.branch` subset used by power flow).

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gridswitch/error.hpp"
#include "gridswitch/network.hpp"

namespace gridswitch {

namespace matpower_detail {

inline std::string strip_comments(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_comment = false;
    bool in_string = false;
    for (char ch : text) {
        if (ch == '\n') {
            in_comment = false;
            in_string = false;
            out.push_back(ch);
            continue;
        }
        if (in_comment) continue;
        if (ch == '\'') in_string = !in_string;
        if (ch == '%' && !in_string) {
            in_comment = true;
            continue;
        }
        out.push_back(ch);
    }
    return out;
}

inline bool is_space(char ch) { return ch == ' ' || ch == '\t' || ch == '\r' || ch == ','; }

inline std::optional<double> parse_number(std::string_view tok) {
    if (tok == "Inf" || tok == "inf" || tok == "+Inf") return std::numeric_limits<double>::infinity();
    if (tok == "-Inf" || tok == "-inf") return -std::numeric_limits<double>::infinity();
    if (tok == "NaN" || tok == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) return std::nullopt;
    return v;
}

/// Locates `mpc.<field> = <value>;` and returns the raw right-hand side.
inline std::optional<std::string_view> find_assignment(std::string_view text, std::string_view field) {
    const std::string key = "mpc." + std::string(field);
    std::size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string_view::npos) {
        std::size_t p = pos + key.size();
        while (p < text.size() && (text[p] == ' ' || text[p] == '\t')) ++p;
        if (p < text.size() && text[p] == '=') {
            ++p;
            std::size_t end;
            while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
            if (p < text.size() && text[p] == '[') {
                end = text.find(']', p);
                if (end == std::string_view::npos)
                    throw ParseError("matrix mpc." + std::string(field) + " is missing its closing ']'");
                return text.substr(p + 1, end - p - 1);
            }
            end = text.find_first_of(";\n", p);
            return text.substr(p, end == std::string_view::npos ? std::string_view::npos : end - p);
        }
        pos = p;
    }
    return std::nullopt;
}

using Matrix = std::vector<std::vector<double>>;

inline Matrix parse_matrix(std::string_view body, std::string_view name, std::size_t min_cols) {
    Matrix rows;
    std::vector<double> row;
    std::size_t row_no = 1;
    auto finish_row = [&] {
        if (row.empty()) return;
        if (row.size() < min_cols) {
            throw ParseError(std::string(name) + " row " + std::to_string(row_no) + ", column " +
                             std::to_string(row.size() + 1) + ": expected at least " +
                             std::to_string(min_cols) + " columns, found " +
                             std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
        row.clear();
        ++row_no;
    };
    std::size_t i = 0;
    while (i < body.size()) {
        char ch = body[i];
        if (ch == ';' || ch == '\n') {
            finish_row();
            ++i;
            continue;
        }
        if (is_space(ch)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < body.size() && !is_space(body[j]) && body[j] != ';' && body[j] != '\n') ++j;
        std::string_view tok = body.substr(i, j - i);
        auto v = parse_number(tok);
        if (!v) {
            throw ParseError(std::string(name) + " row " + std::to_string(row_no) + ", column " +
                             std::to_string(row.size() + 1) + ": cannot parse '" + std::string(tok) +
                             "' as a number");
        }
        row.push_back(*v);
        i = j;
    }
    finish_row();
    return rows;
}

inline int as_int(double v, std::string_view name, std::size_t row, std::size_t col) {
    if (!std::isfinite(v) || v != std::floor(v)) {
        throw ParseError(std::string(name) + " row " + std::to_string(row) + ", column " +
                         std::to_string(col) + ": expected an integer, found " + std::to_string(v));
    }
    return static_cast<int>(v);
}

inline void append_number(std::string& out, double v) {
    if (std::isinf(v)) {
        out += v > 0 ? "Inf" : "-Inf";
        return;
    }
    if (std::isnan(v)) {
        out += "NaN";
        return;
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace matpower_detail

/// Parses MATPOWER case text. Ratings map rateA to the normal tier and
/// rateB to the emergency tier; out-of-service rows are kept.
inline NetworkCase parse_case(std::string_view text) {
    using namespace matpower_detail;
    const std::string clean = strip_comments(text);
    std::string_view sv = clean;

    std::string name = "case";
    if (auto f = sv.find("function"); f != std::string_view::npos) {
        auto eq = sv.find('=', f);
        auto nl = sv.find('\n', f);
        if (eq != std::string_view::npos && eq < nl) {
            std::string_view n = sv.substr(eq + 1, nl == std::string_view::npos ? nl : nl - eq - 1);
            while (!n.empty() && std::isspace(static_cast<unsigned char>(n.front()))) n.remove_prefix(1);
            while (!n.empty() && std::isspace(static_cast<unsigned char>(n.back()))) n.remove_suffix(1);
            if (!n.empty()) name = std::string(n);
        }
    }

    auto base_txt = find_assignment(sv, "baseMVA");
    if (!base_txt) throw ParseError("missing mpc.baseMVA");
    std::string_view bt = *base_txt;
    while (!bt.empty() && std::isspace(static_cast<unsigned char>(bt.front()))) bt.remove_prefix(1);
    while (!bt.empty() && (std::isspace(static_cast<unsigned char>(bt.back())) || bt.back() == ';'))
        bt.remove_suffix(1);
    auto base_mva = parse_number(bt);
    if (!base_mva) throw ParseError("mpc.baseMVA: cannot parse '" + std::string(bt) + "'");

    auto bus_txt = find_assignment(sv, "bus");
    auto gen_txt = find_assignment(sv, "gen");
    auto br_txt = find_assignment(sv, "branch");
    if (!bus_txt) throw ParseError("missing matrix mpc.bus");
    if (!gen_txt) throw ParseError("missing matrix mpc.gen");
    if (!br_txt) throw ParseError("missing matrix mpc.branch");

    const Matrix bus_m = parse_matrix(*bus_txt, "bus", 13);
    const Matrix gen_m = parse_matrix(*gen_txt, "gen", 10);
    const Matrix br_m = parse_matrix(*br_txt, "branch", 11);

    std::vector<Bus> buses;
    buses.reserve(bus_m.size());
    for (std::size_t r = 0; r < bus_m.size(); ++r) {
        const auto& row = bus_m[r];
        Bus b;
        b.id = BusId{as_int(row[0], "bus", r + 1, 1)};
        int type = as_int(row[1], "bus", r + 1, 2);
        if (type < 1 || type > 4)
            throw ParseError("bus row " + std::to_string(r + 1) + ", column 2: invalid bus type " +
                             std::to_string(type));
        b.type = static_cast<BusType>(type);
        b.active_load = row[2];
        b.reactive_load = row[3];
        b.shunt_conductance = row[4];
        b.shunt_susceptance = row[5];
        b.area = as_int(row[6], "bus", r + 1, 7);
        b.v_init = row[7];
        b.angle_init = row[8];
        b.base_kv = row[9];
        b.zone = as_int(row[10], "bus", r + 1, 11);
        b.v_max = row[11];
        b.v_min = row[12];
        buses.push_back(b);
    }

    std::vector<Generator> gens;
    gens.reserve(gen_m.size());
    for (std::size_t r = 0; r < gen_m.size(); ++r) {
        const auto& row = gen_m[r];
        Generator g;
        g.bus = BusId{as_int(row[0], "gen", r + 1, 1)};
        g.p_set = row[1];
        g.q_set = row[2];
        g.q_max = row[3];
        g.q_min = row[4];
        g.v_set = row[5];
        g.m_base = row[6];
        g.in_service = row[7] > 0.0;
        g.p_max = row[8];
        g.p_min = row[9];
        gens.push_back(g);
    }

    std::vector<Branch> branches;
    branches.reserve(br_m.size());
    for (std::size_t r = 0; r < br_m.size(); ++r) {
        const auto& row = br_m[r];
        Branch br;
        br.from_bus = BusId{as_int(row[0], "branch", r + 1, 1)};
        br.to_bus = BusId{as_int(row[1], "branch", r + 1, 2)};
        br.r = row[2];
        br.x = row[3];
        br.charging_susceptance = row[4];
        br.rate_normal = row[5];
        br.rate_emergency = row[6];
        br.rate_c = row[7];
        br.transformer = row[8] != 0.0;
        br.tap_ratio = br.transformer ? row[8] : 1.0;
        br.phase_shift = row[9];
        br.in_service = row[10] > 0.0;
        if (row.size() > 12) {
            br.angle_min = row[11];
            br.angle_max = row[12];
        }
        branches.push_back(br);
    }

    return NetworkCase(std::move(name), *base_mva, std::move(buses), std::move(branches), std::move(gens));
}

inline NetworkCase load_case(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open case file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_case(ss.str());
}

/// Writes the case back as MATPOWER text; numbers use shortest round-trip form.
inline std::string serialize_case(const NetworkCase& c) {
    using matpower_detail::append_number;
    std::string out;
    out += "function mpc = " + c.name() + "\n";
    out += "mpc.version = '2';\n";
    out += "mpc.baseMVA = ";
    append_number(out, c.base_mva());
    out += ";\n\n%% bus data\n";
    out += "%\tbus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone\tVmax\tVmin\n";
    out += "mpc.bus = [\n";
    auto row = [&out](std::initializer_list<double> vals) {
        for (double v : vals) {
            out += '\t';
            append_number(out, v);
        }
        out += ";\n";
    };
    for (const Bus& b : c.buses()) {
        row({double(b.id.value), double(static_cast<int>(b.type)), b.active_load, b.reactive_load,
             b.shunt_conductance, b.shunt_susceptance, double(b.area), b.v_init, b.angle_init,
             b.base_kv, double(b.zone), b.v_max, b.v_min});
    }
    out += "];\n\n%% generator data\n";
    out += "%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin\n";
    out += "mpc.gen = [\n";
    for (const Generator& g : c.generators()) {
        row({double(g.bus.value), g.p_set, g.q_set, g.q_max, g.q_min, g.v_set, g.m_base,
             g.in_service ? 1.0 : 0.0, g.p_max, g.p_min});
    }
    out += "];\n\n%% branch data\n";
    out += "%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\tangmin\tangmax\n";
    out += "mpc.branch = [\n";
    for (const Branch& br : c.branches()) {
        row({double(br.from_bus.value), double(br.to_bus.value), br.r, br.x, br.charging_susceptance,
             br.rate_normal, br.rate_emergency, br.rate_c, br.transformer ? br.tap_ratio : 0.0,
             br.phase_shift, br.in_service ? 1.0 : 0.0, br.angle_min, br.angle_max});
    }
    out += "];\n";
    return out;
}

}  // namespace gridswitch
