#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gridswitch/error.hpp"

namespace gridswitch {

/// Integer identifier tagged by the kind of element it names.
template <class Tag>
struct Id {
    int value = 0;
    constexpr auto operator<=>(const Id&) const = default;
};

template <class Tag>
std::ostream& operator<<(std::ostream& os, Id<Tag> id) {
    return os << id.value;
}

/// External bus number as written in the case file.
using BusId = Id<struct BusTag>;
/// 1-based row of the branch matrix.
using BranchId = Id<struct BranchTag>;
/// 1-based row of the generator matrix.
using GeneratorId = Id<struct GeneratorTag>;

enum class BusType { PQ = 1, PV = 2, Slack = 3, Isolated = 4 };

enum class RatingTier { Normal, Emergency };

struct Bus {
    BusId id;
    BusType type = BusType::PQ;
    double active_load = 0.0;        // MW
    double reactive_load = 0.0;      // MVAr
    double shunt_conductance = 0.0;  // MW at 1 p.u.
    double shunt_susceptance = 0.0;  // MVAr at 1 p.u.
    int area = 1;
    double v_init = 1.0;      // p.u.
    double angle_init = 0.0;  // degrees
    double base_kv = 0.0;
    int zone = 1;
    double v_max = 1.1;
    double v_min = 0.9;
};

struct Branch {
    BranchId id;
    BusId from_bus;
    BusId to_bus;
    double r = 0.0;
    double x = 0.0;
    double charging_susceptance = 0.0;  // total line charging, p.u.
    double rate_normal = 0.0;           // MVA, 0 = unmonitored
    double rate_emergency = 0.0;        // MVA, 0 = unmonitored
    double rate_c = 0.0;
    double tap_ratio = 1.0;      // effective off-nominal ratio (1.0 for lines)
    bool transformer = false;    // ratio column was non-zero in the source
    double phase_shift = 0.0;    // degrees
    bool in_service = true;
    double angle_min = -360.0;
    double angle_max = 360.0;

    [[nodiscard]] double rating(RatingTier tier) const noexcept {
        return tier == RatingTier::Normal ? rate_normal : rate_emergency;
    }
};

struct Generator {
    GeneratorId id;
    BusId bus;
    double p_set = 0.0;  // MW
    double q_set = 0.0;  // MVAr, initial output
    double q_max = 0.0;
    double q_min = 0.0;
    double v_set = 1.0;
    double m_base = 100.0;
    bool in_service = true;
    double p_max = 0.0;
    double p_min = 0.0;
};

/// Immutable electrical model. Construction checks referential integrity;
/// the remaining engineering checks live in validate_case().
class NetworkCase {
public:
    NetworkCase() = default;

    NetworkCase(std::string name, double base_mva, std::vector<Bus> buses,
                std::vector<Branch> branches, std::vector<Generator> generators)
        : name_(std::move(name)),
          base_mva_(base_mva),
          buses_(std::move(buses)),
          branches_(std::move(branches)),
          generators_(std::move(generators)) {
        if (!(base_mva_ > 0.0)) throw ValidationError("baseMVA must be positive");
        bus_index_.reserve(buses_.size());
        for (std::size_t i = 0; i < buses_.size(); ++i) {
            auto [it, inserted] = bus_index_.emplace(buses_[i].id.value, i);
            if (!inserted)
                throw ValidationError("duplicate bus id " + std::to_string(buses_[i].id.value));
        }
        ends_.reserve(branches_.size());
        for (std::size_t k = 0; k < branches_.size(); ++k) {
            Branch& br = branches_[k];
            br.id = BranchId{static_cast<int>(k) + 1};
            auto f = find_bus(br.from_bus);
            auto t = find_bus(br.to_bus);
            if (!f || !t) {
                throw ValidationError("branch " + std::to_string(br.id.value) +
                                      " references unknown bus " +
                                      std::to_string((!f ? br.from_bus : br.to_bus).value));
            }
            if (*f == *t) {
                throw ValidationError("branch " + std::to_string(br.id.value) +
                                      " connects bus " + std::to_string(br.from_bus.value) +
                                      " to itself");
            }
            ends_.emplace_back(*f, *t);
        }
        gen_bus_.reserve(generators_.size());
        for (std::size_t g = 0; g < generators_.size(); ++g) {
            Generator& gen = generators_[g];
            gen.id = GeneratorId{static_cast<int>(g) + 1};
            auto b = find_bus(gen.bus);
            if (!b) {
                throw ValidationError("generator " + std::to_string(gen.id.value) +
                                      " references unknown bus " + std::to_string(gen.bus.value));
            }
            gen_bus_.push_back(*b);
        }
    }

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] double base_mva() const noexcept { return base_mva_; }

    [[nodiscard]] std::span<const Bus> buses() const noexcept { return buses_; }
    [[nodiscard]] std::span<const Branch> branches() const noexcept { return branches_; }
    [[nodiscard]] std::span<const Generator> generators() const noexcept { return generators_; }

    [[nodiscard]] std::size_t bus_count() const noexcept { return buses_.size(); }
    [[nodiscard]] std::size_t branch_count() const noexcept { return branches_.size(); }
    [[nodiscard]] std::size_t generator_count() const noexcept { return generators_.size(); }

    [[nodiscard]] std::optional<std::size_t> find_bus(BusId id) const {
        auto it = bus_index_.find(id.value);
        if (it == bus_index_.end()) return std::nullopt;
        return it->second;
    }

    /// Internal (0-based, file-order) index of a bus.
    [[nodiscard]] std::size_t bus_index(BusId id) const {
        auto idx = find_bus(id);
        if (!idx) throw ValidationError("unknown bus id " + std::to_string(id.value));
        return *idx;
    }

    [[nodiscard]] const Bus& bus(BusId id) const { return buses_[bus_index(id)]; }

    [[nodiscard]] bool has_branch(BranchId id) const noexcept {
        return id.value >= 1 && static_cast<std::size_t>(id.value) <= branches_.size();
    }
    [[nodiscard]] bool has_generator(GeneratorId id) const noexcept {
        return id.value >= 1 && static_cast<std::size_t>(id.value) <= generators_.size();
    }

    [[nodiscard]] const Branch& branch(BranchId id) const {
        if (!has_branch(id)) throw ValidationError("unknown branch id " + std::to_string(id.value));
        return branches_[static_cast<std::size_t>(id.value - 1)];
    }
    [[nodiscard]] const Generator& generator(GeneratorId id) const {
        if (!has_generator(id))
            throw ValidationError("unknown generator id " + std::to_string(id.value));
        return generators_[static_cast<std::size_t>(id.value - 1)];
    }

    /// Internal bus indices of a branch's from and to ends.
    [[nodiscard]] std::pair<std::size_t, std::size_t> branch_ends(std::size_t branch_pos) const {
        return ends_[branch_pos];
    }
    [[nodiscard]] std::size_t generator_bus_index(std::size_t gen_pos) const {
        return gen_bus_[gen_pos];
    }

    /// First bus flagged as slack, if any.
    [[nodiscard]] std::optional<BusId> slack_bus() const {
        for (const Bus& b : buses_)
            if (b.type == BusType::Slack) return b.id;
        return std::nullopt;
    }

private:
    std::string name_;
    double base_mva_ = 100.0;
    std::vector<Bus> buses_;
    std::vector<Branch> branches_;
    std::vector<Generator> generators_;
    std::unordered_map<int, std::size_t> bus_index_;
    std::vector<std::pair<std::size_t, std::size_t>> ends_;
    std::vector<std::size_t> gen_bus_;
};

/// Elements removed from the case for one study (contingency, switching action).
class TopologyMask {
public:
    TopologyMask() = default;
    TopologyMask(std::initializer_list<BranchId> branches) {
        for (BranchId b : branches) insert(branches_, b);
    }

    [[nodiscard]] static TopologyMask of_generator(GeneratorId g) {
        TopologyMask m;
        insert(m.generators_, g);
        return m;
    }

    [[nodiscard]] TopologyMask with(BranchId b) const {
        TopologyMask m = *this;
        insert(m.branches_, b);
        return m;
    }
    [[nodiscard]] TopologyMask with(GeneratorId g) const {
        TopologyMask m = *this;
        insert(m.generators_, g);
        return m;
    }

    [[nodiscard]] bool removes(BranchId b) const {
        return std::binary_search(branches_.begin(), branches_.end(), b);
    }
    [[nodiscard]] bool removes(GeneratorId g) const {
        return std::binary_search(generators_.begin(), generators_.end(), g);
    }

    [[nodiscard]] std::span<const BranchId> removed_branches() const noexcept { return branches_; }
    [[nodiscard]] std::span<const GeneratorId> removed_generators() const noexcept {
        return generators_;
    }
    [[nodiscard]] bool empty() const noexcept { return branches_.empty() && generators_.empty(); }

    bool operator==(const TopologyMask&) const = default;

private:
    template <class T>
    static void insert(std::vector<T>& v, T x) {
        auto it = std::lower_bound(v.begin(), v.end(), x);
        if (it == v.end() || *it != x) v.insert(it, x);
    }

    std::vector<BranchId> branches_;
    std::vector<GeneratorId> generators_;
};

/// Throws ValidationError when the mask names elements the case does not have.
inline void check_mask(const NetworkCase& c, const TopologyMask& mask) {
    for (BranchId b : mask.removed_branches())
        if (!c.has_branch(b)) throw ValidationError("mask references unknown branch " + std::to_string(b.value));
    for (GeneratorId g : mask.removed_generators())
        if (!c.has_generator(g))
            throw ValidationError("mask references unknown generator " + std::to_string(g.value));
}

[[nodiscard]] inline bool branch_active(const NetworkCase& c, const TopologyMask& mask,
                                        std::size_t branch_pos) {
    const Branch& br = c.branches()[branch_pos];
    return br.in_service && !mask.removes(br.id);
}

[[nodiscard]] inline bool generator_active(const NetworkCase& c, const TopologyMask& mask,
                                           std::size_t gen_pos) {
    const Generator& g = c.generators()[gen_pos];
    return g.in_service && !mask.removes(g.id);
}

}  // namespace gridswitch

template <class Tag>
struct std::hash<gridswitch::Id<Tag>> {
    std::size_t operator()(gridswitch::Id<Tag> id) const noexcept {
        return std::hash<int>{}(id.value);
    }
};
