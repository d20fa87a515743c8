#include <gtest/gtest.h>

#include "support.hpp"

using namespace gstest;

namespace {

const char* minimal_case = R"(function mpc = tiny
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
	1	3	0	0	0	0	1	1	0	138	1	1.1	0.9;
	2	1	50	10	0	0	1	1	0	138	1	1.1	0.9;
];
mpc.gen = [
	1	50	0	100	-100	1.0	100	1	200	0;
];
mpc.branch = [
	1	2	0.01	0.1	0.02	100	120	120	0	0	1	-360	360;
];
)";

void expect_same_case(const NetworkCase& a, const NetworkCase& b) {
    ASSERT_EQ(a.bus_count(), b.bus_count());
    ASSERT_EQ(a.branch_count(), b.branch_count());
    ASSERT_EQ(a.generator_count(), b.generator_count());
    EXPECT_EQ(a.base_mva(), b.base_mva());
    for (std::size_t i = 0; i < a.bus_count(); ++i) {
        const Bus &x = a.buses()[i], &y = b.buses()[i];
        EXPECT_EQ(x.id, y.id);
        EXPECT_EQ(x.type, y.type);
        EXPECT_EQ(x.active_load, y.active_load);
        EXPECT_EQ(x.reactive_load, y.reactive_load);
        EXPECT_EQ(x.shunt_susceptance, y.shunt_susceptance);
        EXPECT_EQ(x.v_init, y.v_init);
        EXPECT_EQ(x.angle_init, y.angle_init);
        EXPECT_EQ(x.v_min, y.v_min);
        EXPECT_EQ(x.v_max, y.v_max);
    }
    for (std::size_t k = 0; k < a.branch_count(); ++k) {
        const Branch &x = a.branches()[k], &y = b.branches()[k];
        EXPECT_EQ(x.from_bus, y.from_bus);
        EXPECT_EQ(x.to_bus, y.to_bus);
        EXPECT_EQ(x.r, y.r);
        EXPECT_EQ(x.x, y.x);
        EXPECT_EQ(x.charging_susceptance, y.charging_susceptance);
        EXPECT_EQ(x.rate_normal, y.rate_normal);
        EXPECT_EQ(x.rate_emergency, y.rate_emergency);
        EXPECT_EQ(x.tap_ratio, y.tap_ratio);
        EXPECT_EQ(x.transformer, y.transformer);
        EXPECT_EQ(x.phase_shift, y.phase_shift);
        EXPECT_EQ(x.in_service, y.in_service);
    }
    for (std::size_t g = 0; g < a.generator_count(); ++g) {
        const Generator &x = a.generators()[g], &y = b.generators()[g];
        EXPECT_EQ(x.bus, y.bus);
        EXPECT_EQ(x.p_set, y.p_set);
        EXPECT_EQ(x.q_max, y.q_max);
        EXPECT_EQ(x.q_min, y.q_min);
        EXPECT_EQ(x.v_set, y.v_set);
        EXPECT_EQ(x.in_service, y.in_service);
    }
}

}  // namespace

TEST(Parse, MinimalTwoBusCase) {
    const NetworkCase c = parse_case(minimal_case);
    EXPECT_EQ(c.name(), "tiny");
    EXPECT_EQ(c.bus_count(), 2u);
    EXPECT_EQ(c.branch_count(), 1u);
    EXPECT_EQ(c.generator_count(), 1u);
    const Branch& br = c.branch(BranchId{1});
    EXPECT_DOUBLE_EQ(br.rate_normal, 100.0);
    EXPECT_DOUBLE_EQ(br.rate_emergency, 120.0);
    EXPECT_DOUBLE_EQ(br.tap_ratio, 1.0);
    EXPECT_FALSE(br.transformer);
    EXPECT_EQ(c.slack_bus(), BusId{1});
    EXPECT_TRUE(validate_case(c).ok());
}

TEST(Parse, MalformedInputsThrow) {
    EXPECT_THROW((void)parse_case("mpc.version = '2';"), ParseError);
    std::string bad = minimal_case;
    bad.replace(bad.find("0.01\t0.1"), 8, "abc\t0.1");
    EXPECT_THROW((void)parse_case(bad), ParseError);
    std::string dangling = minimal_case;
    dangling.replace(dangling.find("1\t2\t0.01"), 1, "9");
    EXPECT_THROW((void)parse_case(dangling), ValidationError);
    EXPECT_THROW((void)load_case("/nonexistent/case.m"), ParseError);
}

TEST(Parse, RoundTripTestCases) {
    for (const char* file : {"rts24_tntc.m", "case24_ieee_rts.m"}) {
        const NetworkCase a = load_case(data_path(file));
        const NetworkCase b = parse_case(serialize_case(a));
        expect_same_case(a, b);
    }
    const NetworkCase a = random_network(7);
    expect_same_case(a, parse_case(serialize_case(a)));
}

TEST(Parse, TwentyFourBusCounts) {
    const NetworkCase& c = ieee24();
    EXPECT_EQ(c.bus_count(), 24u);
    EXPECT_EQ(c.branch_count(), 38u);
    EXPECT_TRUE(validate_case(c).ok());
    for (int id = 23; id <= 26; ++id) {
        EXPECT_DOUBLE_EQ(c.branch(BranchId{id}).rate_normal, 240.0);
        EXPECT_DOUBLE_EQ(c.branch(BranchId{id}).rate_emergency, 275.0);
    }
}

TEST(Parse, PolishCounts) {
    const NetworkCase c = load_case(data_path("case2383wp.m"));
    EXPECT_EQ(c.bus_count(), 2383u);
    std::size_t transformers = 0;
    for (const Branch& br : c.branches()) transformers += br.transformer;
    EXPECT_EQ(c.branch_count(), 2896u);
    EXPECT_EQ(c.generator_count(), 327u);
    EXPECT_GT(transformers, 0u);
    const NetworkCase t = load_case(data_path("case2383wp_tntc.m"));
    EXPECT_EQ(t.branch_count(), c.branch_count());
    for (std::size_t k = 0; k < c.branch_count(); ++k) {
        EXPECT_EQ(t.branches()[k].x, c.branches()[k].x);
        EXPECT_GE(t.branches()[k].rate_normal, c.branches()[k].rate_normal);
        EXPECT_GT(t.branches()[k].rate_emergency, t.branches()[k].rate_normal);
    }
}

TEST(Validation, TriangleIsClean) {
    const ValidationReport r = validate_case(triangle());
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(r.errors.empty());
}

TEST(Validation, DisjointIslandsNamed) {
    const NetworkCase c("islands", 100.0,
                        {bus(1, BusType::Slack), bus(2, BusType::PQ), bus(3, BusType::PQ), bus(4, BusType::PQ)},
                        {line(1, 2, 0.0, 0.1), line(3, 4, 0.0, 0.1)}, {gen(1, 0.0)});
    const ValidationReport r = validate_case(c);
    ASSERT_FALSE(r.ok());
    bool named = false;
    for (const std::string& e : r.errors)
        if (e.find("islands") != std::string::npos && e.find('1') != std::string::npos &&
            e.find('3') != std::string::npos)
            named = true;
    EXPECT_TRUE(named);
}

TEST(Validation, NegativeReactanceWarns) {
    const NetworkCase c("neg", 100.0, {bus(1, BusType::Slack), bus(2, BusType::PQ), bus(3, BusType::PQ)},
                        {line(1, 2, 0.0, 0.1), line(2, 3, 0.0, -0.01), line(1, 3, 0.0, 0.2)}, {gen(1, 0.0)});
    const ValidationReport r = validate_case(c);
    EXPECT_TRUE(r.ok());
    bool warned = false;
    for (const std::string& w : r.warnings) warned |= w.find("negative reactance") != std::string::npos;
    EXPECT_TRUE(warned);
}

TEST(Validation, StructuralErrors) {
    NetworkCase no_slack("ns", 100.0, {bus(1, BusType::PQ), bus(2, BusType::PQ)}, {line(1, 2, 0.0, 0.1)},
                         {gen(1, 0.0)});
    EXPECT_FALSE(validate_case(no_slack).ok());
    NetworkCase zero_x("zx", 100.0, {bus(1, BusType::Slack), bus(2, BusType::PQ)}, {line(1, 2, 0.0, 0.0)},
                       {gen(1, 0.0)});
    EXPECT_FALSE(validate_case(zero_x).ok());
    EXPECT_THROW(NetworkCase("dup", 100.0, {bus(1, BusType::Slack), bus(1, BusType::PQ)}, {}, {}), ValidationError);
    EXPECT_THROW(NetworkCase("self", 100.0, {bus(1, BusType::Slack), bus(2, BusType::PQ)}, {line(1, 1, 0.0, 0.1)}, {}),
                 ValidationError);
}

TEST(Topology, TwentyFourBusConnectivity) {
    const NetworkCase& c = ieee24();
    EXPECT_TRUE(is_connected(c));
    const auto bridges = brute_force_bridges(c);
    ASSERT_EQ(bridges.size(), 1u);
    EXPECT_FALSE(is_connected(c, TopologyMask{bridges.front()}));
    EXPECT_EQ(radial_branches(c), bridges);
}

TEST(Topology, TriangleSurvivesAnySingleRemoval) {
    const NetworkCase c = triangle();
    for (int k = 1; k <= 3; ++k) EXPECT_TRUE(is_connected(c, TopologyMask{BranchId{k}}));
    EXPECT_TRUE(radial_branches(c).empty());
    EXPECT_TRUE(switchable_branches(c, TopologyMask{BranchId{1}}).empty());
}

TEST(Topology, BridgesMatchBruteForceOnRandomNetworks) {
    for (unsigned seed = 1; seed <= 60; ++seed) {
        RandomSpec spec;
        spec.buses = 5 + static_cast<int>(seed % 20);
        spec.extra_edge_ratio = 0.1 + 0.05 * (seed % 9);
        spec.parallel_lines = seed % 2;
        const NetworkCase c = random_network(seed, spec);
        EXPECT_EQ(radial_branches(c), brute_force_bridges(c)) << "seed " << seed;
        const auto sw = switchable_branches(c);
        const auto br = brute_force_bridges(c);
        EXPECT_EQ(sw.size() + br.size(), c.branch_count());
    }
}

TEST(Topology, SwitchableAfterContingencyMatchesBruteForce) {
    const NetworkCase& c = ieee24();
    const TopologyMask mask{BranchId{7}};
    const auto sw = switchable_branches(c, mask);
    const auto bridges = brute_force_bridges(c, mask);
    for (BranchId k : sw) {
        EXPECT_NE(k, BranchId{7});
        EXPECT_TRUE(bfs_connected(c, mask.with(k)));
    }
    EXPECT_EQ(sw.size() + bridges.size(), 37u);
    EXPECT_EQ(switchable_branches(c).size(), 37u);
}

TEST(Topology, TransformersCanBeExcluded) {
    const NetworkCase& c = ieee24();
    std::size_t transformers = 0;
    for (BranchId k : switchable_branches(c)) transformers += c.branch(k).transformer;
    ASSERT_GT(transformers, 0u);
    EXPECT_EQ(switchable_branches(c, {}, SwitchingOptions{false}).size(), 37u - transformers);
}

TEST(Topology, MaskReferencingUnknownBranchThrows) {
    EXPECT_THROW(check_mask(triangle(), TopologyMask{BranchId{9}}), ValidationError);
}
