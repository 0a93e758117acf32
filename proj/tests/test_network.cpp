#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ots/network.hpp"
#include "ots/text_util.hpp"

#ifndef OTS_DATA_DIR
#define OTS_DATA_DIR "data"
#endif

using namespace ots;
using namespace ots::testing;

namespace {

const char* kThreeBus = R"(function mpc = tiny
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
	1	3	0	0	0	0	1	1	0	230	1	1.1	0.9;
	2	1	90	0	0	0	1	1	0	230	1	1.1	0.9;
	3	1	60	0	0	0	1	1	0	230	1	1.1	0.9;
];
mpc.gen = [
	1	0	0	0	0	1	100	1	200	0;
	3	0	0	0	0	1	100	1	50	10;
	2	0	0	0	0	1	100	0	50	0;
];
mpc.branch = [
	1	2	0	0.1	0	80	0	0	0	0	1	-360	360;
	2	3	0	0.2	0	40	0	0	0	0	1	-360	360;
	1	3	0	0.25	0	60	0	0	0	0	1	-360	360;
	1	3	0	0.25	0	60	0	0	0	0	0	-360	360;
];
mpc.gencost = [
	2	0	0	2	10	0;
	2	0	0	3	0	30	5;
	2	0	0	2	99	0;
];
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
    auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("parses the supported case subset") {
    const PowerNetwork net = parse_case(kThreeBus);
    CHECK(net.buses().size() == 3);
    CHECK(net.reference_bus() == 1);
    CHECK(net.bus(2).baseline_demand == 90);
    REQUIRE(net.generators().size() == 2);  // the third is out of service
    CHECK(net.generators()[0] == Generator{1, 1, 0, 200, 10});
    CHECK(net.generators()[1] == Generator{2, 3, 10, 50, 30});
    REQUIRE(net.lines().size() == 3);  // the fourth is out of service
    CHECK(net.line(1).susceptance == doctest::Approx(1000));
    CHECK(net.line(2).capacity == 40);
    CHECK(net.line(3).from_bus == 1);
    CHECK(net.reference_lines() == std::set<LineId>{1, 3});
}

TEST_CASE("case file round trip") {
    const PowerNetwork net = parse_case(kThreeBus);
    CHECK(parse_case(write_case(net)) == net);
    const PowerNetwork big = load_case(std::filesystem::path(OTS_DATA_DIR) / "case118_ots.m");
    CHECK(parse_case(write_case(big)) == big);
}

TEST_CASE("prepared 118-bus case dimensions") {
    const PowerNetwork net = load_case(std::filesystem::path(OTS_DATA_DIR) / "case118_ots.m");
    CHECK(net.buses().size() == 118);
    CHECK(net.lines().size() == 186);
    CHECK(net.generators().size() == 54);
    CHECK(net.reference_bus() == 69);
    for (const Line& l : net.lines()) CHECK(l.capacity >= 40);
}

TEST_CASE("parse errors carry line numbers") {
    auto line_of = [](const std::string& text) -> std::size_t {
        try {
            parse_case(text);
        } catch (const CaseParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of(replace(kThreeBus, "90\t0", "9x0\t0")) == 6);
    CHECK(line_of(replace(kThreeBus, "\t2\t3\t0\t0.2\t0\t40\t0\t0\t0\t0\t1\t-360\t360;", "\t2\t3\t0;")) == 16);
    CHECK(line_of(replace(kThreeBus, "mpc.baseMVA = 100;", "mpc.baseMVA = abc;")) == 3);
    const std::string no_gencost = std::string(kThreeBus).substr(0, std::string(kThreeBus).find("mpc.gencost"));
    CHECK(line_of(no_gencost) > 0);
    CHECK(line_of(replace(kThreeBus, "mpc.version", "garbage")) == 2);
}

TEST_CASE("unsupported or invalid data is rejected") {
    CHECK_THROWS_AS(parse_case(replace(kThreeBus, "2\t0\t0\t2\t10\t0;", "2\t0\t0\t3\t1\t10\t0;")), NetworkError);
    CHECK_THROWS_AS(parse_case(replace(kThreeBus, "\t1\t2\t0\t0.1", "\t1\t7\t0\t0.1")), NetworkError);
    CHECK_THROWS_AS(parse_case(replace(kThreeBus, "0\t0.1\t0\t80", "0\t0\t0\t80")), NetworkError);
    CHECK_THROWS_AS(parse_case(replace(kThreeBus, "\t3\t1\t60", "\t3\t4\t60")), NetworkError);
    CHECK_THROWS_AS(parse_case(replace(kThreeBus, "\t2\t1\t90", "\t2\t3\t90")), NetworkError);
}

TEST_CASE("network validation") {
    std::vector<Bus> buses{{1, 0, true}, {2, 10, false}, {3, 5, false}};
    CHECK_THROWS_AS(PowerNetwork(buses, {}, {{1, 1, 2, 10, 10}}), NetworkError);  // bus 3 islanded
    CHECK_THROWS_AS(PowerNetwork(buses, {}, {{1, 1, 2, 10, 10}, {2, 2, 3, 0, 10}}), NetworkError);
    CHECK_THROWS_AS(PowerNetwork(buses, {{1, 9, 0, 1, 1}}, {{1, 1, 2, 10, 10}, {2, 2, 3, 1, 10}}), NetworkError);
    CHECK_THROWS_AS(PowerNetwork(buses, {{1, 1, 5, 1, 1}}, {{1, 1, 2, 10, 10}, {2, 2, 3, 1, 10}}), NetworkError);
    const PowerNetwork ok(buses, {}, {{1, 1, 2, 10, 10}, {2, 2, 3, 1, 10}});
    CHECK(ok.reference_bus() == 1);
    CHECK_THROWS_AS(ok.line(9), NetworkError);
}

TEST_CASE("lowest bus becomes the reference when none is flagged") {
    const PowerNetwork net({{5, 0, false}, {2, 0, false}}, {}, {{1, 5, 2, 1, 1}});
    CHECK(net.reference_bus() == 2);
}

TEST_CASE("multigraph weights are capacity over susceptance") {
    const PowerNetwork net = parse_case(kThreeBus);
    const WeightedMultigraph g = to_multigraph(net);
    CHECK(g.num_edges() == 3);
    CHECK(g.edge(2).weight == doctest::Approx(40.0 / 500.0));
}

TEST_CASE("scenario sampling is deterministic and within the band") {
    const PowerNetwork net = load_case(std::filesystem::path(OTS_DATA_DIR) / "case118_ots.m");
    const auto a = sample_scenarios(net, 5, 42);
    const auto b = sample_scenarios(net, 5, 42);
    const auto c = sample_scenarios(net, 5, 43);
    CHECK(a == b);
    CHECK(a != c);
    CHECK(sample_scenarios(net, 0, 1).empty());
    CHECK_THROWS(sample_scenarios(net, -1, 1));
    for (const auto& s : a) {
        for (const Bus& bus : net.buses()) {
            const double d = s.demand.at(bus.id);
            CHECK(d >= 0.9 * bus.baseline_demand);
            CHECK(d <= 1.1 * bus.baseline_demand);
        }
    }
    CHECK(a[3].scenario_id == 3);
}

TEST_CASE("property: sampled demand ratios look uniform on [0.9, 1.1]") {
    const PowerNetwork net = load_case(std::filesystem::path(OTS_DATA_DIR) / "case118_ots.m");
    const auto scenarios = sample_scenarios(net, 200, 7);
    std::vector<double> ratios;
    for (const auto& s : scenarios)
        for (const Bus& bus : net.buses())
            if (bus.baseline_demand > 0) ratios.push_back(s.demand.at(bus.id) / bus.baseline_demand);
    double mean = 0;
    for (double r : ratios) mean += r;
    mean /= double(ratios.size());
    double var = 0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    var /= double(ratios.size());
    CHECK(mean == doctest::Approx(1.0).epsilon(0.002));
    CHECK(var == doctest::Approx(0.04 / 12.0).epsilon(0.05));
    int low = 0;
    for (double r : ratios) low += r < 1.0;
    CHECK(double(low) / double(ratios.size()) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("scenario CSV round trip and validation") {
    const PowerNetwork net = parse_case(kThreeBus);
    const auto scenarios = sample_scenarios(net, 3, 11);
    CHECK(parse_scenarios_csv(write_scenarios_csv(scenarios), net) == scenarios);
    CHECK(baseline_scenario(net).demand.at(2) == 90);
    CHECK_THROWS(parse_scenarios_csv("id,bus,d\n", net));
    CHECK_THROWS(parse_scenarios_csv("scenario_id,bus_id,demand_mw\n0,1,5\n", net));  // buses 2 and 3 missing
    CHECK_THROWS(parse_scenarios_csv("scenario_id,bus_id,demand_mw\n0,1,5\n0,2,5\n0,3,5\n0,9,5\n", net));
}

TEST_CASE("connectivity of line subsets") {
    const PowerNetwork net = twelve_vertex_network();
    std::set<LineId> all;
    for (const Line& l : net.lines()) all.insert(l.id);
    CHECK(lines_connect_all_buses(net, all));
    all.erase(10);
    CHECK_FALSE(lines_connect_all_buses(net, all));
}
