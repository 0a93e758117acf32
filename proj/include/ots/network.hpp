#ifndef OTS_NETWORK_HPP
#define OTS_NETWORK_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ots/graph.hpp"

namespace ots {

using BusId = int;
using LineId = int;
using GenId = int;

struct Bus {
    BusId id;
    double baseline_demand;  // MW
    bool is_reference = false;
    bool operator==(const Bus&) const = default;
};

struct Generator {
    GenId id;
    BusId bus;
    double p_min;          // MW
    double p_max;          // MW
    double marginal_cost;  // per MWh
    bool operator==(const Generator&) const = default;
};

/// A transmission line. `susceptance` is in MW per radian (base_mva / x), so
/// capacity / susceptance is an angle in radians.
struct Line {
    LineId id;
    BusId from_bus;
    BusId to_bus;
    double susceptance;
    double capacity;  // MW
    bool operator==(const Line&) const = default;
};

/// Syntax problem in a case file. what() starts with "line N:".
class CaseParseError : public std::runtime_error {
public:
    CaseParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Semantically invalid network (dangling reference, bad parameter, islands).
class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Immutable, validated physical model.
class PowerNetwork {
public:
    PowerNetwork(std::vector<Bus> buses, std::vector<Generator> generators, std::vector<Line> lines,
                 double base_mva = 100.0);

    [[nodiscard]] const std::vector<Bus>& buses() const { return buses_; }
    [[nodiscard]] const std::vector<Generator>& generators() const { return generators_; }
    [[nodiscard]] const std::vector<Line>& lines() const { return lines_; }
    [[nodiscard]] double base_mva() const { return base_mva_; }

    [[nodiscard]] BusId reference_bus() const { return reference_bus_; }
    [[nodiscard]] const Bus& bus(BusId id) const;
    [[nodiscard]] const Line& line(LineId id) const;
    [[nodiscard]] bool has_bus(BusId id) const { return bus_pos_.contains(id); }
    [[nodiscard]] bool has_line(LineId id) const { return line_pos_.contains(id); }
    [[nodiscard]] std::size_t bus_index(BusId id) const;

    /// Lines incident to the reference bus.
    [[nodiscard]] std::set<LineId> reference_lines() const;
    [[nodiscard]] std::vector<LineId> line_ids() const;
    [[nodiscard]] std::vector<const Generator*> generators_at(BusId bus) const;

    bool operator==(const PowerNetwork& other) const {
        return buses_ == other.buses_ && generators_ == other.generators_ && lines_ == other.lines_ &&
               base_mva_ == other.base_mva_;
    }

private:
    std::vector<Bus> buses_;
    std::vector<Generator> generators_;
    std::vector<Line> lines_;
    double base_mva_;
    BusId reference_bus_ = 0;
    std::map<BusId, std::size_t> bus_pos_;
    std::map<LineId, std::size_t> line_pos_;
};

struct DemandScenario {
    int scenario_id = 0;
    std::map<BusId, double> demand;  // MW
    bool operator==(const DemandScenario&) const = default;
};

/// Reads the supported MATPOWER subset: mpc.baseMVA, mpc.bus, mpc.gen,
/// mpc.branch and mpc.gencost (polynomial, at most linear). Out-of-service
/// generators and branches are dropped; the remaining ones are numbered
/// 1..n in file order.
PowerNetwork parse_case(std::string_view text);
PowerNetwork load_case(const std::filesystem::path& path);

/// Writes a case file that parse_case reads back into an equal network.
std::string write_case(const PowerNetwork& network);

/// Nodal demands drawn independently from U[0.9 d, 1.1 d]. Bit-identical for
/// identical (network, count, seed).
std::vector<DemandScenario> sample_scenarios(const PowerNetwork& network, int count, std::uint64_t seed);
DemandScenario baseline_scenario(const PowerNetwork& network);

/// CSV with header `scenario_id,bus_id,demand_mw`.
std::string write_scenarios_csv(const std::vector<DemandScenario>& scenarios);
std::vector<DemandScenario> parse_scenarios_csv(std::string_view text, const PowerNetwork& network);

/// One edge per line, weight = capacity / susceptance.
WeightedMultigraph to_multigraph(const PowerNetwork& network);

/// True iff the lines in `closed` span and connect every bus.
bool lines_connect_all_buses(const PowerNetwork& network, const std::set<LineId>& closed);

}  // namespace ots

#endif  // OTS_NETWORK_HPP
