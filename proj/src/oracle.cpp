#include "ots/oracle.hpp"

#include <cstdint>
#include <optional>

namespace ots {

bool check_connectivity(const std::map<LineId, int>& x, const PowerNetwork& network) {
    std::set<LineId> closed;
    for (const Line& l : network.lines()) {
        auto it = x.find(l.id);
        if (it == x.end()) throw std::invalid_argument("no status for line " + std::to_string(l.id));
        if (it->second == 1) closed.insert(l.id);
    }
    return lines_connect_all_buses(network, closed);
}

SwitchingSolution enumerate_topologies_oracle(const PowerNetwork& network, const DemandScenario& scenario,
                                              SolverBackend& backend) {
    const auto& lines = network.lines();
    if (lines.size() > kOracleMaxLines)
        throw std::invalid_argument("enumeration oracle supports at most " + std::to_string(kOracleMaxLines) +
                                    " lines");
    const std::uint32_t full = (std::uint32_t{1} << lines.size()) - 1;
    std::optional<SwitchingSolution> best;
    int best_open = 0;
    // Walk subsets from all-closed downwards so ties favour more closed lines.
    for (std::uint32_t mask = full;; --mask) {
        std::set<LineId> closed;
        for (std::size_t i = 0; i < lines.size(); ++i)
            if (mask & (std::uint32_t{1} << i)) closed.insert(lines[i].id);
        if (closed.size() + 1 >= network.buses().size() && lines_connect_all_buses(network, closed)) {
            auto sol = solve_topology(network, scenario, closed, backend);
            int open = static_cast<int>(lines.size() - closed.size());
            if (sol && (!best || sol->objective_cost < best->objective_cost ||
                        (sol->objective_cost == best->objective_cost && open < best_open))) {
                best = std::move(sol);
                best_open = open;
            }
        }
        if (mask == 0) break;
    }
    if (!best) throw std::runtime_error("every connected topology is infeasible");
    return *best;
}

}  // namespace ots
