#ifndef OTS_ORACLE_HPP
#define OTS_ORACLE_HPP

#include <map>

#include "ots/network.hpp"
#include "ots/ots_models.hpp"
#include "ots/solver.hpp"

namespace ots {

inline constexpr std::size_t kOracleMaxLines = 16;

/// True iff the closed lines span and connect every bus.
bool check_connectivity(const std::map<LineId, int>& x, const PowerNetwork& network);

/// Exhaustive ground truth: every on/off subset whose closed lines connect
/// all buses, dispatch LP on each, cheapest kept (ties: fewest open lines,
/// then lowest subset index).
SwitchingSolution enumerate_topologies_oracle(const PowerNetwork& network, const DemandScenario& scenario,
                                              SolverBackend& backend);

}  // namespace ots

#endif  // OTS_ORACLE_HPP
