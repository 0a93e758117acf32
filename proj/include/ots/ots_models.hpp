#ifndef OTS_OTS_MODELS_HPP
#define OTS_OTS_MODELS_HPP

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ots/bigm.hpp"
#include "ots/milp_model.hpp"
#include "ots/network.hpp"
#include "ots/solver.hpp"

namespace ots {

// Variable names: x_<line>, y_<line>, z_<line>, f_<line>, p_<gen>, th_<bus>, u_<bus>.
inline std::string var_x(LineId l) { return "x_" + std::to_string(l); }
inline std::string var_y(LineId l) { return "y_" + std::to_string(l); }
inline std::string var_z(LineId l) { return "z_" + std::to_string(l); }
inline std::string var_f(LineId l) { return "f_" + std::to_string(l); }
inline std::string var_p(GenId g) { return "p_" + std::to_string(g); }
inline std::string var_th(BusId n) { return "th_" + std::to_string(n); }
inline std::string var_u(BusId n) { return "u_" + std::to_string(n); }

struct SwitchingSolution {
    std::map<LineId, int> x;
    std::map<LineId, double> f;      // MW
    std::map<BusId, double> theta;   // rad
    std::map<GenId, double> p;       // MW
    double objective_cost = 0.0;
    std::map<BusId, double> u;
    std::map<LineId, int> y;
    std::map<LineId, int> z;

    [[nodiscard]] std::set<LineId> closed_lines() const;
    [[nodiscard]] std::map<std::string, double> named_values() const;
};

class SolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Full OTS MILP with big-M flow linearization and MTZ connectivity. The
/// out-arc requirement applies to every bus except the reference bus, which
/// is the root every other bus must reach.
MilpModel build_ots_model(const PowerNetwork& network, const DemandScenario& scenario, const BigMSet& bigms);

/// The OTS model with per-line big-M max_k M_lk and x_l >= floor(sum_k x_kl / |K|).
/// Warm-started at pool.front() (callers order the pool best first).
MilpModel build_restricted_model(const PowerNetwork& network, const DemandScenario& scenario,
                                 const std::vector<SwitchingSolution>& pool, const std::vector<BigMSet>& pool_bigms,
                                 const BigMSet& outer_bigms);

/// Fixes x_l = 1 for the given lines (lower bound 1).
void fix_lines_closed(MilpModel& model, const std::set<LineId>& lines);

/// Continuous dispatch for a fixed topology: f = b (th_n - th_m) on closed
/// lines, f = 0 on open lines.
MilpModel build_dispatch_model(const PowerNetwork& network, const DemandScenario& scenario,
                               const std::set<LineId>& closed_lines);

/// Reads values back by name; binaries are rounded at 0.5. No checks.
SwitchingSolution decode_switching_solution(const MilpModel& model, const std::vector<double>& values,
                                            const PowerNetwork& network);

/// Human-readable violations of the solution invariants. Flow residuals are
/// measured against eps * max(1, |f|).
std::vector<std::string> check_switching_solution(const SwitchingSolution& sol, const PowerNetwork& network,
                                                  double eps = 1e-4);

/// decode + check; throws SolutionError listing every violation.
SwitchingSolution extract_switching_solution(const MilpModel& model, const std::vector<double>& values,
                                             const PowerNetwork& network, double eps = 1e-4);

/// Fills u, y, z for the closed lines: arcs follow a BFS tree towards the
/// reference bus, remaining closed lines point to the endpoint found earlier.
void orient_towards_reference(const PowerNetwork& network, SwitchingSolution& sol);

/// Solves the dispatch LP for a connected topology and returns a complete,
/// consistent solution; nullopt when the dispatch is infeasible.
std::optional<SwitchingSolution> solve_topology(const PowerNetwork& network, const DemandScenario& scenario,
                                                const std::set<LineId>& closed_lines, SolverBackend& backend);

}  // namespace ots

#endif  // OTS_OTS_MODELS_HPP
