#ifndef OTS_ITERATIVE_HPP
#define OTS_ITERATIVE_HPP

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ots/bigm.hpp"
#include "ots/ots_models.hpp"
#include "ots/solver.hpp"

namespace ots {

struct IterConfig {
    std::vector<double> outer_times{30, 60, 120, 300, 600};
    double heuristic_time = 30.0;
    int pool_size = 10;
    double total_budget = 3600.0;
    double rel_gap = 1e-4;
    bool integrality_emphasis = true;
    /// Caps improving incumbents per outer stage (not the final solve).
    std::optional<int> outer_incumbent_limit;

    void validate() const;
};

enum class Stage { Full, Restricted };

struct TraceEntry {
    int iteration = 0;
    Stage stage = Stage::Full;
    std::optional<double> objective;  // best known incumbent after this stage
    std::optional<double> gap;        // absent when the stage solved to optimality
    double wall_time_s = 0.0;
    SolveStatus status = SolveStatus::Error;
};

struct IterationTrace {
    std::vector<TraceEntry> entries;
};

struct IterResult {
    SolveStatus status = SolveStatus::Error;
    std::optional<SwitchingSolution> solution;
    std::optional<double> objective;
    double best_bound = 0.0;
    double final_gap = 0.0;
    double wall_time_s = 0.0;
    IterationTrace trace;
    std::string message;
};

/// Observation points for tests and diagnostics.
struct IterHooks {
    std::function<void(int iteration, const std::vector<SwitchingSolution>& pool, const MilpModel& restricted)>
        on_restricted;
};

/// Up to k distinct topologies from the incumbent list, cheapest first;
/// duplicates by x keep the cheaper entry.
std::vector<SwitchingSolution> select_pool(const SolveOutcome& outcome, const MilpModel& model,
                                           const PowerNetwork& network, int k);

/// T minus the measured time of every outer and heuristic stage, floored at 0.
double remaining_budget(const IterConfig& cfg, const std::vector<std::pair<double, double>>& measured);

/// Alternates full solves and restricted heuristic solves on a shared time
/// ledger, then spends what is left on a final full solve.
IterResult run_iterative(const PowerNetwork& network, const DemandScenario& scenario, const BigMSet& outer_bigms,
                         const IterConfig& cfg, SolverBackend& backend, const IterHooks& hooks = {});

std::string to_string(Stage stage);
/// CSV with header `iteration,stage,objective,gap,wall_time_s`.
std::string write_trace_csv(const IterationTrace& trace);

}  // namespace ots

#endif  // OTS_ITERATIVE_HPP
