#ifndef OTS_SOLVER_HPP
#define OTS_SOLVER_HPP

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ots/milp_model.hpp"

namespace ots {

struct SolveRequest {
    double time_limit = 3600.0;  // wall-clock seconds
    double rel_gap_target = 1e-4;
    std::optional<std::vector<double>> warm_start;  // overrides the model's own
    bool integrality_emphasis = false;
    int threads = 1;
    /// Stop after this many improving incumbents (diagnostic knob used to
    /// force early termination on instances that solve instantly).
    std::optional<int> incumbent_limit;
};

enum class SolveStatus {
    Optimal,
    FeasibleTimeLimit,  // stopped early with at least one incumbent
    TimeLimitNoSolution,
    Infeasible,
    Unbounded,
    Error,
};

std::string to_string(SolveStatus status);

struct Incumbent {
    double objective;
    std::vector<double> values;
    double wall_time;  // seconds since the solve started
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::Error;
    std::vector<Incumbent> incumbents;  // strictly improving, chronological
    double best_bound = 0.0;
    double final_gap = 0.0;
    double wall_time = 0.0;
    std::string message;

    [[nodiscard]] bool has_solution() const { return !incumbents.empty(); }
    [[nodiscard]] const Incumbent& best() const { return incumbents.back(); }
};

/// (best - bound) / |best| for minimization, mirrored for maximization.
double relative_gap(double best, double bound, ObjSense sense);

class SolverBackend {
public:
    virtual ~SolverBackend() = default;
    virtual SolveOutcome solve(const MilpModel& model, const SolveRequest& request) = 0;
    [[nodiscard]] virtual std::string name() const = 0;
    [[nodiscard]] virtual std::string version() const = 0;
};

class HighsBackend : public SolverBackend {
public:
    SolveOutcome solve(const MilpModel& model, const SolveRequest& request) override;
    [[nodiscard]] std::string name() const override { return "highs"; }
    [[nodiscard]] std::string version() const override;
};

/// Engine by name; empty selects $OTS_ENGINE, falling back to "highs".
std::unique_ptr<SolverBackend> make_backend(std::string_view name = {});

}  // namespace ots

#endif  // OTS_SOLVER_HPP
