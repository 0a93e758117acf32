#ifndef OTS_RUNNER_HPP
#define OTS_RUNNER_HPP

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ots/bigm.hpp"
#include "ots/iterative.hpp"
#include "ots/network.hpp"
#include "ots/ots_models.hpp"
#include "ots/solver.hpp"

namespace ots {

enum class Mode { SS, IT };

struct MethodId {
    BigMStrategy strategy = BigMStrategy::SR;  // BN, SR or LP
    double scale_pct = 0.0;
    Mode mode = Mode::SS;

    /// Lower-case label such as "sr-it" or "lp-ss+35".
    [[nodiscard]] std::string label() const;
    static MethodId parse(std::string_view text);
    bool operator==(const MethodId&) const = default;
};

std::vector<MethodId> parse_method_list(std::string_view csv);

struct RunConfig {
    double time_limit = 3600.0;
    double mip_gap = 1e-4;
    IterConfig iter;  // total budget and gap are taken from the fields above
    double lp_line_time_limit = 60.0;
    bool integrality_emphasis = true;
};

struct RunReport {
    MethodId method;
    std::string label;
    int scenario_id = 0;
    SolveStatus status = SolveStatus::Error;
    std::optional<double> objective;
    std::optional<double> final_gap;
    double wall_time_s = 0.0;
    double bigm_compute_time_s = 0.0;
    std::optional<IterationTrace> trace;
    std::optional<SwitchingSolution> solution;
    std::string message;

    [[nodiscard]] bool solved() const { return status == SolveStatus::Optimal; }
};

/// Big-M set for a method: its base strategy, scaled when requested.
BigMSet bigms_for(const PowerNetwork& network, const MethodId& method, const RunConfig& cfg, SolverBackend& backend);

/// One scenario, one method. `bigms` skips the bound computation (its
/// recorded time is still reported); `warm` seeds the single-step solve.
RunReport run_method(const PowerNetwork& network, const DemandScenario& scenario, const MethodId& method,
                     const RunConfig& cfg, SolverBackend& backend, const BigMSet* bigms = nullptr,
                     const SwitchingSolution* warm = nullptr);

/// OTS with the tree lines fixed closed and shortest-path big-Ms over the
/// tree (naive bound as fallback); the remaining lines stay switchable.
RunReport run_spanning_tree_baseline(const PowerNetwork& network, const DemandScenario& scenario,
                                     const std::set<LineId>& tree, const RunConfig& cfg, SolverBackend& backend);

/// Minimum spanning tree under F/b weights.
std::set<LineId> default_spanning_tree(const PowerNetwork& network);

struct SummaryRow {
    std::string method;
    double avg_time_s = 0.0;
    double max_gap = 0.0;
    double avg_gap = 0.0;
    int unsolved = 0;
};

using CurvePoint = std::pair<double, int>;  // (time, solved so far)

struct BenchmarkBundle {
    std::vector<RunReport> runs;
    std::vector<SummaryRow> summary;
    std::map<std::string, std::vector<CurvePoint>> curves;
    std::map<std::string, BigMSet> bigms;  // keyed by provenance
};

using BackendFactory = std::function<std::unique_ptr<SolverBackend>()>;

/// Every (scenario, method) cell, at most `workers` at a time. A failing cell
/// is recorded with status Error and the batch continues.
BenchmarkBundle run_benchmark(const PowerNetwork& network, const std::vector<DemandScenario>& scenarios,
                              const std::vector<MethodId>& methods, const RunConfig& cfg,
                              const BackendFactory& make_engine, int workers = 1);

/// Gaps average over runs that found an incumbent; unsolved counts every run
/// that did not finish Optimal.
std::vector<SummaryRow> summarize(const std::vector<RunReport>& runs, const std::vector<std::string>& method_order);
std::vector<CurvePoint> solved_curve(const std::vector<RunReport>& runs, const std::string& method);

std::string write_runs_csv(const std::vector<RunReport>& runs);
std::string write_summary_csv(const std::vector<SummaryRow>& rows);
std::string write_curve_csv(const std::vector<CurvePoint>& curve);

/// Writes runs.csv, summary.csv, curve_*.csv, trace_*.csv, bigm_*.csv and
/// meta.json into `dir`; `meta` entries are added to meta.json verbatim.
void write_bundle(const BenchmarkBundle& bundle, const std::filesystem::path& dir,
                  const std::map<std::string, std::string>& meta);

}  // namespace ots

#endif  // OTS_RUNNER_HPP
