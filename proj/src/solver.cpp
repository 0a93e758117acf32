#include "ots/solver.hpp"

#include <Highs.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>

namespace ots {

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::FeasibleTimeLimit: return "feasible_time_limit";
        case SolveStatus::TimeLimitNoSolution: return "time_limit_no_solution";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::Error: return "error";
    }
    return "error";
}

double relative_gap(double best, double bound, ObjSense sense) {
    double diff = sense == ObjSense::Minimize ? best - bound : bound - best;
    if (diff <= 0.0) return 0.0;
    if (best == 0.0) return std::numeric_limits<double>::infinity();
    return diff / std::abs(best);
}

namespace {

// HiGHS stops on an absolute gap of this size as well; treat it as closed.
constexpr double kAbsGap = 1e-6;
// Tolerance for accepting a warm start as the first incumbent.
constexpr double kWarmStartTol = 1e-6;

HighsLp to_highs(const MilpModel& model) {
    HighsLp lp;
    const auto& vars = model.variables();
    const auto n = static_cast<HighsInt>(vars.size());
    lp.num_col_ = n;
    lp.col_cost_.assign(vars.size(), 0.0);
    lp.col_lower_.resize(vars.size());
    lp.col_upper_.resize(vars.size());
    lp.integrality_.assign(vars.size(), HighsVarType::kContinuous);
    bool any_integer = false;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        lp.col_lower_[i] = vars[i].lower;
        lp.col_upper_[i] = vars[i].upper;
        if (vars[i].kind == VarKind::Binary) {
            lp.integrality_[i] = HighsVarType::kInteger;
            any_integer = true;
        }
    }
    if (!any_integer) lp.integrality_.clear();
    for (const Term& t : model.objective()) lp.col_cost_[static_cast<std::size_t>(t.var)] += t.coef;
    lp.sense_ = model.objective_sense() == ObjSense::Minimize ? ::ObjSense::kMinimize : ::ObjSense::kMaximize;

    const auto& rows = model.constraints();
    lp.num_row_ = static_cast<HighsInt>(rows.size());
    lp.row_lower_.resize(rows.size());
    lp.row_upper_.resize(rows.size());
    lp.a_matrix_.format_ = MatrixFormat::kRowwise;
    lp.a_matrix_.num_col_ = n;
    lp.a_matrix_.num_row_ = lp.num_row_;
    lp.a_matrix_.start_.assign(1, 0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Constraint& c = rows[r];
        lp.row_lower_[r] = c.sense == Sense::LessEqual ? -kHighsInf : c.rhs;
        lp.row_upper_[r] = c.sense == Sense::GreaterEqual ? kHighsInf : c.rhs;
        std::map<int, double> merged;
        for (const Term& t : c.terms) merged[t.var] += t.coef;
        for (auto [var, coef] : merged) {
            if (coef == 0.0) continue;
            lp.a_matrix_.index_.push_back(var);
            lp.a_matrix_.value_.push_back(coef);
        }
        lp.a_matrix_.start_.push_back(static_cast<HighsInt>(lp.a_matrix_.index_.size()));
    }
    return lp;
}

}  // namespace

std::string HighsBackend::version() const { return highsVersion(); }

SolveOutcome HighsBackend::solve(const MilpModel& model, const SolveRequest& request) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

    SolveOutcome out;
    const ObjSense sense = model.objective_sense();
    auto better = [&](double a, double b) { return sense == ObjSense::Minimize ? a < b : a > b; };

    if (!(request.time_limit > 0.0) || !(request.rel_gap_target >= 0.0 && request.rel_gap_target < 1.0) ||
        request.threads < 1) {
        out.message = "invalid solve request";
        return out;
    }
    if (model.num_variables() == 0) {
        out.status = SolveStatus::Optimal;
        out.incumbents.push_back({0.0, {}, 0.0});
        out.wall_time = elapsed();
        return out;
    }

    Highs highs;
    highs.setOptionValue("output_flag", false);
    highs.setOptionValue("threads", request.threads);
    highs.setOptionValue("time_limit", request.time_limit);
    highs.setOptionValue("mip_rel_gap", request.rel_gap_target);
    highs.setOptionValue("mip_abs_gap", kAbsGap);
    highs.setOptionValue("random_seed", 0);
    if (request.integrality_emphasis) highs.setOptionValue("mip_feasibility_tolerance", 1e-9);
    if (request.incumbent_limit) highs.setOptionValue("mip_max_improving_sols", *request.incumbent_limit);

    if (highs.passModel(to_highs(model)) == HighsStatus::kError) {
        out.message = "engine rejected the model";
        out.wall_time = elapsed();
        return out;
    }

    const auto& ws = request.warm_start ? request.warm_start : model.warm_start();
    if (ws) {
        if (ws->size() != model.num_variables()) {
            out.message = "warm start does not match the model";
            return out;
        }
        if (model.is_feasible(*ws, kWarmStartTol)) out.incumbents.push_back({model.objective_value(*ws), *ws, 0.0});
        HighsSolution sol;
        sol.col_value = *ws;
        sol.value_valid = true;
        highs.setSolution(sol);
    }

    const std::size_t n = model.num_variables();
    highs.setCallback(
        [&](int type, const std::string&, const HighsCallbackOutput* data_out, HighsCallbackInput*, void*) {
            if (type != kCallbackMipImprovingSolution || data_out->mip_solution.size() != n) return;
            double obj = model.objective_value(data_out->mip_solution);
            if (out.incumbents.empty() || better(obj, out.incumbents.back().objective))
                out.incumbents.push_back({obj, data_out->mip_solution, elapsed()});
        },
        nullptr);
    highs.startCallback(kCallbackMipImprovingSolution);

    const HighsStatus run_status = highs.run();
    const HighsModelStatus ms = highs.getModelStatus();
    const HighsInfo& info = highs.getInfo();
    const bool is_mip = model.num_binaries() > 0;

    if (info.primal_solution_status == kSolutionStatusFeasible) {
        const auto& values = highs.getSolution().col_value;
        if (values.size() == n) {
            double obj = model.objective_value(values);
            if (out.incumbents.empty() || better(obj, out.incumbents.back().objective))
                out.incumbents.push_back({obj, values, elapsed()});
        }
    }

    switch (ms) {
        case HighsModelStatus::kOptimal:
        case HighsModelStatus::kModelEmpty:
            out.status = out.has_solution() ? SolveStatus::Optimal : SolveStatus::Error;
            break;
        case HighsModelStatus::kInfeasible:
            out.status = SolveStatus::Infeasible;
            break;
        case HighsModelStatus::kUnbounded:
        case HighsModelStatus::kUnboundedOrInfeasible:
            out.status = SolveStatus::Unbounded;
            break;
        case HighsModelStatus::kTimeLimit:
        case HighsModelStatus::kIterationLimit:
        case HighsModelStatus::kSolutionLimit:
        case HighsModelStatus::kInterrupt:
        case HighsModelStatus::kObjectiveBound:
        case HighsModelStatus::kObjectiveTarget:
        case HighsModelStatus::kUnknown:
            out.status = out.has_solution() ? SolveStatus::FeasibleTimeLimit : SolveStatus::TimeLimitNoSolution;
            break;
        default:
            out.status = SolveStatus::Error;
            out.message = "engine status: " + highs.modelStatusToString(ms);
            break;
    }
    if (run_status == HighsStatus::kError && out.status != SolveStatus::Error && !out.has_solution()) {
        out.status = SolveStatus::Error;
        out.message = "engine error: " + highs.modelStatusToString(ms);
    }

    if (out.has_solution()) {
        const double best = out.best().objective;
        double bound = best;
        if (is_mip && std::isfinite(info.mip_dual_bound)) bound = info.mip_dual_bound;
        if (!is_mip && out.status != SolveStatus::Optimal) {
            bound = sense == ObjSense::Minimize ? -kHighsInf : kHighsInf;
        }
        // A bound past a feasible incumbent is numerical noise.
        if (!better(bound, best)) bound = best;
        out.best_bound = bound;
        out.final_gap = relative_gap(best, bound, sense);
        if (out.status == SolveStatus::Optimal && out.final_gap > request.rel_gap_target &&
            std::abs(best - bound) <= kAbsGap) {
            out.best_bound = best;
            out.final_gap = 0.0;
        }
    } else {
        out.best_bound = std::isfinite(info.mip_dual_bound) ? info.mip_dual_bound
                                                             : (sense == ObjSense::Minimize ? -kHighsInf : kHighsInf);
        out.final_gap = std::numeric_limits<double>::infinity();
    }
    out.wall_time = elapsed();
    return out;
}

std::unique_ptr<SolverBackend> make_backend(std::string_view name) {
    std::string chosen(name);
    if (chosen.empty()) {
        const char* env = std::getenv("OTS_ENGINE");
        chosen = env && *env ? env : "highs";
    }
    if (chosen == "highs") return std::make_unique<HighsBackend>();
    throw std::invalid_argument("unknown solver engine '" + chosen + "' (available: highs)");
}

}  // namespace ots
