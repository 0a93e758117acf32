#include "ots/iterative.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "ots/text_util.hpp"

namespace ots {

void IterConfig::validate() const {
    double sum = 0.0;
    for (double t : outer_times) {
        if (!(t > 0.0)) throw std::invalid_argument("outer stage times must be positive");
        sum += t;
    }
    if (!(heuristic_time > 0.0)) throw std::invalid_argument("heuristic time must be positive");
    if (!(total_budget > 0.0)) throw std::invalid_argument("total budget must be positive");
    if (!(sum < total_budget)) throw std::invalid_argument("outer stage times must sum to less than the total budget");
    if (pool_size < 1) throw std::invalid_argument("pool size must be at least 1");
    if (!(rel_gap >= 0.0 && rel_gap < 1.0)) throw std::invalid_argument("relative gap must lie in [0, 1)");
    if (outer_incumbent_limit && *outer_incumbent_limit < 1)
        throw std::invalid_argument("outer incumbent limit must be positive");
}

std::string to_string(Stage stage) { return stage == Stage::Full ? "full" : "restricted"; }

std::vector<SwitchingSolution> select_pool(const SolveOutcome& outcome, const MilpModel& model,
                                           const PowerNetwork& network, int k) {
    if (!outcome.has_solution()) throw std::invalid_argument("cannot form a pool without incumbents");
    std::map<std::vector<int>, SwitchingSolution> by_topology;
    for (const Incumbent& inc : outcome.incumbents) {
        SwitchingSolution s = decode_switching_solution(model, inc.values, network);
        s.objective_cost = inc.objective;
        std::vector<int> key;
        for (auto [l, v] : s.x) key.push_back(v);
        auto it = by_topology.find(key);
        if (it == by_topology.end() || s.objective_cost < it->second.objective_cost) by_topology[key] = std::move(s);
    }
    std::vector<SwitchingSolution> pool;
    for (auto& [key, s] : by_topology) pool.push_back(std::move(s));
    std::stable_sort(pool.begin(), pool.end(), [](const SwitchingSolution& a, const SwitchingSolution& b) {
        return a.objective_cost < b.objective_cost;
    });
    if (pool.size() > static_cast<std::size_t>(std::max(k, 0))) pool.resize(static_cast<std::size_t>(std::max(k, 0)));
    return pool;
}

double remaining_budget(const IterConfig& cfg, const std::vector<std::pair<double, double>>& measured) {
    double used = 0.0;
    for (auto [outer, heuristic] : measured) {
        if (outer < 0.0 || heuristic < 0.0) throw std::invalid_argument("measured times must be nonnegative");
        used += outer + heuristic;
    }
    return std::max(0.0, cfg.total_budget - used);
}

IterResult run_iterative(const PowerNetwork& network, const DemandScenario& scenario, const BigMSet& outer_bigms,
                         const IterConfig& cfg, SolverBackend& backend, const IterHooks& hooks) {
    using Clock = std::chrono::steady_clock;
    cfg.validate();
    const auto start = Clock::now();
    auto seconds = [](Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); };

    IterResult res;
    const MilpModel full = build_ots_model(network, scenario, outer_bigms);
    std::vector<std::pair<double, double>> measured;

    std::optional<double> best;
    std::vector<double> best_values;
    std::optional<std::vector<double>> warm;
    double bound = -std::numeric_limits<double>::infinity();

    // Step 1: every line closed.
    const auto ids = network.line_ids();
    std::set<LineId> all(ids.begin(), ids.end());
    if (auto init = solve_topology(network, scenario, all, backend)) warm = full.assignment(init->named_values());

    // Re-derive a clean full-model point for a topology, falling back to raw values.
    auto polished = [&](const MilpModel& model, const std::vector<double>& values) {
        SwitchingSolution s = decode_switching_solution(model, values, network);
        if (auto clean = solve_topology(network, scenario, s.closed_lines(), backend))
            return full.assignment(clean->named_values());
        return values;
    };

    auto record = [&](int iteration, Stage stage, const SolveOutcome& o, double wall) {
        if (o.has_solution() && (!best || o.best().objective < *best)) {
            best = o.best().objective;
            best_values = o.best().values;
        }
        TraceEntry e;
        e.iteration = iteration;
        e.stage = stage;
        e.objective = best;
        if (o.status != SolveStatus::Optimal && o.has_solution()) e.gap = o.final_gap;
        e.wall_time_s = wall;
        e.status = o.status;
        res.trace.entries.push_back(e);
    };

    auto finish = [&](SolveStatus status) {
        res.status = status;
        res.objective = best;
        res.wall_time_s = seconds(start);
        if (best) {
            res.best_bound = std::min(bound, *best);
            res.final_gap = relative_gap(*best, res.best_bound, ObjSense::Minimize);
            SwitchingSolution s = decode_switching_solution(full, best_values, network);
            auto clean = solve_topology(network, scenario, s.closed_lines(), backend);
            res.solution = clean ? *clean : s;
            res.solution->objective_cost = *best;
        } else {
            res.best_bound = bound;
            res.final_gap = std::numeric_limits<double>::infinity();
        }
        return res;
    };

    auto full_request = [&](double limit, bool capped) {
        SolveRequest req;
        req.time_limit = limit;
        req.rel_gap_target = cfg.rel_gap;
        req.integrality_emphasis = cfg.integrality_emphasis;
        req.warm_start = warm;
        if (capped) req.incumbent_limit = cfg.outer_incumbent_limit;
        return req;
    };

    const int stages = static_cast<int>(cfg.outer_times.size());
    for (int i = 0; i < stages; ++i) {
        // Step 2: full model, warm-started.
        double left = remaining_budget(cfg, measured);
        if (left <= 0.0) break;
        auto t0 = Clock::now();
        SolveOutcome outer = backend.solve(full, full_request(std::min(cfg.outer_times[static_cast<std::size_t>(i)], left), true));
        double t_outer = seconds(t0);
        if (outer.status == SolveStatus::Error) {
            res.message = "outer solve failed: " + outer.message;
            return finish(SolveStatus::Error);
        }
        record(i + 1, Stage::Full, outer, t_outer);
        if (std::isfinite(outer.best_bound)) bound = std::max(bound, outer.best_bound);
        if (outer.status == SolveStatus::Optimal) return finish(SolveStatus::Optimal);
        if (outer.status == SolveStatus::Infeasible) return finish(SolveStatus::Infeasible);
        if (!outer.has_solution()) {
            measured.emplace_back(t_outer, 0.0);
            continue;
        }

        // Step 3: pool of the best distinct topologies, each re-dispatched.
        std::vector<SwitchingSolution> pool;
        for (const SwitchingSolution& member : select_pool(outer, full, network, cfg.pool_size)) {
            auto clean = solve_topology(network, scenario, member.closed_lines(), backend);
            if (clean) pool.push_back(std::move(*clean));
        }
        std::stable_sort(pool.begin(), pool.end(), [](const SwitchingSolution& a, const SwitchingSolution& b) {
            return a.objective_cost < b.objective_cost;
        });
        warm = pool.empty() ? outer.best().values : full.assignment(pool.front().named_values());
        if (pool.size() < 2) {
            measured.emplace_back(t_outer, 0.0);
            continue;
        }

        // Step 4: shortest-path big-Ms per member.
        std::vector<BigMSet> pool_bigms;
        for (const SwitchingSolution& member : pool)
            pool_bigms.push_back(compute_sp(network, member.closed_lines(), outer_bigms));
        MilpModel restricted = build_restricted_model(network, scenario, pool, pool_bigms, outer_bigms);
        if (hooks.on_restricted) hooks.on_restricted(i + 1, pool, restricted);

        // Step 5: restricted model.
        auto pending = measured;
        pending.emplace_back(t_outer, 0.0);
        left = remaining_budget(cfg, pending);
        if (left <= 0.0) {
            measured = pending;
            break;
        }
        SolveRequest hreq;
        hreq.time_limit = std::min(cfg.heuristic_time, left);
        hreq.rel_gap_target = cfg.rel_gap;
        hreq.integrality_emphasis = cfg.integrality_emphasis;
        t0 = Clock::now();
        SolveOutcome heur = backend.solve(restricted, hreq);
        double t_heur = seconds(t0);
        measured.emplace_back(t_outer, t_heur);
        if (heur.status == SolveStatus::Error) {
            res.message = "restricted solve failed: " + heur.message;
            return finish(SolveStatus::Error);
        }
        record(i + 1, Stage::Restricted, heur, t_heur);

        // Step 6: carry the heuristic incumbent into the next outer solve.
        if (heur.has_solution() && heur.best().objective <= pool.front().objective_cost)
            warm = polished(restricted, heur.best().values);
    }

    // Steps 7-8: whatever budget is left goes to one last full solve.
    double left = remaining_budget(cfg, measured);
    if (left <= 0.0) return finish(best ? SolveStatus::FeasibleTimeLimit : SolveStatus::TimeLimitNoSolution);
    auto t0 = Clock::now();
    SolveOutcome last = backend.solve(full, full_request(left, false));
    double t_last = seconds(t0);
    if (last.status == SolveStatus::Error) {
        res.message = "final solve failed: " + last.message;
        return finish(SolveStatus::Error);
    }
    record(stages + 1, Stage::Full, last, t_last);
    if (std::isfinite(last.best_bound)) bound = std::max(bound, last.best_bound);
    if (last.status == SolveStatus::Optimal || last.status == SolveStatus::Infeasible) return finish(last.status);
    return finish(best ? SolveStatus::FeasibleTimeLimit : SolveStatus::TimeLimitNoSolution);
}

std::string write_trace_csv(const IterationTrace& trace) {
    std::string out = "iteration,stage,objective,gap,wall_time_s\n";
    for (const TraceEntry& e : trace.entries) {
        out += std::to_string(e.iteration) + "," + to_string(e.stage) + "," +
               (e.objective ? format_double(*e.objective) : "") + "," + (e.gap ? format_double(*e.gap) : "") + "," +
               format_double(e.wall_time_s) + "\n";
    }
    return out;
}

}  // namespace ots
