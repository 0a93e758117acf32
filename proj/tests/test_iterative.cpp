#include <doctest.h>

#include <deque>
#include <functional>

#include "fixtures.hpp"
#include "ots/bigm.hpp"
#include "ots/iterative.hpp"

using namespace ots;
using namespace ots::testing;

namespace {

PowerNetwork triangle() {
    std::vector<Bus> buses{{1, 0, true}, {2, 150, false}, {3, 0, false}};
    std::vector<Generator> gens{{1, 1, 0, 300, 10}, {2, 3, 0, 300, 50}};
    std::vector<Line> lines{{1, 1, 2, 100, 80}, {2, 2, 3, 100, 200}, {3, 1, 3, 100, 200}};
    return PowerNetwork(buses, gens, lines);
}

// Replays scripted outcomes for MILP solves; pure LPs go to the real engine.
class ScriptedBackend : public SolverBackend {
public:
    using Step = std::function<SolveOutcome(const MilpModel&, const SolveRequest&)>;

    SolveOutcome solve(const MilpModel& model, const SolveRequest& request) override {
        if (model.num_binaries() == 0) return real_->solve(model, request);
        requests.push_back(request);
        models.push_back(model);
        REQUIRE_FALSE(script.empty());
        Step step = script.front();
        script.pop_front();
        return step(model, request);
    }
    [[nodiscard]] std::string name() const override { return "scripted"; }
    [[nodiscard]] std::string version() const override { return "0"; }

    std::deque<Step> script;
    std::vector<SolveRequest> requests;
    std::vector<MilpModel> models;

private:
    std::unique_ptr<SolverBackend> real_ = make_backend();
};

std::vector<double> values_for(const MilpModel& m, const PowerNetwork& net, const std::set<LineId>& closed) {
    auto engine = make_backend();
    auto sol = solve_topology(net, baseline_scenario(net), closed, *engine);
    REQUIRE(sol);
    return m.assignment(sol->named_values());
}

SolveOutcome outcome(SolveStatus status, std::vector<Incumbent> incs, double bound) {
    SolveOutcome o;
    o.status = status;
    o.incumbents = std::move(incs);
    o.best_bound = bound;
    if (o.has_solution()) o.final_gap = relative_gap(o.best().objective, bound, ObjSense::Minimize);
    return o;
}

}  // namespace

TEST_CASE("schedule validation") {
    IterConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.outer_times = {1000, 1000, 1000, 1000};
    CHECK_THROWS(cfg.validate());
    cfg = IterConfig{};
    cfg.pool_size = 0;
    CHECK_THROWS(cfg.validate());
    cfg = IterConfig{};
    cfg.heuristic_time = 0;
    CHECK_THROWS(cfg.validate());
    cfg = IterConfig{};
    cfg.outer_incumbent_limit = 0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("remaining budget charges every measured stage") {
    IterConfig cfg;
    CHECK(remaining_budget(cfg, {}) == 3600);
    CHECK(remaining_budget(cfg, {{30, 30}, {60, 30}}) == 3450);
    CHECK(remaining_budget(cfg, {{30, 30}, {60, 30}, {120, 30}, {300, 30}, {600, 30}}) == 2340);
    CHECK(remaining_budget(cfg, {{4000, 0}}) == 0);
    CHECK_THROWS(remaining_budget(cfg, {{-1, 0}}));
}

TEST_CASE("pool selection keeps distinct topologies, cheapest first") {
    const PowerNetwork net = triangle();
    const MilpModel m = build_ots_model(net, baseline_scenario(net), compute_bn(net));
    const auto all = values_for(m, net, {1, 2, 3});
    const auto open3 = values_for(m, net, {1, 2});
    const auto open1 = values_for(m, net, {2, 3});
    const SolveOutcome o = outcome(SolveStatus::FeasibleTimeLimit,
                                   {{500, all, 0}, {400, open3, 1}, {300, all, 2}, {200, open1, 3}}, 100);
    const auto pool = select_pool(o, m, net, 10);
    REQUIRE(pool.size() == 3);
    CHECK(pool[0].objective_cost == 200);
    CHECK(pool[1].objective_cost == 300);  // the cheaper duplicate of the all-closed topology
    CHECK(pool[2].objective_cost == 400);
    CHECK(select_pool(o, m, net, 2).size() == 2);
    CHECK_THROWS(select_pool(SolveOutcome{}, m, net, 3));
}

TEST_CASE("scripted run reproduces a decreasing trace") {
    const PowerNetwork net = triangle();
    const DemandScenario s = baseline_scenario(net);
    const BigMSet bn = compute_bn(net);
    const MilpModel full = build_ots_model(net, s, bn);
    ScriptedBackend engine;
    engine.script.push_back([&](const MilpModel& m, const SolveRequest&) {
        return outcome(SolveStatus::FeasibleTimeLimit,
                       {{1480.0, values_for(m, net, {1, 2, 3}), 0.1}, {1468.6, values_for(m, net, {1, 2}), 0.2}},
                       1400.0);
    });
    engine.script.push_back([&](const MilpModel& m, const SolveRequest&) {
        return outcome(SolveStatus::FeasibleTimeLimit, {{1456.7, values_for(m, net, {2, 3}), 0.1}}, 1300.0);
    });
    engine.script.push_back([&](const MilpModel& m, const SolveRequest&) {
        return outcome(SolveStatus::Optimal, {{1448.6, values_for(m, net, {2, 3}), 0.1}}, 1448.6);
    });
    IterConfig cfg;
    cfg.outer_times = {30, 60};
    cfg.heuristic_time = 30;
    cfg.total_budget = 600;
    int restricted_seen = 0;
    IterHooks hooks;
    hooks.on_restricted = [&](int iteration, const std::vector<SwitchingSolution>& pool, const MilpModel& r) {
        ++restricted_seen;
        CHECK(iteration == 1);
        CHECK(pool.size() == 2);
        CHECK(r.num_binaries() == full.num_binaries());
    };
    const IterResult res = run_iterative(net, s, bn, cfg, engine, hooks);

    CHECK(res.status == SolveStatus::Optimal);
    REQUIRE(res.objective);
    CHECK(*res.objective == 1448.6);
    CHECK(restricted_seen == 1);
    REQUIRE(res.trace.entries.size() == 3);
    const auto& t = res.trace.entries;
    CHECK(t[0].stage == Stage::Full);
    CHECK(t[1].stage == Stage::Restricted);
    CHECK(t[2].stage == Stage::Full);
    CHECK(*t[0].objective == 1468.6);
    CHECK(*t[1].objective == 1456.7);
    CHECK(*t[2].objective == 1448.6);
    CHECK(t[0].gap);
    CHECK_FALSE(t[2].gap);  // solved to optimality
    CHECK(t[0].iteration == 1);
    CHECK(t[2].iteration == 2);

    REQUIRE(engine.requests.size() == 3);
    CHECK(engine.requests[0].time_limit == 30);
    CHECK(engine.requests[1].time_limit == 30);
    CHECK(engine.requests[2].time_limit == 60);
    // Step 1 warm start: every line closed.
    REQUIRE(engine.requests[0].warm_start);
    CHECK((*engine.requests[0].warm_start)[static_cast<std::size_t>(full.variable_index(var_x(1)))] == 1);
    // The heuristic incumbent (line 1 open) seeds the next outer solve.
    REQUIRE(engine.requests[2].warm_start);
    CHECK((*engine.requests[2].warm_start)[static_cast<std::size_t>(full.variable_index(var_x(1)))] == 0);
    CHECK(engine.models[0] == full);
    CHECK(engine.models[2] == full);

    const std::string csv = write_trace_csv(res.trace);
    CHECK(csv.rfind("iteration,stage,objective,gap,wall_time_s\n", 0) == 0);
    CHECK(csv.find("1,restricted,1456.7,") != std::string::npos);
}

TEST_CASE("leftover budget goes to the final full solve") {
    const PowerNetwork net = triangle();
    const DemandScenario s = baseline_scenario(net);
    ScriptedBackend engine;
    for (int i = 0; i < 3; ++i)
        engine.script.push_back(
            [](const MilpModel&, const SolveRequest&) { return outcome(SolveStatus::TimeLimitNoSolution, {}, 0); });
    IterConfig cfg;
    cfg.outer_times = {10, 20};
    cfg.total_budget = 100;
    const IterResult res = run_iterative(net, s, compute_bn(net), cfg, engine);
    CHECK(res.status == SolveStatus::TimeLimitNoSolution);
    CHECK_FALSE(res.objective);
    REQUIRE(engine.requests.size() == 3);
    CHECK(engine.requests[0].incumbent_limit == cfg.outer_incumbent_limit);
    CHECK(engine.requests[2].time_limit == doctest::Approx(100).epsilon(0.01));
    CHECK(res.trace.entries.size() == 3);
    CHECK_FALSE(res.trace.entries[2].objective);
}

TEST_CASE("a single-topology pool skips the restricted stage") {
    const PowerNetwork net = triangle();
    const DemandScenario s = baseline_scenario(net);
    ScriptedBackend engine;
    engine.script.push_back([&](const MilpModel& m, const SolveRequest&) {
        return outcome(SolveStatus::FeasibleTimeLimit, {{1600, values_for(m, net, {2, 3}), 0}}, 1000);
    });
    engine.script.push_back([&](const MilpModel& m, const SolveRequest&) {
        return outcome(SolveStatus::Optimal, {{1500, values_for(m, net, {2, 3}), 0}}, 1500);
    });
    IterConfig cfg;
    cfg.outer_times = {10, 20};
    cfg.total_budget = 100;
    const IterResult res = run_iterative(net, s, compute_bn(net), cfg, engine);
    CHECK(res.status == SolveStatus::Optimal);
    REQUIRE(res.solution);
    CHECK(res.solution->x.at(1) == 0);
    CHECK(res.trace.entries.size() == 2);
    CHECK(res.trace.entries[1].stage == Stage::Full);
}

TEST_CASE("real engine: iterative and single-step agree on random networks") {
    auto engine = make_backend();
    std::mt19937_64 rng(31);
    for (int i = 0; i < 8; ++i) {
        const PowerNetwork net = random_ots_network(rng, 6, 9);
        const DemandScenario s = baseline_scenario(net);
        const BigMSet sr = compute_sr(net, *engine);
        SolveRequest req;
        req.rel_gap_target = 1e-9;
        const SolveOutcome ss = engine->solve(build_ots_model(net, s, sr), req);
        REQUIRE(ss.status == SolveStatus::Optimal);
        IterConfig cfg;
        cfg.outer_times = {1, 2};
        cfg.heuristic_time = 1;
        cfg.total_budget = 20;
        cfg.outer_incumbent_limit = 1;
        const IterResult it = run_iterative(net, s, sr, cfg, *engine);
        REQUIRE(it.objective);
        CHECK(*it.objective == doctest::Approx(ss.best().objective).epsilon(1e-4));
        std::optional<double> prev;
        for (const auto& e : it.trace.entries) {
            if (prev && e.objective) CHECK(*e.objective <= *prev);
            if (e.objective) prev = e.objective;
        }
    }
}
