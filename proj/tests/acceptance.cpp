// Acceptance checks. Usage: acceptance [N ...]; prints one line per criterion
// and exits nonzero if any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "ots/bigm.hpp"
#include "ots/iterative.hpp"
#include "ots/oracle.hpp"
#include "ots/runner.hpp"

#ifndef OTS_DATA_DIR
#define OTS_DATA_DIR "data"
#endif

using namespace ots;
using namespace ots::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = true;
    std::string detail;
    std::ostringstream failures;
    int failure_count = 0;

    void fail(const std::string& why) {
        pass = false;
        if (failure_count++ < 5) failures << "; " << why;
    }
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

bool rel_le(double a, double b, double tol) { return a <= b + tol * std::max(1.0, std::abs(b)); }
bool rel_eq(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

Verdict criterion1() {
    Verdict v;
    const auto t0 = Clock::now();
    auto engine = make_backend();
    auto expect = [&](const std::string& what, double got, double want) {
        if (got != want) v.fail(what + " = " + std::to_string(got) + ", expected " + std::to_string(want));
    };

    const WeightedMultigraph g1 = five_vertex_graph();
    expect("fig1 longest path n4-n5", longest_simple_path_bruteforce(g1, 4, 5), 162);
    expect("fig1 greedy bound", greedy_bound_moulin(g1, 4, 5, {1, 2, 3, 4, 5}), 142);

    const WeightedMultigraph g2 = twelve_vertex_graph();
    const PruneResult pr = prune_leaf_edges(g2);
    std::set<EdgeId> removed(pr.removed.begin(), pr.removed.end());
    if (removed != std::set<EdgeId>{10, 15, 16}) v.fail("leaf pruning removed the wrong edges");
    const Decomposition d = split_at_cut_vertices(pr.pruned);
    if (d.cut_vertices != std::set<VertexId>{3} || d.blocks.size() != 2) {
        v.fail("cut split did not give two blocks at n3");
    } else {
        std::set<EdgeId> left;
        std::set<EdgeId> right;
        for (auto [e, b] : d.edge_to_block) (b == d.edge_to_block.at(1) ? left : right).insert(e);
        if (left != std::set<EdgeId>{1, 2, 3, 4, 5, 6, 7, 8, 9} || right != std::set<EdgeId>{11, 12, 13, 14, 17})
            v.fail("blocks have the wrong edges");
        expect("top-5 bound for l1", top_k_weight_sum(d.blocks[d.edge_to_block.at(1)], 5, 1), 127);
    }
    const PowerNetwork net = twelve_vertex_network();
    expect("BN for l1", compute_bn(net).value(1), 323);
    const BigMSet sr = compute_sr(net, *engine);
    const BigMSet lp = compute_lp(net, *engine);
    expect("SR for l1", sr.value(1), 110);
    expect("LP for l1", lp.value(1), 103);
    const double secs = seconds_since(t0);
    if (secs >= 5.0) v.fail("took " + std::to_string(secs) + " s");
    v.detail = "162/142, {l10,l15,l16}, cut n3, 127, BN 323, SR 110, LP 103 in " + std::to_string(secs) + " s";
    return v;
}

Verdict criterion2() {
    Verdict v;
    const auto t0 = Clock::now();
    auto engine = make_backend();
    std::mt19937_64 rng(20240601);
    const int graphs = 200;
    int edges_checked = 0;
    for (int i = 0; i < graphs; ++i) {
        const WeightedMultigraph g = random_multigraph(rng, 10, 15);
        const PowerNetwork net = network_from_graph(g);
        const BigMSet bn = compute_bn(net);
        const BigMSet sr = compute_sr(net, *engine);
        const BigMSet lp = compute_lp(net, *engine);
        if (!lp.all_proven()) v.fail("graph " + std::to_string(i) + ": LP bound not proven");
        for (const Edge& e : g.edges()) {
            ++edges_checked;
            const double oracle = longest_simple_path_bruteforce(g, e.u, e.v, e.id);
            const std::string tag = "graph " + std::to_string(i) + " edge " + std::to_string(e.id);
            if (lp.value(e.id) != oracle)
                v.fail(tag + ": LP " + std::to_string(lp.value(e.id)) + " vs oracle " + std::to_string(oracle));
            if (!rel_le(lp.value(e.id), sr.value(e.id), 1e-9)) v.fail(tag + ": LP > SR");
            if (!rel_le(sr.value(e.id), bn.value(e.id), 1e-9)) v.fail(tag + ": SR > BN");
        }
    }
    const double secs = seconds_since(t0);
    if (secs >= 120.0) v.fail("took " + std::to_string(secs) + " s");
    v.detail = std::to_string(graphs) + " graphs, " + std::to_string(edges_checked) + " edges in " +
               std::to_string(secs) + " s";
    return v;
}

struct Instance {
    PowerNetwork network;
    DemandScenario scenario;
    SwitchingSolution truth;
    std::map<BigMStrategy, BigMSet> bigms;
};

// The random instances shared by criteria 3 to 5.
const std::vector<Instance>& instances() {
    static const std::vector<Instance> all = [] {
        std::vector<Instance> out;
        auto engine = make_backend();
        std::mt19937_64 rng(7);
        while (out.size() < 50) {
            PowerNetwork net = random_ots_network(rng, 8, 12);
            DemandScenario s = baseline_scenario(net);
            SwitchingSolution truth = enumerate_topologies_oracle(net, s, *engine);
            std::map<BigMStrategy, BigMSet> bigms{{BigMStrategy::BN, compute_bn(net)},
                                                  {BigMStrategy::SR, compute_sr(net, *engine)},
                                                  {BigMStrategy::LP, compute_lp(net, *engine)}};
            out.push_back({std::move(net), std::move(s), std::move(truth), std::move(bigms)});
        }
        return out;
    }();
    return all;
}

SolveRequest exact_request() {
    SolveRequest req;
    req.time_limit = 60.0;
    req.rel_gap_target = 1e-9;
    req.integrality_emphasis = true;
    return req;
}

Verdict criterion3() {
    Verdict v;
    const auto t0 = Clock::now();
    auto engine = make_backend();
    int with_open = 0;
    int solves = 0;
    const auto& all = instances();
    for (std::size_t i = 0; i < all.size(); ++i) {
        const Instance& inst = all[i];
        const auto ids = inst.network.line_ids();
        auto closed = solve_topology(inst.network, inst.scenario, {ids.begin(), ids.end()}, *engine);
        if (inst.truth.closed_lines().size() < ids.size() &&
            (!closed || inst.truth.objective_cost < closed->objective_cost * (1.0 - 1e-9)))
            ++with_open;
        for (auto strategy : {BigMStrategy::BN, BigMStrategy::SR, BigMStrategy::LP}) {
            const std::string tag = "instance " + std::to_string(i) + " " + to_string(strategy);
            const MilpModel model = build_ots_model(inst.network, inst.scenario, inst.bigms.at(strategy));
            SolveOutcome out = engine->solve(model, exact_request());
            ++solves;
            if (out.status != SolveStatus::Optimal || !out.has_solution()) {
                v.fail(tag + ": status " + to_string(out.status));
                continue;
            }
            if (!rel_eq(out.best().objective, inst.truth.objective_cost, 1e-6))
                v.fail(tag + ": " + std::to_string(out.best().objective) + " vs oracle " +
                       std::to_string(inst.truth.objective_cost));
            const SwitchingSolution sol = decode_switching_solution(model, out.best().values, inst.network);
            if (!check_connectivity(sol.x, inst.network)) v.fail(tag + ": topology islands a bus");
        }
    }
    const double share = double(with_open) / double(all.size());
    if (share < 0.2) v.fail("only " + std::to_string(with_open) + " instances have an optimal open line");
    const double secs = seconds_since(t0);
    if (secs >= 600.0) v.fail("took " + std::to_string(secs) + " s");
    v.detail = std::to_string(all.size()) + " networks, " + std::to_string(solves) + " MILPs match enumeration; " +
               std::to_string(with_open) + " with a profitable open line; " + std::to_string(secs) + " s";
    return v;
}

struct IterRun {
    int pools = 0;
    int members = 0;
    int violations = 0;
};

IterConfig small_schedule() {
    IterConfig cfg;
    cfg.outer_times = {2, 4, 8};
    cfg.heuristic_time = 2;
    cfg.total_budget = 60;
    cfg.rel_gap = 1e-4;
    cfg.outer_incumbent_limit = 2;
    return cfg;
}

// Runs criteria 4 and 5 together: the pools checked by 5 are those of 4.
std::pair<Verdict, Verdict> criteria4and5() {
    Verdict v4;
    Verdict v5;
    auto engine = make_backend();
    IterRun stats;
    const auto& all = instances();
    for (std::size_t i = 0; i < all.size(); ++i) {
        const Instance& inst = all[i];
        IterHooks hooks;
        hooks.on_restricted = [&](int, const std::vector<SwitchingSolution>& pool, const MilpModel& restricted) {
            ++stats.pools;
            for (const SwitchingSolution& member : pool) {
                ++stats.members;
                const auto bad = restricted.violations(restricted.assignment(member.named_values()));
                if (!bad.empty()) {
                    ++stats.violations;
                    v5.fail("instance " + std::to_string(i) + ": member violates " + bad.front().what);
                }
            }
        };
        const IterResult it = run_iterative(inst.network, inst.scenario, inst.bigms.at(BigMStrategy::SR),
                                            small_schedule(), *engine, hooks);
        const std::string tag = "instance " + std::to_string(i);
        if (!it.objective) {
            v4.fail(tag + ": no solution (" + to_string(it.status) + ")");
            continue;
        }
        if (!rel_le(*it.objective, inst.truth.objective_cost, 1e-4) ||
            *it.objective < inst.truth.objective_cost * (1.0 - 1e-6))
            v4.fail(tag + ": " + std::to_string(*it.objective) + " vs single-step " +
                    std::to_string(inst.truth.objective_cost));
        std::optional<double> prev;
        for (const TraceEntry& e : it.trace.entries) {
            if (prev && e.objective && *e.objective > *prev) v4.fail(tag + ": trace increases");
            if (prev && !e.objective) v4.fail(tag + ": trace loses its incumbent");
            if (e.objective) prev = e.objective;
        }
    }
    if (stats.pools == 0) v5.fail("no pool was formed");
    v4.detail = std::to_string(all.size()) + " iterative runs agree with the optimum; traces monotone";
    v5.detail = std::to_string(stats.pools) + " pools, " + std::to_string(stats.members) + " members, " +
                std::to_string(stats.violations) + " violating";
    return {std::move(v4), std::move(v5)};
}

Verdict criterion6() {
    Verdict v;
    const auto t0 = Clock::now();
    const PowerNetwork net = load_case(std::filesystem::path(OTS_DATA_DIR) / "case118_ots.m");
    auto engine = make_backend();
    const BigMSet bn = compute_bn(net);
    const BigMSet sr = compute_sr(net, *engine);
    if (sr.entries.size() != 186) v.fail("expected 186 lines, got " + std::to_string(sr.entries.size()));
    const double mean_time = sr.total_compute_time() / double(sr.entries.size());
    if (mean_time > 0.1) v.fail("mean SR time " + std::to_string(mean_time) + " s per line");
    double ratio_sum = 0.0;
    int ratios = 0;
    for (const auto& [l, e] : sr.entries) {
        if (!rel_le(e.value, bn.value(l), 1e-9)) v.fail("line " + std::to_string(l) + ": SR > BN");
        if (e.value > 0.0) {
            ratio_sum += bn.value(l) / e.value;
            ++ratios;
        }
    }
    const double mean_ratio = ratios ? ratio_sum / ratios : 0.0;
    if (mean_ratio < 2.0) v.fail("mean BN/SR ratio " + std::to_string(mean_ratio));
    const double secs = seconds_since(t0);
    if (secs >= 300.0) v.fail("took " + std::to_string(secs) + " s");
    v.detail = "mean SR time " + std::to_string(mean_time) + " s/line, mean BN/SR " + std::to_string(mean_ratio) +
               " over " + std::to_string(ratios) + " lines; " + std::to_string(secs) + " s";
    return v;
}

Verdict criterion7() {
    Verdict v;
    const PowerNetwork net = load_case(std::filesystem::path(OTS_DATA_DIR) / "case118_ots.m");
    auto engine = make_backend();
    RunConfig cfg;
    cfg.time_limit = 120.0;
    const auto scenarios = sample_scenarios(net, 10, 1);
    const auto tree = default_spanning_tree(net);
    const MethodId method{BigMStrategy::SR, 0.0, Mode::SS};
    const BigMSet sr = bigms_for(net, method, cfg, *engine);
    double saving_sum = 0.0;
    int compared = 0;
    for (const DemandScenario& s : scenarios) {
        const std::string tag = "scenario " + std::to_string(s.scenario_id);
        const RunReport base = run_spanning_tree_baseline(net, s, tree, cfg, *engine);
        if (!base.objective || !base.solution) {
            v.fail(tag + ": baseline found no solution (" + to_string(base.status) + ")");
            continue;
        }
        const RunReport full = run_method(net, s, method, cfg, *engine, &sr, &*base.solution);
        if (!full.objective) {
            v.fail(tag + ": full OTS found no solution");
            continue;
        }
        if (!rel_le(*full.objective, *base.objective, 1e-9))
            v.fail(tag + ": full " + std::to_string(*full.objective) + " > baseline " + std::to_string(*base.objective));
        saving_sum += (*base.objective - *full.objective) / *base.objective;
        ++compared;
    }
    v.detail = std::to_string(compared) + " scenarios, full OTS never costlier; mean saving " +
               std::to_string(compared ? 100.0 * saving_sum / compared : 0.0) + "%";
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8};

    bool ok = true;
    auto report = [&](int n, Verdict& v) {
        std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << " - " << v.detail
                  << v.failures.str() << std::endl;
        ok = ok && v.pass;
    };
    auto guarded = [](const std::function<Verdict()>& f) {
        try {
            return f();
        } catch (const std::exception& e) {
            Verdict v;
            v.fail(std::string("exception: ") + e.what());
            return v;
        }
    };
    if (selected.contains(1)) { Verdict v = guarded(criterion1); report(1, v); }
    if (selected.contains(2)) { Verdict v = guarded(criterion2); report(2, v); }
    if (selected.contains(3)) { Verdict v = guarded(criterion3); report(3, v); }
    if (selected.contains(4) || selected.contains(5)) {
        std::pair<Verdict, Verdict> both;
        try {
            both = criteria4and5();
        } catch (const std::exception& e) {
            both.first.fail(std::string("exception: ") + e.what());
            both.second.fail(std::string("exception: ") + e.what());
        }
        if (selected.contains(4)) report(4, both.first);
        if (selected.contains(5)) report(5, both.second);
    }
    if (selected.contains(6)) { Verdict v = guarded(criterion6); report(6, v); }
    if (selected.contains(7)) { Verdict v = guarded(criterion7); report(7, v); }
    if (selected.contains(8))
        std::cout << "criterion 8: SKIP - absolute benchmark times, unsolved counts and full-scale exact "
                     "longest-path ratios are not reproducible at desk scale; criteria 2 and 6 stand in"
                  << std::endl;
    return ok ? 0 : 1;
}
