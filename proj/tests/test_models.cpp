#include <doctest.h>

#include "fixtures.hpp"
#include "ots/bigm.hpp"
#include "ots/oracle.hpp"
#include "ots/ots_models.hpp"

using namespace ots;
using namespace ots::testing;

namespace {

// Three buses in a triangle: a cheap generator at 1, an expensive one at 3,
// 150 MW of load at 2 and a tight 1-2 line.
PowerNetwork triangle() {
    std::vector<Bus> buses{{1, 0, true}, {2, 150, false}, {3, 0, false}};
    std::vector<Generator> gens{{1, 1, 0, 300, 10}, {2, 3, 0, 300, 50}};
    std::vector<Line> lines{{1, 1, 2, 100, 80}, {2, 2, 3, 100, 200}, {3, 1, 3, 100, 200}};
    return PowerNetwork(buses, gens, lines);
}

MilpModel relaxation(const MilpModel& m) {
    MilpModel r;
    for (const Variable& v : m.variables()) r.add_variable(v.name, VarKind::Continuous, v.lower, v.upper);
    for (const Constraint& c : m.constraints()) r.add_constraint(c.name, c.terms, c.sense, c.rhs);
    r.set_objective(m.objective_sense(), m.objective());
    return r;
}

std::set<LineId> all_lines(const PowerNetwork& net) {
    const auto ids = net.line_ids();
    return {ids.begin(), ids.end()};
}

}  // namespace

TEST_CASE("model layout") {
    const PowerNetwork net = triangle();
    const MilpModel m = build_ots_model(net, baseline_scenario(net), compute_bn(net));
    CHECK(m.num_binaries() == 9);  // x, y, z per line
    CHECK(m.num_variables() == 9 + 3 + 2 + 3 + 3);
    CHECK(m.constraint("bal_2").rhs == 150);
    CHECK(m.constraint("ref_order").rhs == 1);
    CHECK(m.has_variable(var_u(2)));
    CHECK_THROWS(m.constraint("conn_1"));  // the reference bus is the root
    CHECK(m.variables()[static_cast<std::size_t>(m.variable_index(var_u(3)))].upper == 3);
    CHECK(read_lp(write_lp(m)) == m);
}

TEST_CASE("dispatch model and topology solve") {
    auto engine = make_backend();
    const PowerNetwork net = triangle();
    const DemandScenario s = baseline_scenario(net);
    auto closed = solve_topology(net, s, all_lines(net), *engine);
    REQUIRE(closed);
    // All closed: f12 = 2/3 p1 + 1/3 p3 = 50 + p1/3 <= 80, so p1 = 90 and p3 = 60.
    CHECK(closed->f.at(1) == doctest::Approx(80));
    CHECK(closed->objective_cost == doctest::Approx(90 * 10 + 60 * 50));
    CHECK(check_switching_solution(*closed, net).empty());
    // Without 1-3 the cheap unit only reaches the load over 1-2.
    auto open3 = solve_topology(net, s, {1, 2}, *engine);
    REQUIRE(open3);
    CHECK(open3->objective_cost == doctest::Approx(80 * 10 + 70 * 50));
    CHECK(open3->f.at(3) == 0);
    CHECK(open3->x.at(3) == 0);
    CHECK(check_switching_solution(*open3, net).empty());
    // Without 1-2 everything flows 1-3-2 with room to spare.
    auto open1 = solve_topology(net, s, {2, 3}, *engine);
    REQUIRE(open1);
    CHECK(open1->objective_cost == doctest::Approx(150 * 10));
}

TEST_CASE("oracle on the triangle and agreement of every strategy") {
    auto engine = make_backend();
    const PowerNetwork net = triangle();
    const DemandScenario s = baseline_scenario(net);
    const SwitchingSolution truth = enumerate_topologies_oracle(net, s, *engine);
    CHECK(check_connectivity(truth.x, net));
    CHECK(truth.objective_cost == doctest::Approx(1500));
    CHECK(truth.x.at(1) == 0);
    for (const BigMSet& set : {compute_bn(net), compute_sr(net, *engine), compute_lp(net, *engine)}) {
        const MilpModel m = build_ots_model(net, s, set);
        SolveOutcome out = engine->solve(m, {});
        REQUIRE(out.status == SolveStatus::Optimal);
        CHECK(out.best().objective == doctest::Approx(truth.objective_cost));
        const SwitchingSolution sol = extract_switching_solution(m, out.best().values, net);
        CHECK(check_connectivity(sol.x, net));
    }
}

TEST_CASE("solution checks catch broken invariants") {
    auto engine = make_backend();
    const PowerNetwork net = triangle();
    SwitchingSolution sol = *solve_topology(net, baseline_scenario(net), all_lines(net), *engine);
    SwitchingSolution bad_flow = sol;
    bad_flow.f[1] += 5;
    CHECK_FALSE(check_switching_solution(bad_flow, net).empty());
    SwitchingSolution open_flow = sol;
    open_flow.x[2] = 0;
    CHECK_FALSE(check_switching_solution(open_flow, net).empty());
    SwitchingSolution islanded = sol;
    islanded.x[1] = islanded.x[3] = 0;
    islanded.f[1] = islanded.f[3] = 0;
    CHECK_FALSE(check_switching_solution(islanded, net).empty());
    const MilpModel m = build_ots_model(net, baseline_scenario(net), compute_bn(net));
    std::vector<double> values = m.assignment(bad_flow.named_values());
    CHECK_THROWS_AS(extract_switching_solution(m, values, net), SolutionError);
}

TEST_CASE("islanding topologies are infeasible in the model") {
    auto engine = make_backend();
    const PowerNetwork net = triangle();
    MilpModel m = build_ots_model(net, baseline_scenario(net), compute_bn(net));
    for (LineId l : {1, 2}) m.set_bounds(m.variable_index(var_x(l)), 0, 0);
    CHECK(engine->solve(m, {}).status == SolveStatus::Infeasible);
}

TEST_CASE("near-integral values round to the nearest status") {
    auto engine = make_backend();
    const PowerNetwork net = triangle();
    const MilpModel m = build_ots_model(net, baseline_scenario(net), compute_bn(net));
    const SwitchingSolution sol = *solve_topology(net, baseline_scenario(net), {1, 2, 3}, *engine);
    auto values = m.assignment(sol.named_values());
    values[static_cast<std::size_t>(m.variable_index(var_x(1)))] = 0.9999;
    CHECK(extract_switching_solution(m, values, net).x.at(1) == 1);
}

TEST_CASE("fixing lines closed") {
    const PowerNetwork net = triangle();
    MilpModel m = build_ots_model(net, baseline_scenario(net), compute_bn(net));
    fix_lines_closed(m, {1, 2});
    CHECK(m.variables()[static_cast<std::size_t>(m.variable_index(var_x(1)))].lower == 1);
    CHECK(m.variables()[static_cast<std::size_t>(m.variable_index(var_x(3)))].lower == 0);
}

TEST_CASE("restricted model bounds") {
    auto engine = make_backend();
    const PowerNetwork net = triangle();
    const DemandScenario s = baseline_scenario(net);
    const BigMSet bn = compute_bn(net);
    std::vector<SwitchingSolution> pool{*solve_topology(net, s, {1, 2}, *engine),
                                        *solve_topology(net, s, all_lines(net), *engine),
                                        *solve_topology(net, s, {2, 3}, *engine)};
    CHECK_FALSE(solve_topology(net, s, {1, 3}, *engine));  // 150 MW cannot reach bus 2 over 80 MW
    std::vector<BigMSet> bigms;
    for (const auto& p : pool) bigms.push_back(compute_sp(net, p.closed_lines(), bn));
    const MilpModel r = build_restricted_model(net, s, pool, bigms, bn);
    auto lower = [&](LineId l) { return r.variables()[static_cast<std::size_t>(r.variable_index(var_x(l)))].lower; };
    CHECK(lower(1) == 0);
    CHECK(lower(2) == 1);  // closed in every member
    CHECK(lower(3) == 0);
    REQUIRE(r.warm_start());
    CHECK(r.is_feasible(*r.warm_start()));
    for (const auto& p : pool) CHECK(r.violations(r.assignment(p.named_values())).empty());
    CHECK_THROWS(build_restricted_model(net, s, pool, {bn}, bn));
}

TEST_CASE("property: every connected topology is feasible under every valid big-M set") {
    auto engine = make_backend();
    std::mt19937_64 rng(17);
    for (int i = 0; i < 25; ++i) {
        const PowerNetwork net = random_ots_network(rng, 6, 8);
        const DemandScenario s = baseline_scenario(net);
        const BigMSet bn = compute_bn(net);
        const BigMSet sr = compute_sr(net, *engine);
        const BigMSet lp = compute_lp(net, *engine);
        const MilpModel m_bn = build_ots_model(net, s, bn);
        const MilpModel m_sr = build_ots_model(net, s, sr);
        const MilpModel m_lp = build_ots_model(net, s, lp);
        const auto& lines = net.lines();
        for (std::uint32_t mask = 0; mask < (1u << lines.size()); ++mask) {
            std::set<LineId> closed;
            for (std::size_t k = 0; k < lines.size(); ++k)
                if (mask & (1u << k)) closed.insert(lines[k].id);
            if (!lines_connect_all_buses(net, closed)) continue;
            auto sol = solve_topology(net, s, closed, *engine);
            REQUIRE(sol);
            CHECK(check_switching_solution(*sol, net).empty());
            for (const MilpModel* m : {&m_bn, &m_sr, &m_lp}) {
                const auto bad = m->violations(m->assignment(sol->named_values()));
                CHECK_MESSAGE(bad.empty(), "violates " << (bad.empty() ? "" : bad.front().what));
            }
        }
    }
}

TEST_CASE("property: tighter big-Ms give relaxations that are no weaker") {
    auto engine = make_backend();
    std::mt19937_64 rng(23);
    for (int i = 0; i < 25; ++i) {
        const PowerNetwork net = random_ots_network(rng, 7, 10);
        const DemandScenario s = baseline_scenario(net);
        auto relaxed = [&](const BigMSet& set) {
            SolveOutcome out = engine->solve(relaxation(build_ots_model(net, s, set)), {});
            REQUIRE(out.status == SolveStatus::Optimal);
            return out.best().objective;
        };
        const double bn = relaxed(compute_bn(net));
        const double sr = relaxed(compute_sr(net, *engine));
        const double lp = relaxed(compute_lp(net, *engine));
        CHECK(bn <= sr + 1e-6 * std::max(1.0, std::abs(sr)));
        CHECK(sr <= lp + 1e-6 * std::max(1.0, std::abs(lp)));
    }
}

TEST_CASE("property: restricted and full models nest") {
    auto engine = make_backend();
    std::mt19937_64 rng(41);
    int checked = 0;
    for (int i = 0; i < 50; ++i) {
        const PowerNetwork net = random_ots_network(rng, 6, 8);
        const DemandScenario s = baseline_scenario(net);
        const BigMSet sr = compute_sr(net, *engine);
        const MilpModel full = build_ots_model(net, s, sr);
        // Pool: the all-closed topology plus every topology with one line open.
        std::vector<SwitchingSolution> pool;
        const auto ids = net.line_ids();
        std::set<LineId> all(ids.begin(), ids.end());
        if (auto sol = solve_topology(net, s, all, *engine)) pool.push_back(*sol);
        for (LineId l : ids) {
            std::set<LineId> closed = all;
            closed.erase(l);
            if (!lines_connect_all_buses(net, closed)) continue;
            if (auto sol = solve_topology(net, s, closed, *engine)) pool.push_back(*sol);
        }
        if (pool.size() < 2) continue;
        std::stable_sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
            return a.objective_cost < b.objective_cost;
        });
        std::vector<BigMSet> bigms;
        for (const auto& p : pool) bigms.push_back(compute_sp(net, p.closed_lines(), sr));
        const MilpModel restricted = build_restricted_model(net, s, pool, bigms, sr);
        for (const auto& p : pool) {
            CHECK(full.violations(full.assignment(p.named_values())).empty());
            CHECK(restricted.violations(restricted.assignment(p.named_values())).empty());
        }
        SolveOutcome out = engine->solve(restricted, {});
        REQUIRE(out.status == SolveStatus::Optimal);
        CHECK(full.violations(out.best().values).empty());
        CHECK(out.best().objective <= pool.front().objective_cost + 1e-6 * std::abs(pool.front().objective_cost));
        ++checked;
    }
    CHECK(checked >= 25);
}
