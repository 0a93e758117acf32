#include <doctest.h>

#include <cmath>
#include <random>

#include "ots/milp_model.hpp"
#include "ots/solver.hpp"

using namespace ots;

namespace {

// max 5a + 4b + 3c  s.t. 2a + 3b + c <= 5, 4a + b + 2c <= 11, 3a + 4b + 2c <= 8, binaries.
MilpModel knapsack() {
    MilpModel m;
    int a = m.add_variable("a", VarKind::Binary, 0, 1);
    int b = m.add_variable("b", VarKind::Binary, 0, 1);
    int c = m.add_variable("c", VarKind::Binary, 0, 1);
    m.add_constraint("r1", {{a, 2}, {b, 3}, {c, 1}}, Sense::LessEqual, 5);
    m.add_constraint("r2", {{a, 4}, {b, 1}, {c, 2}}, Sense::LessEqual, 11);
    m.add_constraint("r3", {{a, 3}, {b, 4}, {c, 2}}, Sense::LessEqual, 8);
    m.set_objective(ObjSense::Maximize, {{a, 5}, {b, 4}, {c, 3}});
    return m;
}

// Enumerates every binary assignment; continuous variables are not allowed.
double brute_force_max(const MilpModel& m) {
    double best = -INFINITY;
    const std::size_t n = m.num_variables();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1;
        if (m.is_feasible(x)) best = std::max(best, m.objective_value(x));
    }
    return best;
}

}  // namespace

TEST_CASE("model construction rejects malformed input") {
    MilpModel m;
    int x = m.add_variable("x", VarKind::Continuous, 0, 10);
    CHECK_THROWS_AS(m.add_variable("x", VarKind::Continuous, 0, 1), ModelError);
    CHECK_THROWS_AS(m.add_variable("b", VarKind::Binary, 0, 2), ModelError);
    CHECK_THROWS_AS(m.add_variable("y", VarKind::Continuous, 3, 1), ModelError);
    CHECK_THROWS_AS(m.add_constraint("c", {}, Sense::LessEqual, 1), ModelError);
    CHECK_THROWS_AS(m.add_constraint("c", {{7, 1}}, Sense::LessEqual, 1), ModelError);
    m.add_constraint("c", {{x, 1}}, Sense::LessEqual, 1);
    CHECK_THROWS_AS(m.add_constraint("c", {{x, 1}}, Sense::LessEqual, 2), ModelError);
    CHECK_THROWS_AS(m.set_warm_start({1, 2}), ModelError);
    CHECK(m.variable_index("x") == 0);
    CHECK_THROWS(m.variable_index("nope"));
}

TEST_CASE("violations report rows, bounds and integrality") {
    MilpModel m = knapsack();
    CHECK(m.is_feasible({1, 1, 0}));
    auto v = m.violations({1, 1, 1});
    REQUIRE(v.size() == 2);
    CHECK(v[0].what == "r1");
    CHECK(v[0].amount == doctest::Approx(1));
    CHECK(m.violations({0.5, 0, 0}).size() == 1);
    CHECK(m.violations({2, 0, 0}).size() >= 1);
    CHECK(m.objective_value({1, 1, 0}) == 9);
}

TEST_CASE("named assignment round trip") {
    MilpModel m = knapsack();
    auto values = m.assignment({{"b", 1}, {"c", 1}});
    CHECK(values == std::vector<double>{0, 1, 1});
    CHECK(m.named_values(values).at("c") == 1);
}

TEST_CASE("LP text round trip") {
    MilpModel m = knapsack();
    int f = m.add_variable("free_var", VarKind::Continuous, -INFINITY, INFINITY);
    int g = m.add_variable("g", VarKind::Continuous, -3.5, 2.25);
    m.add_constraint("neg_rhs", {{f, 1}, {g, -2}}, Sense::GreaterEqual, -7.125);
    m.add_constraint("eq", {{f, 0.1}, {g, 1}}, Sense::Equal, 0);
    const std::string text = write_lp(m);
    CHECK(read_lp(text) == m);
    CHECK(write_lp(read_lp(text)) == text);
    CHECK_THROWS(read_lp("Minimize\n obj: x\nSubject To\n c: x <=\nEnd\n"));
}

TEST_CASE("HiGHS solves a small knapsack to the enumerated optimum") {
    auto engine = make_backend("highs");
    const MilpModel m = knapsack();
    SolveOutcome out = engine->solve(m, {});
    REQUIRE(out.status == SolveStatus::Optimal);
    CHECK(out.best().objective == doctest::Approx(brute_force_max(m)));
    CHECK(out.final_gap == doctest::Approx(0.0));
    CHECK(m.is_feasible(out.best().values));
    CHECK_FALSE(engine->version().empty());
    CHECK_THROWS(make_backend("no-such-engine"));
}

TEST_CASE("incumbents strictly improve and a feasible warm start is the first one") {
    auto engine = make_backend();
    const MilpModel m = knapsack();
    SolveRequest req;
    req.warm_start = std::vector<double>{0, 0, 1};
    SolveOutcome out = engine->solve(m, req);
    REQUIRE(out.incumbents.size() >= 1);
    CHECK(out.incumbents.front().objective == 3);
    for (std::size_t i = 1; i < out.incumbents.size(); ++i) {
        CHECK(out.incumbents[i].objective > out.incumbents[i - 1].objective);
        CHECK(out.incumbents[i].wall_time >= out.incumbents[i - 1].wall_time);
    }
    CHECK(out.best().objective == 9);
}

TEST_CASE("infeasible and unbounded statuses") {
    auto engine = make_backend();
    MilpModel inf;
    int x = inf.add_variable("x", VarKind::Binary, 0, 1);
    inf.add_constraint("c", {{x, 1}}, Sense::GreaterEqual, 2);
    inf.set_objective(ObjSense::Minimize, {{x, 1}});
    CHECK(engine->solve(inf, {}).status == SolveStatus::Infeasible);

    MilpModel unb;
    int y = unb.add_variable("y", VarKind::Continuous, 0, INFINITY);
    int b = unb.add_variable("b", VarKind::Binary, 0, 1);
    unb.add_constraint("c", {{y, 1}, {b, -1}}, Sense::GreaterEqual, 0);
    unb.set_objective(ObjSense::Maximize, {{y, 1}});
    const auto st = engine->solve(unb, {}).status;
    CHECK((st == SolveStatus::Unbounded || st == SolveStatus::Infeasible || st == SolveStatus::Error));
    CHECK(st != SolveStatus::Optimal);
}

TEST_CASE("relative gap") {
    CHECK(relative_gap(100, 99, ObjSense::Minimize) == doctest::Approx(0.01));
    CHECK(relative_gap(100, 101, ObjSense::Maximize) == doctest::Approx(0.01));
    CHECK(relative_gap(100, 100, ObjSense::Minimize) == 0);
    CHECK(std::isinf(relative_gap(100, -INFINITY, ObjSense::Minimize)));
}

TEST_CASE("property: random pure-binary models match enumeration") {
    auto engine = make_backend();
    std::mt19937_64 rng(3);
    auto coef = [&](int lo, int hi) { return double(std::uniform_int_distribution<int>(lo, hi)(rng)); };
    for (int t = 0; t < 60; ++t) {
        MilpModel m;
        const int n = 2 + t % 7;
        std::vector<Term> obj;
        for (int i = 0; i < n; ++i) {
            m.add_variable("v" + std::to_string(i), VarKind::Binary, 0, 1);
            obj.push_back({i, coef(-5, 9)});
        }
        for (int r = 0; r < 3; ++r) {
            std::vector<Term> row;
            for (int i = 0; i < n; ++i) row.push_back({i, coef(0, 6)});
            m.add_constraint("r" + std::to_string(r), row, Sense::LessEqual, coef(3, 12));
        }
        m.set_objective(ObjSense::Maximize, obj);
        SolveRequest req;
        req.rel_gap_target = 0;
        SolveOutcome out = engine->solve(m, req);
        REQUIRE(out.status == SolveStatus::Optimal);
        CHECK(out.best().objective == doctest::Approx(brute_force_max(m)));
        CHECK(read_lp(write_lp(m)) == m);
    }
}
