#include <doctest.h>

#include "fixtures.hpp"
#include "ots/bigm.hpp"
#include "ots/longest_path.hpp"

#ifndef OTS_DATA_DIR
#define OTS_DATA_DIR "data"
#endif

using namespace ots;
using namespace ots::testing;

namespace {

// Lines whose endpoints have no other connection once the line is removed.
std::set<LineId> bridges_by_removal(const PowerNetwork& net) {
    const WeightedMultigraph g = to_multigraph(net);
    std::set<LineId> out;
    for (const Edge& e : g.edges())
        if (shortest_path_weight(g, e.u, e.v, e.id) == kInfinity) out.insert(e.id);
    return out;
}

}  // namespace

TEST_CASE("relaxed longest path on the left block admits a cycle") {
    auto engine = make_backend();
    const WeightedMultigraph g = twelve_vertex_graph();
    const Decomposition d = split_at_cut_vertices(prune_leaf_edges(g).pruned);
    const WeightedMultigraph& left = d.blocks[d.edge_to_block.at(1)];
    const LongestPathResult relaxed = solve_relaxed_longest_path(left, 1, 2, 1, *engine);
    const LongestPathResult exact = solve_exact_longest_path(left, 1, 2, 1, *engine);
    CHECK(relaxed.value == 110);
    CHECK(exact.value == 103);
    CHECK(exact.proven_optimal);
    CHECK(exact.rounds >= 1);
    CHECK(exact.value == longest_simple_path_bruteforce(left, 1, 2, 1));
    double w = 0;
    for (EdgeId e : exact.path) w += left.edge(e).weight;
    CHECK(w == 103);
}

TEST_CASE("relaxed model decodes into a path and disjoint cycles") {
    auto engine = make_backend();
    const WeightedMultigraph g = twelve_vertex_graph();
    const MilpModel m = build_relaxed_longest_path(g, 1, 2, 1);
    SolveRequest req;
    req.rel_gap_target = 0;
    SolveOutcome out = engine->solve(m, req);
    REQUIRE(out.status == SolveStatus::Optimal);
    const ArcDecomposition arcs = decode_arcs(g, 1, 2, m, out.best().values);
    CHECK(arcs.weight == doctest::Approx(out.best().objective));
    REQUIRE_FALSE(arcs.path.empty());
    std::set<VertexId> path_vertices{1};
    for (EdgeId e : arcs.path) {
        path_vertices.insert(g.edge(e).u);
        path_vertices.insert(g.edge(e).v);
    }
    CHECK(path_vertices.contains(2));
    for (const auto& cycle : arcs.cycles)
        for (EdgeId e : cycle) {
            CHECK_FALSE(path_vertices.contains(g.edge(e).u));
            CHECK_FALSE(path_vertices.contains(g.edge(e).v));
        }
}

TEST_CASE("disconnected endpoints give an empty model") {
    WeightedMultigraph g;
    g.add_edge({1, 1, 2, 5});
    CHECK(build_relaxed_longest_path(g, 1, 2, 1).num_variables() == 0);
    auto engine = make_backend();
    CHECK(solve_exact_longest_path(g, 1, 2, 1, *engine).value == 0);
}

TEST_CASE("strategies on the worked example") {
    auto engine = make_backend();
    const PowerNetwork net = twelve_vertex_network();
    const BigMSet bn = compute_bn(net);
    const BigMSet sr = compute_sr(net, *engine);
    const BigMSet lp = compute_lp(net, *engine);
    CHECK(bn.value(1) == 323);
    CHECK(sr.value(1) == 110);
    CHECK(lp.value(1) == 103);
    for (LineId l : {10, 15, 16}) {
        CHECK(sr.value(l) == 0);
        CHECK(lp.value(l) == 0);
        CHECK(bn.value(l) > 0);
    }
    CHECK(sr.covers(net));
    CHECK(lp.all_proven());
    CHECK(sr.provenance == "SR");

    const LambdaReport lam_sr = compare_lambda(sr, lp);
    const LambdaReport lam_bn = compare_lambda(bn, lp);
    CHECK(lam_sr.ratios.at(1) == doctest::Approx(110.0 / 103.0));
    CHECK(lam_bn.ratios.at(1) == doctest::Approx(323.0 / 103.0));
    CHECK(lam_sr.min >= 1.0);
    CHECK(lam_sr.max <= lam_bn.max);
    CHECK_THROWS(compare_lambda(lp, bn));  // LP is zero where BN is not
}

TEST_CASE("shortest-path bounds fall back when a line's endpoints split") {
    const PowerNetwork net = twelve_vertex_network();
    const BigMSet bn = compute_bn(net);
    std::set<LineId> tree;
    for (EdgeId e : minimum_spanning_tree(to_multigraph(net))) tree.insert(e);
    const BigMSet sp = compute_sp(net, tree, bn);
    const WeightedMultigraph t = to_multigraph(net).edge_subgraph(tree);
    for (const Line& l : net.lines()) {
        if (tree.contains(l.id)) {
            CHECK(sp.value(l.id) == bn.value(l.id));
        } else {
            CHECK(sp.value(l.id) == doctest::Approx(shortest_path_weight(t, l.from_bus, l.to_bus)));
        }
    }
    std::set<LineId> partial{1, 2};
    CHECK_THROWS(compute_sp(net, partial, bn));
}

TEST_CASE("scaling and CSV round trip") {
    const PowerNetwork net = twelve_vertex_network();
    const BigMSet bn = compute_bn(net);
    const BigMSet up = scale(bn, 35);
    CHECK(up.value(1) == doctest::Approx(323 * 1.35));
    CHECK(up.provenance == "BN+35%");
    CHECK_THROWS(scale(bn, -1));
    const BigMSet back = parse_bigm_csv(write_bigm_csv(up));
    CHECK(back.entries == up.entries);
    CHECK(back.strategy == up.strategy);
    CHECK_THROWS(parse_bigm_csv("line,value\n1,2\n"));
    CHECK(parse_strategy("lp") == BigMStrategy::LP);
    CHECK_THROWS(parse_strategy("zz"));
}

TEST_CASE("property: bound ordering and the zero set on random graphs") {
    auto engine = make_backend();
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 200; ++i) {
        const WeightedMultigraph g = random_multigraph(rng, 9, 14);
        CAPTURE(dump_edge_list(g));
        const PowerNetwork net = network_from_graph(g);
        const BigMSet bn = compute_bn(net);
        const BigMSet sr = compute_sr(net, *engine);
        const BigMSet lp = compute_lp(net, *engine);
        const PruneResult pr = prune_leaf_edges(g);
        std::set<LineId> zero = bridges_by_removal(net);
        zero.insert(pr.removed.begin(), pr.removed.end());
        for (const Edge& e : g.edges()) {
            const double oracle = longest_simple_path_bruteforce(g, e.u, e.v, e.id);
            CHECK(lp.value(e.id) == oracle);
            CHECK(lp.value(e.id) <= sr.value(e.id) * (1 + 1e-9));
            CHECK(sr.value(e.id) <= bn.value(e.id) * (1 + 1e-9));
            CHECK((sr.value(e.id) == 0) == zero.contains(e.id));
            CHECK((lp.value(e.id) == 0) == zero.contains(e.id));
        }
    }
}

TEST_CASE("property: scaled sets dominate their base") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 50; ++i) {
        const PowerNetwork net = network_from_graph(random_multigraph(rng, 8, 12));
        const BigMSet bn = compute_bn(net);
        const double pct = 5.0 * (i % 9);
        const BigMSet up = scale(bn, pct);
        for (const auto& [l, e] : bn.entries) CHECK(up.value(l) == doctest::Approx(e.value * (1 + pct / 100)));
    }
}
