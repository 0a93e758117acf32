#include <doctest.h>

#include <numeric>

#include "fixtures.hpp"
#include "ots/graph.hpp"

using namespace ots;
using namespace ots::testing;

namespace {

std::set<EdgeId> edge_ids(const WeightedMultigraph& g) {
    std::set<EdgeId> ids;
    for (const Edge& e : g.edges()) ids.insert(e.id);
    return ids;
}

// Independent connectivity check by repeated relaxation.
bool connected_by_closure(const WeightedMultigraph& g) {
    if (g.num_vertices() == 0) return true;
    std::set<VertexId> seen{g.vertices().front()};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const Edge& e : g.edges())
            if (seen.contains(e.u) != seen.contains(e.v)) {
                seen.insert(e.u);
                seen.insert(e.v);
                grew = true;
            }
    }
    return seen.size() == g.num_vertices();
}

}  // namespace

TEST_CASE("multigraph keeps parallel edges and rejects self-loops") {
    WeightedMultigraph g;
    g.add_edge({1, 1, 2, 3.0});
    g.add_edge({2, 2, 1, 4.0});
    CHECK(g.num_edges() == 2);
    CHECK(g.degree(1) == 2);
    CHECK_THROWS_AS(g.add_edge({3, 2, 2, 1.0}), GraphError);
    CHECK_THROWS_AS(g.add_edge({1, 1, 3, 1.0}), GraphError);
    CHECK_THROWS_AS(g.add_edge({4, 1, 3, -1.0}), GraphError);
}

TEST_CASE("longest path beats the greedy ordering heuristic on the five-vertex example") {
    const WeightedMultigraph g = five_vertex_graph();
    CHECK(longest_simple_path_bruteforce(g, 4, 5) == 162);
    CHECK(greedy_bound_moulin(g, 4, 5, {1, 2, 3, 4, 5}) == 142);
    CHECK(shortest_path_weight(g, 4, 5, 1) == 120);
    CHECK(shortest_path_weight(g, 4, 5) == 10);
}

TEST_CASE("leaf pruning removes the chain and the pendant edge") {
    const PruneResult pr = prune_leaf_edges(twelve_vertex_graph());
    CHECK(std::set<EdgeId>(pr.removed.begin(), pr.removed.end()) == std::set<EdgeId>{10, 15, 16});
    CHECK_FALSE(pr.pruned.has_vertex(7));
    CHECK_FALSE(pr.pruned.has_vertex(11));
    CHECK_FALSE(pr.pruned.has_vertex(12));
    CHECK(pr.pruned.num_edges() == 14);
}

TEST_CASE("pruning a tree removes every edge") {
    WeightedMultigraph g;
    g.add_edge({1, 1, 2, 1});
    g.add_edge({2, 2, 3, 1});
    g.add_edge({3, 2, 4, 1});
    const PruneResult pr = prune_leaf_edges(g);
    CHECK(pr.removed.size() == 3);
    CHECK(pr.pruned.num_edges() == 0);
}

TEST_CASE("parallel edges protect a vertex from pruning") {
    WeightedMultigraph g;
    g.add_edge({1, 1, 2, 1});
    g.add_edge({2, 1, 2, 1});
    CHECK(prune_leaf_edges(g).removed.empty());
}

TEST_CASE("cut-vertex split of the pruned example") {
    const Decomposition d = split_at_cut_vertices(prune_leaf_edges(twelve_vertex_graph()).pruned);
    CHECK(d.cut_vertices == std::set<VertexId>{3});
    REQUIRE(d.blocks.size() == 2);
    const auto& left = d.blocks[d.edge_to_block.at(1)];
    const auto& right = d.blocks[d.edge_to_block.at(13)];
    CHECK(edge_ids(left) == std::set<EdgeId>{1, 2, 3, 4, 5, 6, 7, 8, 9});
    CHECK(edge_ids(right) == std::set<EdgeId>{11, 12, 13, 14, 17});
    CHECK(top_k_weight_sum(left, left.num_vertices() - 1, 1) == 127);
}

TEST_CASE("naive bound on the example sums the eleven heaviest other edges") {
    const WeightedMultigraph g = twelve_vertex_graph();
    CHECK(top_k_weight_sum(g, g.num_vertices() - 1, 1) == 323);
}

TEST_CASE("split rejects a disconnected graph") {
    WeightedMultigraph g;
    g.add_edge({1, 1, 2, 1});
    g.add_edge({2, 3, 4, 1});
    CHECK_THROWS_AS(split_at_cut_vertices(g), GraphError);
}

TEST_CASE("brute force refuses graphs over its vertex budget") {
    WeightedMultigraph g;
    for (int v = 2; v <= 16; ++v) g.add_edge({v, v - 1, v, 1});
    CHECK_THROWS(longest_simple_path_bruteforce(g, 1, 16));
    CHECK(longest_simple_path_bruteforce(g, 1, 16, std::nullopt, 16) == 15);
}

TEST_CASE("shortest path edges agree with the weight") {
    const WeightedMultigraph g = twelve_vertex_graph();
    const auto path = shortest_path_edges(g, 1, 9);
    double w = 0;
    for (EdgeId e : path) w += g.edge(e).weight;
    CHECK(w == shortest_path_weight(g, 1, 9));
    CHECK(w == 17 + 16 + 10);
    CHECK(shortest_path_weight(g, 4, 7, 10) == kInfinity);
    CHECK(shortest_path_edges(g, 4, 7, 10).empty());
}

TEST_CASE("minimum spanning tree of the example") {
    const WeightedMultigraph g = twelve_vertex_graph();
    const auto tree = minimum_spanning_tree(g);
    CHECK(tree.size() == g.num_vertices() - 1);
    std::set<EdgeId> kept(tree.begin(), tree.end());
    CHECK(g.edge_subgraph(kept).num_vertices() == g.num_vertices());
    CHECK(g.edge_subgraph(kept).is_connected());
    // Cycle property: no tree path holds an edge heavier than the non-tree edge closing it.
    const WeightedMultigraph t = g.edge_subgraph(kept);
    for (const Edge& e : g.edges()) {
        if (kept.contains(e.id)) continue;
        double heaviest = 0;
        for (EdgeId p : shortest_path_edges(t, e.u, e.v)) heaviest = std::max(heaviest, g.edge(p).weight);
        CHECK(e.weight >= heaviest);
    }
}

TEST_CASE("edge list round trip and errors") {
    const WeightedMultigraph g = twelve_vertex_graph();
    CHECK(parse_edge_list(dump_edge_list(g)) == g);
    CHECK_THROWS(parse_edge_list("edge_id,u,v,weight\n1,1,2\n"));
    CHECK_THROWS(parse_edge_list("edge_id,u,v,weight\n1,1,2,x\n"));
    CHECK_THROWS(parse_edge_list("nope\n"));
}

TEST_CASE("property: pruning and splitting invariants on random multigraphs") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 300; ++i) {
        const WeightedMultigraph g = random_multigraph(rng, 10, 15);
        CAPTURE(dump_edge_list(g));
        REQUIRE(connected_by_closure(g));
        CHECK(g.is_connected());

        const PruneResult pr = prune_leaf_edges(g);
        CHECK(pr.removed.size() + pr.pruned.num_edges() == g.num_edges());
        for (VertexId v : pr.pruned.vertices()) CHECK(pr.pruned.degree(v) >= 2);
        CHECK(connected_by_closure(pr.pruned));
        // A pruned edge never lies on a simple path between its own endpoints.
        for (EdgeId e : pr.removed) {
            const Edge& edge = g.edge(e);
            CHECK(longest_simple_path_bruteforce(g, edge.u, edge.v, e) == 0);
        }
        if (pr.pruned.num_edges() == 0) continue;

        const Decomposition d = split_at_cut_vertices(pr.pruned);
        CHECK(d.edge_to_block.size() == pr.pruned.num_edges());
        std::size_t total = 0;
        for (const auto& b : d.blocks) total += b.num_edges();
        CHECK(total == pr.pruned.num_edges());
        // Cut vertices: removing them disconnects the pruned graph.
        for (VertexId c : pr.pruned.vertices()) {
            std::set<EdgeId> drop;
            for (EdgeId e : pr.pruned.incident(c)) drop.insert(e);
            const WeightedMultigraph rest = pr.pruned.without_edges(drop);
            std::set<EdgeId> keep = edge_ids(rest);
            WeightedMultigraph others = rest.edge_subgraph(keep);
            for (VertexId v : pr.pruned.vertices())
                if (v != c) others.add_vertex(v);
            CHECK(d.cut_vertices.contains(c) == !connected_by_closure(others));
        }
        // The longest path inside an edge's block equals the one in the whole graph.
        for (const Edge& e : pr.pruned.edges()) {
            const auto& block = d.blocks[d.edge_to_block.at(e.id)];
            CHECK(longest_simple_path_bruteforce(block, e.u, e.v, e.id) ==
                  longest_simple_path_bruteforce(g, e.u, e.v, e.id));
        }
    }
}

TEST_CASE("property: the top-k sum bounds every longest path") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const WeightedMultigraph g = random_multigraph(rng, 8, 12);
        for (const Edge& e : g.edges()) {
            const double lp = longest_simple_path_bruteforce(g, e.u, e.v, e.id);
            CHECK(lp <= top_k_weight_sum(g, g.num_vertices() - 1, e.id));
        }
    }
}
