#ifndef OTS_TEST_FIXTURES_HPP
#define OTS_TEST_FIXTURES_HPP

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "ots/graph.hpp"
#include "ots/network.hpp"

namespace ots::testing {

// Five-vertex example: the greedy ordering heuristic undercuts the true longest path.
inline WeightedMultigraph five_vertex_graph() {
    WeightedMultigraph g;
    const std::vector<std::tuple<int, int, int, double>> rows{
        {1, 4, 5, 10}, {2, 5, 2, 50}, {3, 3, 2, 30}, {4, 3, 1, 32}, {5, 4, 1, 50}, {6, 1, 2, 20}};
    for (auto [id, u, v, w] : rows) g.add_edge({id, u, v, w});
    return g;
}

// Twelve-vertex example with a leaf chain, a pendant edge and a cut vertex at 3.
inline const std::vector<std::tuple<int, int, int, double>>& twelve_vertex_rows() {
    static const std::vector<std::tuple<int, int, int, double>> rows{
        {1, 1, 2, 16},  {2, 4, 1, 32},  {3, 3, 1, 17},  {4, 4, 2, 16},  {5, 4, 5, 25},   {6, 4, 6, 25},
        {7, 5, 6, 19},  {8, 3, 5, 17},  {9, 3, 6, 26},  {10, 4, 7, 60}, {11, 3, 10, 16}, {12, 10, 9, 10},
        {13, 8, 9, 35}, {14, 3, 8, 50}, {15, 5, 11, 9}, {16, 11, 12, 12}, {17, 8, 9, 17}};
    return rows;
}

inline WeightedMultigraph twelve_vertex_graph() {
    WeightedMultigraph g;
    for (auto [id, u, v, w] : twelve_vertex_rows()) g.add_edge({id, u, v, w});
    return g;
}

// Same graph as a network with unit susceptance, so F/b equals the edge weight.
inline PowerNetwork twelve_vertex_network() {
    std::vector<Bus> buses;
    for (int b = 1; b <= 12; ++b) buses.push_back({b, 0.0, b == 1});
    std::vector<Line> lines;
    for (auto [id, u, v, w] : twelve_vertex_rows()) lines.push_back({id, u, v, 1.0, w});
    return PowerNetwork(buses, {}, lines);
}

inline PowerNetwork network_from_graph(const WeightedMultigraph& g) {
    std::vector<Bus> buses;
    for (VertexId v : g.vertices()) buses.push_back({v, 0.0, v == g.vertices().front()});
    std::vector<Line> lines;
    for (const Edge& e : g.edges()) lines.push_back({e.id, e.u, e.v, 1.0, e.weight});
    return PowerNetwork(buses, {}, lines);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Connected multigraph: random spanning tree plus extra (possibly parallel)
// edges, integer weights.
inline WeightedMultigraph random_multigraph(std::mt19937_64& rng, int max_vertices, int max_edges) {
    const int n = uniform_int(rng, 2, max_vertices);
    const int m = uniform_int(rng, n - 1, std::max(n - 1, max_edges));
    WeightedMultigraph g;
    int id = 1;
    for (int v = 2; v <= n; ++v) g.add_edge({id++, uniform_int(rng, 1, v - 1), v, double(uniform_int(rng, 1, 60))});
    while (id <= m) {
        int u = uniform_int(rng, 1, n);
        int v = uniform_int(rng, 1, n);
        if (u == v) continue;
        g.add_edge({id++, u, v, double(uniform_int(rng, 1, 60))});
    }
    return g;
}

// Small congested network where every connected topology is dispatchable:
// each bus has an expensive local generator covering its own demand, and a
// few cheap generators compete for tight, unequal-susceptance lines.
inline PowerNetwork random_ots_network(std::mt19937_64& rng, int max_buses, int max_lines) {
    const int n = uniform_int(rng, 3, max_buses);
    const int m = uniform_int(rng, n, std::max(n, max_lines));
    std::vector<Bus> buses;
    for (int b = 1; b <= n; ++b) buses.push_back({b, double(uniform_int(rng, 10, 80)), b == 1});
    std::vector<Generator> gens;
    int gid = 1;
    for (const Bus& b : buses)
        gens.push_back({gid++, b.id, 0.0, b.baseline_demand * 1.2, double(uniform_int(rng, 60, 120))});
    const int cheap = uniform_int(rng, 1, 2);
    for (int k = 0; k < cheap; ++k)
        gens.push_back({gid++, uniform_int(rng, 1, n), 0.0, 400.0, double(uniform_int(rng, 5, 30))});
    std::vector<Line> lines;
    int lid = 1;
    auto add = [&](int u, int v) {
        lines.push_back({lid++, u, v, double(uniform_int(rng, 1, 20)) * 10.0, double(uniform_int(rng, 15, 70))});
    };
    for (int v = 2; v <= n; ++v) add(uniform_int(rng, 1, v - 1), v);
    while (lid <= m) {
        int u = uniform_int(rng, 1, n);
        int v = uniform_int(rng, 1, n);
        if (u != v) add(u, v);
    }
    return PowerNetwork(buses, gens, lines);
}

}  // namespace ots::testing

#endif  // OTS_TEST_FIXTURES_HPP
