#ifndef OTS_GRAPH_HPP
#define OTS_GRAPH_HPP

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ots {

using VertexId = int;
using EdgeId = int;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Edge {
    EdgeId id;
    VertexId u;
    VertexId v;
    double weight;

    [[nodiscard]] VertexId other(VertexId w) const { return w == u ? v : u; }
    bool operator==(const Edge&) const = default;
};

class GraphError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Undirected multigraph with nonnegative edge weights. Parallel edges are
/// distinct objects with their own ids; self-loops are rejected.
class WeightedMultigraph {
public:
    WeightedMultigraph() = default;
    WeightedMultigraph(std::vector<VertexId> vertices, std::vector<Edge> edges);

    void add_vertex(VertexId v);
    /// Endpoints are added as vertices when missing.
    void add_edge(const Edge& e);

    [[nodiscard]] const std::vector<VertexId>& vertices() const { return vertices_; }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] std::size_t num_vertices() const { return vertices_.size(); }
    [[nodiscard]] std::size_t num_edges() const { return edges_.size(); }

    [[nodiscard]] bool has_vertex(VertexId v) const { return adjacency_.contains(v); }
    [[nodiscard]] bool has_edge(EdgeId id) const { return edge_pos_.contains(id); }
    [[nodiscard]] const Edge& edge(EdgeId id) const;

    /// Ids of the edges incident to `v`, in insertion order.
    [[nodiscard]] const std::vector<EdgeId>& incident(VertexId v) const;
    /// Number of incident edges (parallel edges counted separately).
    [[nodiscard]] std::size_t degree(VertexId v) const { return incident(v).size(); }

    [[nodiscard]] WeightedMultigraph without_edges(const std::set<EdgeId>& removed) const;
    /// Subgraph induced by an edge subset; vertices are the endpoints.
    [[nodiscard]] WeightedMultigraph edge_subgraph(const std::set<EdgeId>& kept) const;

    [[nodiscard]] bool is_connected() const;
    [[nodiscard]] double total_weight() const;

    bool operator==(const WeightedMultigraph& other) const {
        return vertices_ == other.vertices_ && edges_ == other.edges_;
    }

private:
    std::vector<VertexId> vertices_;  // sorted
    std::vector<Edge> edges_;
    std::map<VertexId, std::vector<EdgeId>> adjacency_;
    std::map<EdgeId, std::size_t> edge_pos_;
};

struct PruneResult {
    WeightedMultigraph pruned;
    std::vector<EdgeId> removed;
};

/// Repeatedly deletes edges incident to a vertex of degree one until none
/// remain. Vertices left without edges are dropped from `pruned`.
PruneResult prune_leaf_edges(const WeightedMultigraph& g);

struct Decomposition {
    std::vector<WeightedMultigraph> blocks;
    std::set<VertexId> cut_vertices;
    std::map<EdgeId, std::size_t> edge_to_block;
};

/// Biconnected components (a bridge is a two-vertex block). Throws GraphError
/// for a disconnected graph.
Decomposition split_at_cut_vertices(const WeightedMultigraph& g);

/// Dijkstra. Returns kInfinity when t is unreachable from s.
double shortest_path_weight(const WeightedMultigraph& g, VertexId s, VertexId t,
                            std::optional<EdgeId> excluded = std::nullopt);

/// Edge ids of a minimum-weight s-t path, empty when unreachable.
std::vector<EdgeId> shortest_path_edges(const WeightedMultigraph& g, VertexId s, VertexId t,
                                        std::optional<EdgeId> excluded = std::nullopt);

inline constexpr std::size_t kBruteForceVertexBudget = 14;

/// Exhaustive longest simple s-t path. Exponential; refuses graphs with more
/// than `budget` vertices. Returns 0 when no path exists.
double longest_simple_path_bruteforce(const WeightedMultigraph& g, VertexId s, VertexId t,
                                      std::optional<EdgeId> excluded = std::nullopt,
                                      std::size_t budget = kBruteForceVertexBudget);

/// Greedy vertex-ordering heuristic for the longest path: each vertex in turn
/// takes its heaviest incident edge that no earlier vertex has taken. This is
/// NOT a valid upper bound on the longest path (see tests for a counterexample).
double greedy_bound_moulin(const WeightedMultigraph& g, VertexId s, VertexId t,
                           const std::vector<VertexId>& ordering);

/// Sum of the k heaviest edge weights, ignoring `excluded`.
double top_k_weight_sum(const WeightedMultigraph& g, std::size_t k,
                        std::optional<EdgeId> excluded = std::nullopt);

/// Kruskal; ties broken by edge id. Returns the tree's edge ids (sorted).
std::vector<EdgeId> minimum_spanning_tree(const WeightedMultigraph& g);

/// Text dump, one `edge_id,u,v,weight` row per edge after a header row.
std::string dump_edge_list(const WeightedMultigraph& g);
WeightedMultigraph parse_edge_list(std::string_view text);

}  // namespace ots

#endif  // OTS_GRAPH_HPP
