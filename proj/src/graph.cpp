#include "ots/graph.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <numeric>
#include <queue>
#include <sstream>

#include "ots/text_util.hpp"

namespace ots {

WeightedMultigraph::WeightedMultigraph(std::vector<VertexId> vertices, std::vector<Edge> edges) {
    for (VertexId v : vertices) add_vertex(v);
    for (const Edge& e : edges) add_edge(e);
}

void WeightedMultigraph::add_vertex(VertexId v) {
    if (adjacency_.contains(v)) return;
    adjacency_.emplace(v, std::vector<EdgeId>{});
    vertices_.insert(std::upper_bound(vertices_.begin(), vertices_.end(), v), v);
}

void WeightedMultigraph::add_edge(const Edge& e) {
    if (e.u == e.v) throw GraphError("edge " + std::to_string(e.id) + " is a self-loop");
    if (!(e.weight >= 0.0)) throw GraphError("edge " + std::to_string(e.id) + " has negative weight");
    if (edge_pos_.contains(e.id)) throw GraphError("duplicate edge id " + std::to_string(e.id));
    add_vertex(e.u);
    add_vertex(e.v);
    edge_pos_.emplace(e.id, edges_.size());
    edges_.push_back(e);
    adjacency_[e.u].push_back(e.id);
    adjacency_[e.v].push_back(e.id);
}

const Edge& WeightedMultigraph::edge(EdgeId id) const {
    auto it = edge_pos_.find(id);
    if (it == edge_pos_.end()) throw GraphError("unknown edge id " + std::to_string(id));
    return edges_[it->second];
}

const std::vector<EdgeId>& WeightedMultigraph::incident(VertexId v) const {
    auto it = adjacency_.find(v);
    if (it == adjacency_.end()) throw GraphError("unknown vertex id " + std::to_string(v));
    return it->second;
}

WeightedMultigraph WeightedMultigraph::without_edges(const std::set<EdgeId>& removed) const {
    WeightedMultigraph out;
    for (VertexId v : vertices_) out.add_vertex(v);
    for (const Edge& e : edges_)
        if (!removed.contains(e.id)) out.add_edge(e);
    return out;
}

WeightedMultigraph WeightedMultigraph::edge_subgraph(const std::set<EdgeId>& kept) const {
    WeightedMultigraph out;
    for (const Edge& e : edges_)
        if (kept.contains(e.id)) out.add_edge(e);
    return out;
}

bool WeightedMultigraph::is_connected() const {
    if (vertices_.empty()) return true;
    std::set<VertexId> seen{vertices_.front()};
    std::vector<VertexId> stack{vertices_.front()};
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        for (EdgeId id : incident(v)) {
            VertexId w = edge(id).other(v);
            if (seen.insert(w).second) stack.push_back(w);
        }
    }
    return seen.size() == vertices_.size();
}

double WeightedMultigraph::total_weight() const {
    double sum = 0.0;
    for (const Edge& e : edges_) sum += e.weight;
    return sum;
}

PruneResult prune_leaf_edges(const WeightedMultigraph& g) {
    std::map<VertexId, std::size_t> degree;
    for (VertexId v : g.vertices()) degree[v] = g.degree(v);
    std::set<EdgeId> removed_set;
    std::vector<EdgeId> removed;

    std::vector<VertexId> leaves;
    for (auto [v, d] : degree)
        if (d == 1) leaves.push_back(v);
    while (!leaves.empty()) {
        VertexId v = leaves.back();
        leaves.pop_back();
        if (degree[v] != 1) continue;
        for (EdgeId id : g.incident(v)) {
            if (removed_set.contains(id)) continue;
            removed_set.insert(id);
            removed.push_back(id);
            VertexId w = g.edge(id).other(v);
            degree[v] -= 1;
            degree[w] -= 1;
            if (degree[w] == 1) leaves.push_back(w);
            break;
        }
    }
    std::sort(removed.begin(), removed.end());
    return {g.edge_subgraph([&] {
                std::set<EdgeId> kept;
                for (const Edge& e : g.edges())
                    if (!removed_set.contains(e.id)) kept.insert(e.id);
                return kept;
            }()),
            removed};
}

Decomposition split_at_cut_vertices(const WeightedMultigraph& g) {
    if (!g.is_connected()) throw GraphError("split_at_cut_vertices: graph is disconnected");
    Decomposition out;
    if (g.num_edges() == 0) return out;

    std::map<VertexId, int> disc;
    std::map<VertexId, int> low;
    std::vector<EdgeId> edge_stack;
    int timer = 0;

    auto pop_block = [&](EdgeId until) {
        std::set<EdgeId> block_edges;
        while (true) {
            EdgeId id = edge_stack.back();
            edge_stack.pop_back();
            block_edges.insert(id);
            if (id == until) break;
        }
        out.blocks.push_back(g.edge_subgraph(block_edges));
    };

    // Lowpoint DFS keyed on the parent edge so that parallel edges count as
    // back edges.
    std::function<void(VertexId, std::optional<EdgeId>)> dfs = [&](VertexId v,
                                                                  std::optional<EdgeId> parent) {
        disc[v] = low[v] = ++timer;
        for (EdgeId id : g.incident(v)) {
            if (parent && id == *parent) continue;
            VertexId w = g.edge(id).other(v);
            if (!disc.contains(w)) {
                edge_stack.push_back(id);
                dfs(w, id);
                low[v] = std::min(low[v], low[w]);
                if (low[w] >= disc[v]) pop_block(id);
            } else if (disc[w] < disc[v]) {
                // back edge towards an ancestor; seen once, from the descendant side
                edge_stack.push_back(id);
                low[v] = std::min(low[v], disc[w]);
            }
        }
    };
    dfs(g.vertices().front(), std::nullopt);

    std::map<VertexId, int> block_count;
    for (std::size_t b = 0; b < out.blocks.size(); ++b) {
        for (const Edge& e : out.blocks[b].edges()) out.edge_to_block[e.id] = b;
        for (VertexId v : out.blocks[b].vertices()) block_count[v] += 1;
    }
    for (auto [v, count] : block_count)
        if (count > 1) out.cut_vertices.insert(v);
    return out;
}

namespace {

void require_endpoints(const WeightedMultigraph& g, VertexId s, VertexId t) {
    if (!g.has_vertex(s)) throw GraphError("unknown vertex id " + std::to_string(s));
    if (!g.has_vertex(t)) throw GraphError("unknown vertex id " + std::to_string(t));
    if (s == t) throw GraphError("source and target coincide");
}

struct DijkstraResult {
    std::map<VertexId, double> dist;
    std::map<VertexId, EdgeId> via;
};

DijkstraResult dijkstra(const WeightedMultigraph& g, VertexId s, std::optional<EdgeId> excluded) {
    DijkstraResult r;
    using Item = std::pair<double, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    r.dist[s] = 0.0;
    queue.emplace(0.0, s);
    while (!queue.empty()) {
        auto [d, v] = queue.top();
        queue.pop();
        if (d > r.dist[v]) continue;
        for (EdgeId id : g.incident(v)) {
            if (excluded && id == *excluded) continue;
            const Edge& e = g.edge(id);
            VertexId w = e.other(v);
            double nd = d + e.weight;
            auto it = r.dist.find(w);
            if (it == r.dist.end() || nd < it->second) {
                r.dist[w] = nd;
                r.via[w] = id;
                queue.emplace(nd, w);
            }
        }
    }
    return r;
}

}  // namespace

double shortest_path_weight(const WeightedMultigraph& g, VertexId s, VertexId t,
                            std::optional<EdgeId> excluded) {
    require_endpoints(g, s, t);
    auto r = dijkstra(g, s, excluded);
    auto it = r.dist.find(t);
    return it == r.dist.end() ? kInfinity : it->second;
}

std::vector<EdgeId> shortest_path_edges(const WeightedMultigraph& g, VertexId s, VertexId t,
                                        std::optional<EdgeId> excluded) {
    require_endpoints(g, s, t);
    auto r = dijkstra(g, s, excluded);
    if (!r.dist.contains(t)) return {};
    std::vector<EdgeId> path;
    for (VertexId v = t; v != s;) {
        EdgeId id = r.via.at(v);
        path.push_back(id);
        v = g.edge(id).other(v);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

double longest_simple_path_bruteforce(const WeightedMultigraph& g, VertexId s, VertexId t,
                                      std::optional<EdgeId> excluded, std::size_t budget) {
    require_endpoints(g, s, t);
    if (g.num_vertices() > budget)
        throw GraphError("longest_simple_path_bruteforce: " + std::to_string(g.num_vertices()) +
                         " vertices exceed the budget of " + std::to_string(budget));
    std::set<VertexId> visited{s};
    double best = 0.0;
    std::function<void(VertexId, double)> walk = [&](VertexId v, double length) {
        for (EdgeId id : g.incident(v)) {
            if (excluded && id == *excluded) continue;
            const Edge& e = g.edge(id);
            VertexId w = e.other(v);
            if (visited.contains(w)) continue;
            if (w == t) {
                best = std::max(best, length + e.weight);
                continue;
            }
            visited.insert(w);
            walk(w, length + e.weight);
            visited.erase(w);
        }
    };
    walk(s, 0.0);
    return best;
}

double greedy_bound_moulin(const WeightedMultigraph& g, VertexId s, VertexId t,
                           const std::vector<VertexId>& ordering) {
    require_endpoints(g, s, t);
    std::vector<VertexId> sorted = ordering;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != g.vertices()) throw GraphError("greedy_bound_moulin: ordering is not a permutation of the vertices");

    std::set<EdgeId> assigned;
    double total = 0.0;
    for (VertexId v : ordering) {
        std::optional<EdgeId> pick;
        for (EdgeId id : g.incident(v)) {
            if (assigned.contains(id)) continue;
            if (!pick || g.edge(id).weight > g.edge(*pick).weight) pick = id;
        }
        if (pick) {
            assigned.insert(*pick);
            total += g.edge(*pick).weight;
        }
    }
    return total;
}

double top_k_weight_sum(const WeightedMultigraph& g, std::size_t k, std::optional<EdgeId> excluded) {
    std::vector<double> weights;
    weights.reserve(g.num_edges());
    for (const Edge& e : g.edges())
        if (!excluded || e.id != *excluded) weights.push_back(e.weight);
    std::sort(weights.begin(), weights.end(), std::greater<>());
    if (weights.size() > k) weights.resize(k);
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

std::vector<EdgeId> minimum_spanning_tree(const WeightedMultigraph& g) {
    std::vector<Edge> order = g.edges();
    std::sort(order.begin(), order.end(), [](const Edge& a, const Edge& b) {
        return a.weight != b.weight ? a.weight < b.weight : a.id < b.id;
    });
    std::map<VertexId, VertexId> parent;
    for (VertexId v : g.vertices()) parent[v] = v;
    std::function<VertexId(VertexId)> find = [&](VertexId v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    std::vector<EdgeId> tree;
    for (const Edge& e : order) {
        VertexId a = find(e.u);
        VertexId b = find(e.v);
        if (a == b) continue;
        parent[a] = b;
        tree.push_back(e.id);
    }
    std::sort(tree.begin(), tree.end());
    return tree;
}

std::string dump_edge_list(const WeightedMultigraph& g) {
    std::string out = "edge_id,u,v,weight\n";
    for (const Edge& e : g.edges()) {
        out += std::to_string(e.id) + "," + std::to_string(e.u) + "," + std::to_string(e.v) + "," +
               format_double(e.weight) + "\n";
    }
    return out;
}

WeightedMultigraph parse_edge_list(std::string_view text) {
    WeightedMultigraph g;
    std::size_t line_no = 0;
    for (const std::string& raw : split_lines(text)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (line_no == 1 && line == "edge_id,u,v,weight") continue;
        auto fields = split(line, ',');
        if (fields.size() != 4)
            throw GraphError("edge list line " + std::to_string(line_no) + ": expected 4 fields");
        try {
            g.add_edge({parse_int(fields[0]), parse_int(fields[1]), parse_int(fields[2]),
                        parse_double(fields[3])});
        } catch (const std::invalid_argument& err) {
            throw GraphError("edge list line " + std::to_string(line_no) + ": " + err.what());
        }
    }
    return g;
}

}  // namespace ots
