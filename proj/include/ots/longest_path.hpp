#ifndef OTS_LONGEST_PATH_HPP
#define OTS_LONGEST_PATH_HPP

#include <optional>
#include <vector>

#include "ots/graph.hpp"
#include "ots/milp_model.hpp"
#include "ots/solver.hpp"

namespace ots {

/// Longest-path ILP without subtour elimination. Per edge e = (u, v): y_e is
/// the arc u->v, z_e the arc v->u. Flow conservation with +1 at the source and
/// -1 at the sink, at most one outgoing arc per vertex, none at the sink. The
/// optimum is a source-sink path plus vertex-disjoint cycles. When the sink is
/// unreachable without `excluded` the model is empty (optimum 0).
MilpModel build_relaxed_longest_path(const WeightedMultigraph& g, VertexId source, VertexId sink,
                                     std::optional<EdgeId> excluded = std::nullopt);

struct ArcDecomposition {
    std::vector<EdgeId> path;                 // source to sink, in order
    std::vector<std::vector<EdgeId>> cycles;  // disjoint from the path
    double weight = 0.0;                      // all selected edges
};

ArcDecomposition decode_arcs(const WeightedMultigraph& g, VertexId source, VertexId sink, const MilpModel& model,
                             const std::vector<double>& values);

/// Forbids the cycle's vertex set S from carrying |S| selected edges:
/// sum over edges inside S of (y + z) <= |S| - 1. Holds for every simple path.
void add_subtour_cut(MilpModel& model, const WeightedMultigraph& g, const std::vector<EdgeId>& cycle);

struct LongestPathResult {
    double value = 0.0;  // upper bound on the longest simple path; exact when proven
    bool proven_optimal = false;
    int rounds = 0;      // cut rounds (exact method)
    std::vector<EdgeId> path;
};

LongestPathResult solve_relaxed_longest_path(const WeightedMultigraph& g, VertexId source, VertexId sink,
                                             std::optional<EdgeId> excluded, SolverBackend& backend,
                                             double time_limit = 60.0);

/// Relaxed model plus subtour cuts, re-solved until the selected arcs form a
/// single simple path.
LongestPathResult solve_exact_longest_path(const WeightedMultigraph& g, VertexId source, VertexId sink,
                                           std::optional<EdgeId> excluded, SolverBackend& backend,
                                           double time_limit = 60.0);

}  // namespace ots

#endif  // OTS_LONGEST_PATH_HPP
