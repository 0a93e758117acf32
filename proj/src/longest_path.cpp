#include "ots/longest_path.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace ots {

namespace {

std::string y_name(EdgeId e) { return "y_" + std::to_string(e); }
std::string z_name(EdgeId e) { return "z_" + std::to_string(e); }

}  // namespace

MilpModel build_relaxed_longest_path(const WeightedMultigraph& g, VertexId source, VertexId sink,
                                     std::optional<EdgeId> excluded) {
    if (source == sink) throw GraphError("source and sink must differ");
    if (!g.has_vertex(source) || !g.has_vertex(sink)) throw GraphError("source or sink not in graph");

    MilpModel m;
    m.set_objective(ObjSense::Maximize, {});
    if (shortest_path_weight(g, source, sink, excluded) == kInfinity) return m;

    std::vector<Term> objective;
    std::map<EdgeId, std::pair<int, int>> arc;
    for (const Edge& e : g.edges()) {
        if (excluded && e.id == *excluded) continue;
        int y = m.add_variable(y_name(e.id), VarKind::Binary, 0.0, 1.0);
        int z = m.add_variable(z_name(e.id), VarKind::Binary, 0.0, 1.0);
        arc[e.id] = {y, z};
        objective.push_back({y, e.weight});
        objective.push_back({z, e.weight});
    }
    m.set_objective(ObjSense::Maximize, objective);

    for (VertexId v : g.vertices()) {
        std::vector<Term> balance;  // out - in = beta
        std::vector<Term> out;
        for (EdgeId id : g.incident(v)) {
            auto it = arc.find(id);
            if (it == arc.end()) continue;
            const Edge& e = g.edge(id);
            auto [y, z] = it->second;
            int out_var = e.u == v ? y : z;
            int in_var = e.u == v ? z : y;
            balance.push_back({out_var, 1.0});
            balance.push_back({in_var, -1.0});
            out.push_back({out_var, 1.0});
        }
        if (balance.empty()) continue;
        double beta = v == source ? 1.0 : v == sink ? -1.0 : 0.0;
        m.add_constraint("flow_" + std::to_string(v), balance, Sense::Equal, beta);
        m.add_constraint("out_" + std::to_string(v), out, v == sink ? Sense::Equal : Sense::LessEqual,
                         v == sink ? 0.0 : 1.0);
    }
    for (const auto& [id, vars] : arc)
        m.add_constraint("pair_" + std::to_string(id), {{vars.first, 1.0}, {vars.second, 1.0}}, Sense::LessEqual, 1.0);
    return m;
}

ArcDecomposition decode_arcs(const WeightedMultigraph& g, VertexId source, VertexId sink, const MilpModel& model,
                             const std::vector<double>& values) {
    ArcDecomposition out;
    std::map<VertexId, std::pair<EdgeId, VertexId>> next;  // vertex -> (edge, head)
    for (const Edge& e : g.edges()) {
        if (!model.has_variable(y_name(e.id))) continue;
        bool fwd = values[static_cast<std::size_t>(model.variable_index(y_name(e.id)))] > 0.5;
        bool rev = values[static_cast<std::size_t>(model.variable_index(z_name(e.id)))] > 0.5;
        if (!fwd && !rev) continue;
        out.weight += e.weight;
        if (fwd) next[e.u] = {e.id, e.v};
        if (rev) next[e.v] = {e.id, e.u};
    }
    std::set<VertexId> seen;
    VertexId v = source;
    while (v != sink) {
        auto it = next.find(v);
        if (it == next.end() || !seen.insert(v).second) break;
        out.path.push_back(it->second.first);
        v = it->second.second;
    }
    seen.insert(sink);
    for (const auto& [start, step] : next) {
        if (seen.contains(start)) continue;
        std::vector<EdgeId> cycle;
        VertexId w = start;
        while (!seen.contains(w)) {
            seen.insert(w);
            auto it = next.find(w);
            if (it == next.end()) break;
            cycle.push_back(it->second.first);
            w = it->second.second;
        }
        if (!cycle.empty()) out.cycles.push_back(std::move(cycle));
    }
    return out;
}

void add_subtour_cut(MilpModel& model, const WeightedMultigraph& g, const std::vector<EdgeId>& cycle) {
    std::set<VertexId> s;
    for (EdgeId id : cycle) {
        s.insert(g.edge(id).u);
        s.insert(g.edge(id).v);
    }
    std::vector<Term> terms;
    for (const Edge& e : g.edges()) {
        if (!s.contains(e.u) || !s.contains(e.v) || !model.has_variable(y_name(e.id))) continue;
        terms.push_back({model.variable_index(y_name(e.id)), 1.0});
        terms.push_back({model.variable_index(z_name(e.id)), 1.0});
    }
    // the row count only grows, so this name is unused
    model.add_constraint("cut_" + std::to_string(model.constraints().size()), terms, Sense::LessEqual,
                         static_cast<double>(s.size()) - 1.0);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

SolveRequest exact_request(double time_limit) {
    SolveRequest req;
    req.time_limit = time_limit;
    req.rel_gap_target = 0.0;
    return req;
}

// Value of an optimal round: the selected weight, unless the engine's bound
// disagrees beyond its tolerances (then the bound, which is always valid).
double round_value(const SolveOutcome& out, double selected_weight) {
    double bound = out.best_bound;
    if (std::abs(bound - selected_weight) <= 1e-6 * std::max(1.0, std::abs(selected_weight))) return selected_weight;
    return std::max(bound, selected_weight);
}

}  // namespace

LongestPathResult solve_relaxed_longest_path(const WeightedMultigraph& g, VertexId source, VertexId sink,
                                             std::optional<EdgeId> excluded, SolverBackend& backend,
                                             double time_limit) {
    MilpModel m = build_relaxed_longest_path(g, source, sink, excluded);
    LongestPathResult res;
    if (m.num_variables() == 0) {
        res.proven_optimal = true;
        return res;
    }
    SolveOutcome out = backend.solve(m, exact_request(time_limit));
    if (out.status == SolveStatus::Optimal) {
        ArcDecomposition d = decode_arcs(g, source, sink, m, out.best().values);
        res.value = round_value(out, d.weight);
        res.proven_optimal = true;
        res.path = d.path;
    } else if (out.status == SolveStatus::FeasibleTimeLimit || out.status == SolveStatus::TimeLimitNoSolution) {
        if (!std::isfinite(out.best_bound)) throw std::runtime_error("longest-path solve produced no bound");
        res.value = out.best_bound;
    } else {
        throw std::runtime_error("longest-path solve failed: " + to_string(out.status) + " " + out.message);
    }
    return res;
}

LongestPathResult solve_exact_longest_path(const WeightedMultigraph& g, VertexId source, VertexId sink,
                                           std::optional<EdgeId> excluded, SolverBackend& backend,
                                           double time_limit) {
    const auto start = Clock::now();
    MilpModel m = build_relaxed_longest_path(g, source, sink, excluded);
    LongestPathResult res;
    if (m.num_variables() == 0) {
        res.proven_optimal = true;
        return res;
    }
    double upper = kInfinity;  // every round's optimum bounds the longest path
    while (true) {
        double left = time_limit - seconds_since(start);
        if (left <= 0.0) {
            res.value = upper;
            return res;
        }
        SolveOutcome out = backend.solve(m, exact_request(left));
        if (out.status == SolveStatus::FeasibleTimeLimit || out.status == SolveStatus::TimeLimitNoSolution) {
            if (std::isfinite(out.best_bound)) upper = std::min(upper, out.best_bound);
            if (!std::isfinite(upper)) throw std::runtime_error("longest-path solve produced no bound");
            res.value = upper;
            return res;
        }
        if (out.status != SolveStatus::Optimal)
            throw std::runtime_error("longest-path solve failed: " + to_string(out.status) + " " + out.message);
        ArcDecomposition d = decode_arcs(g, source, sink, m, out.best().values);
        double value = round_value(out, d.weight);
        if (d.cycles.empty()) {
            res.value = value;
            res.proven_optimal = true;
            res.path = d.path;
            return res;
        }
        upper = std::min(upper, value);
        for (const auto& cycle : d.cycles) add_subtour_cut(m, g, cycle);
        ++res.rounds;
    }
}

}  // namespace ots
