#include "ots/bigm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "ots/longest_path.hpp"
#include "ots/text_util.hpp"

namespace ots {

std::string to_string(BigMStrategy s) {
    switch (s) {
        case BigMStrategy::BN: return "BN";
        case BigMStrategy::SR: return "SR";
        case BigMStrategy::LP: return "LP";
        case BigMStrategy::SP: return "SP";
        case BigMStrategy::Scaled: return "SCALED";
    }
    return "BN";
}

BigMStrategy parse_strategy(std::string_view text) {
    std::string t(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::toupper(c); });
    if (t == "BN") return BigMStrategy::BN;
    if (t == "SR") return BigMStrategy::SR;
    if (t == "LP") return BigMStrategy::LP;
    if (t == "SP") return BigMStrategy::SP;
    if (t == "SCALED") return BigMStrategy::Scaled;
    throw std::invalid_argument("unknown big-M strategy '" + std::string(text) + "'");
}

double BigMSet::value(LineId line) const {
    auto it = entries.find(line);
    if (it == entries.end()) throw std::invalid_argument("no big-M value for line " + std::to_string(line));
    return it->second.value;
}

double BigMSet::total_compute_time() const {
    double t = 0.0;
    for (const auto& [l, e] : entries) t += e.compute_time_s;
    return t;
}

bool BigMSet::all_proven() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto& kv) { return kv.second.proven_optimal; });
}

bool BigMSet::covers(const PowerNetwork& network) const {
    return std::all_of(network.lines().begin(), network.lines().end(),
                       [&](const Line& l) { return entries.contains(l.id); });
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// Shared pruning + block split for SR and LP; `bound` gets the block, the
// endpoints and the excluded edge and returns (value in radians, proven).
template <typename Bound>
BigMSet decomposed_bounds(const PowerNetwork& network, BigMStrategy strategy, Bound bound) {
    BigMSet out{strategy, to_string(strategy), {}};
    const auto setup_start = Clock::now();
    const WeightedMultigraph g = to_multigraph(network);
    PruneResult pr = prune_leaf_edges(g);
    std::optional<Decomposition> dec;
    if (pr.pruned.num_edges() > 0) dec = split_at_cut_vertices(pr.pruned);
    // graph work is shared; spread it evenly over the lines
    const double setup = seconds_since(setup_start) / static_cast<double>(std::max<std::size_t>(1, g.num_edges()));

    for (EdgeId id : pr.removed) out.entries[id] = {0.0, setup, true};
    for (const Line& l : network.lines()) {
        if (out.entries.contains(l.id)) continue;
        const auto t0 = Clock::now();
        const WeightedMultigraph& block = dec->blocks[dec->edge_to_block.at(l.id)];
        auto [radians, proven] = bound(block, l.from_bus, l.to_bus, l.id, l.id);
        out.entries[l.id] = {l.susceptance * radians, setup + seconds_since(t0), proven};
    }
    return out;
}

}  // namespace

BigMSet compute_bn(const PowerNetwork& network) {
    BigMSet out{BigMStrategy::BN, "BN", {}};
    const WeightedMultigraph g = to_multigraph(network);
    const std::size_t k = network.buses().size() - 1;
    for (const Line& l : network.lines()) {
        const auto t0 = Clock::now();
        double w = top_k_weight_sum(g, k, l.id);
        out.entries[l.id] = {l.susceptance * w, seconds_since(t0), true};
    }
    return out;
}

BigMSet compute_sr(const PowerNetwork& network, SolverBackend& backend) {
    return decomposed_bounds(network, BigMStrategy::SR,
                             [&](const WeightedMultigraph& block, VertexId s, VertexId t, EdgeId excluded, LineId line) {
                                 try {
                                     auto r = solve_relaxed_longest_path(block, s, t, excluded, backend);
                                     return std::pair{r.value, r.proven_optimal};
                                 } catch (const std::exception& e) {
                                     throw std::runtime_error("SR bound for line " + std::to_string(line) + ": " +
                                                              e.what());
                                 }
                             });
}

BigMSet compute_lp(const PowerNetwork& network, SolverBackend& backend, double per_line_time_limit) {
    return decomposed_bounds(network, BigMStrategy::LP,
                             [&](const WeightedMultigraph& block, VertexId s, VertexId t, EdgeId excluded, LineId line) {
                                 try {
                                     auto r = solve_exact_longest_path(block, s, t, excluded, backend,
                                                                       per_line_time_limit);
                                     return std::pair{r.value, r.proven_optimal};
                                 } catch (const std::exception& e) {
                                     throw std::runtime_error("LP bound for line " + std::to_string(line) + ": " +
                                                              e.what());
                                 }
                             });
}

BigMSet compute_sp(const PowerNetwork& network, const std::set<LineId>& active_lines, const BigMSet& fallback) {
    if (!lines_connect_all_buses(network, active_lines))
        throw std::invalid_argument("active lines do not connect every bus");
    BigMSet out{BigMStrategy::SP, "SP", {}};
    WeightedMultigraph g;
    for (const Bus& b : network.buses()) g.add_vertex(b.id);
    for (const Line& l : network.lines())
        if (active_lines.contains(l.id)) g.add_edge({l.id, l.from_bus, l.to_bus, l.capacity / l.susceptance});
    for (const Line& l : network.lines()) {
        const auto t0 = Clock::now();
        double w = shortest_path_weight(g, l.from_bus, l.to_bus, l.id);
        double value = w == kInfinity ? fallback.value(l.id) : l.susceptance * w;
        out.entries[l.id] = {value, seconds_since(t0), true};
    }
    return out;
}

BigMSet scale(const BigMSet& set, double pct) {
    if (!(pct >= 0.0)) throw std::invalid_argument("scale percentage must be nonnegative");
    BigMSet out = set;
    out.strategy = BigMStrategy::Scaled;
    out.provenance = set.provenance + "+" + format_double(pct) + "%";
    for (auto& [l, e] : out.entries) e.value *= 1.0 + pct / 100.0;
    return out;
}

LambdaReport compare_lambda(const BigMSet& candidate, const BigMSet& reference, bool require_proven) {
    if (candidate.entries.size() != reference.entries.size())
        throw std::invalid_argument("big-M sets cover different lines");
    if (require_proven && !reference.all_proven())
        throw std::invalid_argument("reference big-M set is not proven optimal");
    LambdaReport r;
    double sum = 0.0;
    r.min = std::numeric_limits<double>::infinity();
    r.max = -std::numeric_limits<double>::infinity();
    for (const auto& [l, ref] : reference.entries) {
        auto it = candidate.entries.find(l);
        if (it == candidate.entries.end()) throw std::invalid_argument("big-M sets cover different lines");
        if (ref.value == 0.0) continue;
        if (it->second.value == 0.0)
            throw std::invalid_argument("line " + std::to_string(l) + " has a zero candidate but a nonzero reference");
        double ratio = it->second.value / ref.value;
        r.ratios[l] = ratio;
        sum += ratio;
        r.min = std::min(r.min, ratio);
        r.max = std::max(r.max, ratio);
    }
    if (r.ratios.empty()) {
        r.min = r.max = r.avg = 1.0;
    } else {
        r.avg = sum / static_cast<double>(r.ratios.size());
    }
    return r;
}

std::string write_bigm_csv(const BigMSet& set) {
    std::string out = "line_id,strategy,value_mw,compute_time_s,proven_optimal\n";
    for (const auto& [l, e] : set.entries)
        out += std::to_string(l) + "," + set.provenance + "," + format_double(e.value) + "," +
               format_double(e.compute_time_s) + "," + (e.proven_optimal ? "1" : "0") + "\n";
    return out;
}

BigMSet parse_bigm_csv(std::string_view text) {
    BigMSet set;
    auto lines = split_lines(text);
    if (lines.empty() || trim(lines[0]) != "line_id,strategy,value_mw,compute_time_s,proven_optimal")
        throw std::invalid_argument("big-M CSV has an unexpected header");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto f = split(lines[i], ',');
        if (f.size() != 5) throw std::invalid_argument("big-M CSV line " + std::to_string(i + 1) + ": expected 5 fields");
        set.provenance = f[1];
        auto plus = f[1].find('+');
        set.strategy = plus == std::string::npos ? parse_strategy(f[1]) : BigMStrategy::Scaled;
        set.entries[parse_int(f[0])] = {parse_double(f[2]), parse_double(f[3]), f[4] == "1"};
    }
    return set;
}

}  // namespace ots
