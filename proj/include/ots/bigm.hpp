#ifndef OTS_BIGM_HPP
#define OTS_BIGM_HPP

#include <map>
#include <set>
#include <string>
#include <string_view>

#include "ots/network.hpp"
#include "ots/solver.hpp"

namespace ots {

enum class BigMStrategy { BN, SR, LP, SP, Scaled };

std::string to_string(BigMStrategy s);
BigMStrategy parse_strategy(std::string_view text);

struct BigMEntry {
    double value = 0.0;  // MW
    double compute_time_s = 0.0;
    bool proven_optimal = true;
    bool operator==(const BigMEntry&) const = default;
};

struct BigMSet {
    BigMStrategy strategy = BigMStrategy::BN;
    std::string provenance;  // e.g. "LP+35%"
    std::map<LineId, BigMEntry> entries;

    [[nodiscard]] double value(LineId line) const;
    [[nodiscard]] double total_compute_time() const;
    [[nodiscard]] bool all_proven() const;
    [[nodiscard]] bool covers(const PowerNetwork& network) const;
};

/// b_l times the |N|-1 heaviest other edges of the full multigraph.
BigMSet compute_bn(const PowerNetwork& network);

/// Leaf-pruned lines get 0; every other line gets b_l times the relaxed
/// longest path between its endpoints inside its own block. Lines whose
/// endpoints are disconnected once the line is removed (bridges) also get 0:
/// they can never open.
BigMSet compute_sr(const PowerNetwork& network, SolverBackend& backend);

/// Same decomposition as SR, exact longest path via subtour cuts. On timeout
/// the value is the best proven upper bound, flagged not proven optimal.
BigMSet compute_lp(const PowerNetwork& network, SolverBackend& backend, double per_line_time_limit = 60.0);

/// Shortest path through `active_lines`, skipping the line itself; `fallback`
/// supplies the value when that leaves the endpoints disconnected.
BigMSet compute_sp(const PowerNetwork& network, const std::set<LineId>& active_lines, const BigMSet& fallback);

BigMSet scale(const BigMSet& set, double pct);

struct LambdaReport {
    std::map<LineId, double> ratios;
    double min = 0.0;
    double avg = 0.0;
    double max = 0.0;
};

/// Ratios M_l / M^ref_l over lines with a nonzero reference value. A zero
/// candidate against a nonzero reference is an error (the candidate would be
/// invalid).
LambdaReport compare_lambda(const BigMSet& candidate, const BigMSet& reference, bool require_proven = true);

/// CSV with header `line_id,strategy,value_mw,compute_time_s,proven_optimal`.
std::string write_bigm_csv(const BigMSet& set);
BigMSet parse_bigm_csv(std::string_view text);

}  // namespace ots

#endif  // OTS_BIGM_HPP
