#include "ots/ots_models.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <sstream>

namespace ots {

std::set<LineId> SwitchingSolution::closed_lines() const {
    std::set<LineId> out;
    for (auto [l, v] : x)
        if (v == 1) out.insert(l);
    return out;
}

std::map<std::string, double> SwitchingSolution::named_values() const {
    std::map<std::string, double> out;
    for (auto [l, v] : x) out[var_x(l)] = v;
    for (auto [l, v] : y) out[var_y(l)] = v;
    for (auto [l, v] : z) out[var_z(l)] = v;
    for (auto [l, v] : f) out[var_f(l)] = v;
    for (auto [g, v] : p) out[var_p(g)] = v;
    for (auto [n, v] : theta) out[var_th(n)] = v;
    for (auto [n, v] : u) out[var_u(n)] = v;
    return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double demand_at(const DemandScenario& scenario, BusId bus) {
    auto it = scenario.demand.find(bus);
    if (it == scenario.demand.end())
        throw std::invalid_argument("scenario " + std::to_string(scenario.scenario_id) + " has no demand for bus " +
                                    std::to_string(bus));
    return it->second;
}

MilpModel build_core(const PowerNetwork& net, const DemandScenario& scenario,
                     const std::function<double(LineId)>& big_m) {
    MilpModel m;
    const double n_buses = static_cast<double>(net.buses().size());
    const BusId ref = net.reference_bus();

    std::map<LineId, int> x, y, z, f;
    std::map<GenId, int> p;
    std::map<BusId, int> th, u;
    for (const Line& l : net.lines()) {
        x[l.id] = m.add_variable(var_x(l.id), VarKind::Binary, 0.0, 1.0);
        y[l.id] = m.add_variable(var_y(l.id), VarKind::Binary, 0.0, 1.0);
        z[l.id] = m.add_variable(var_z(l.id), VarKind::Binary, 0.0, 1.0);
    }
    for (const Line& l : net.lines()) f[l.id] = m.add_variable(var_f(l.id), VarKind::Continuous, -kInf, kInf);
    for (const Generator& g : net.generators())
        p[g.id] = m.add_variable(var_p(g.id), VarKind::Continuous, g.p_min, g.p_max);
    for (const Bus& b : net.buses()) th[b.id] = m.add_variable(var_th(b.id), VarKind::Continuous, -kInf, kInf);
    for (const Bus& b : net.buses()) u[b.id] = m.add_variable(var_u(b.id), VarKind::Continuous, 1.0, n_buses);

    std::vector<Term> cost;
    for (const Generator& g : net.generators()) cost.push_back({p[g.id], g.marginal_cost});
    m.set_objective(ObjSense::Minimize, cost);

    for (const Bus& b : net.buses()) {
        std::vector<Term> terms;
        for (const Generator* g : net.generators_at(b.id)) terms.push_back({p[g->id], 1.0});
        for (const Line& l : net.lines()) {
            if (l.from_bus == b.id) terms.push_back({f[l.id], -1.0});
            if (l.to_bus == b.id) terms.push_back({f[l.id], 1.0});
        }
        m.add_constraint("bal_" + std::to_string(b.id), terms, Sense::Equal, demand_at(scenario, b.id));
    }

    for (const Line& l : net.lines()) {
        const std::string id = std::to_string(l.id);
        const double bigm = big_m(l.id);
        const double b = l.susceptance;
        // f >= b (th_n - th_m) - M (1 - x),  f <= b (th_n - th_m) + M (1 - x)
        m.add_constraint("fdn_" + id, {{f[l.id], 1.0}, {th[l.from_bus], -b}, {th[l.to_bus], b}, {x[l.id], -bigm}},
                         Sense::GreaterEqual, -bigm);
        m.add_constraint("fup_" + id, {{f[l.id], 1.0}, {th[l.from_bus], -b}, {th[l.to_bus], b}, {x[l.id], bigm}},
                         Sense::LessEqual, bigm);
        m.add_constraint("capl_" + id, {{f[l.id], 1.0}, {x[l.id], l.capacity}}, Sense::GreaterEqual, 0.0);
        m.add_constraint("capu_" + id, {{f[l.id], 1.0}, {x[l.id], -l.capacity}}, Sense::LessEqual, 0.0);
    }
    m.add_constraint("ref_angle", {{th[ref], 1.0}}, Sense::Equal, 0.0);

    for (const Bus& b : net.buses()) {
        if (b.id == ref) continue;
        std::vector<Term> terms;
        for (const Line& l : net.lines()) {
            if (l.from_bus == b.id) terms.push_back({y[l.id], 1.0});
            if (l.to_bus == b.id) terms.push_back({z[l.id], 1.0});
        }
        m.add_constraint("conn_" + std::to_string(b.id), terms, Sense::GreaterEqual, 1.0);
    }
    for (const Line& l : net.lines()) {
        if (l.from_bus == ref || l.to_bus == ref) continue;
        const std::string id = std::to_string(l.id);
        // u_n - u_m <= N (1 - y) - 1, u_m - u_n <= N (1 - z) - 1
        m.add_constraint("ordf_" + id, {{u[l.from_bus], 1.0}, {u[l.to_bus], -1.0}, {y[l.id], n_buses}},
                         Sense::LessEqual, n_buses - 1.0);
        m.add_constraint("ordr_" + id, {{u[l.to_bus], 1.0}, {u[l.from_bus], -1.0}, {z[l.id], n_buses}},
                         Sense::LessEqual, n_buses - 1.0);
    }
    for (const Line& l : net.lines())
        m.add_constraint("arc_" + std::to_string(l.id), {{y[l.id], 1.0}, {z[l.id], 1.0}, {x[l.id], -1.0}},
                         Sense::Equal, 0.0);
    m.add_constraint("ref_order", {{u[ref], 1.0}}, Sense::Equal, 1.0);
    return m;
}

}  // namespace

MilpModel build_ots_model(const PowerNetwork& network, const DemandScenario& scenario, const BigMSet& bigms) {
    return build_core(network, scenario, [&](LineId l) { return bigms.value(l); });
}

MilpModel build_restricted_model(const PowerNetwork& network, const DemandScenario& scenario,
                                 const std::vector<SwitchingSolution>& pool, const std::vector<BigMSet>& pool_bigms,
                                 const BigMSet& outer_bigms) {
    if (pool.empty()) throw std::invalid_argument("restricted model needs a nonempty pool");
    if (pool_bigms.size() != pool.size()) throw std::invalid_argument("one big-M set per pool member is required");
    (void)outer_bigms;  // already folded into pool_bigms as the fallback

    MilpModel m = build_core(network, scenario, [&](LineId l) {
        double worst = 0.0;
        for (const BigMSet& s : pool_bigms) worst = std::max(worst, s.value(l));
        return worst;
    });
    const auto k = pool.size();
    for (const Line& l : network.lines()) {
        std::size_t closed = 0;
        for (const SwitchingSolution& s : pool) {
            auto it = s.x.find(l.id);
            if (it == s.x.end()) throw std::invalid_argument("pool member lacks line " + std::to_string(l.id));
            closed += it->second == 1 ? 1 : 0;
        }
        double floor_share = static_cast<double>(closed / k);  // floor(sum_k x_kl / |K|)
        m.set_bounds(m.variable_index(var_x(l.id)), floor_share, 1.0);
    }
    m.set_warm_start(m.assignment(pool.front().named_values()));
    return m;
}

void fix_lines_closed(MilpModel& model, const std::set<LineId>& lines) {
    for (LineId l : lines) model.set_bounds(model.variable_index(var_x(l)), 1.0, 1.0);
}

MilpModel build_dispatch_model(const PowerNetwork& network, const DemandScenario& scenario,
                               const std::set<LineId>& closed_lines) {
    for (LineId l : closed_lines)
        if (!network.has_line(l)) throw std::invalid_argument("unknown line " + std::to_string(l));
    if (!lines_connect_all_buses(network, closed_lines))
        throw std::invalid_argument("dispatch topology does not connect every bus");

    MilpModel m;
    std::map<LineId, int> f;
    std::map<GenId, int> p;
    std::map<BusId, int> th;
    for (const Line& l : network.lines()) {
        bool closed = closed_lines.contains(l.id);
        f[l.id] = m.add_variable(var_f(l.id), VarKind::Continuous, closed ? -l.capacity : 0.0,
                                 closed ? l.capacity : 0.0);
    }
    for (const Generator& g : network.generators())
        p[g.id] = m.add_variable(var_p(g.id), VarKind::Continuous, g.p_min, g.p_max);
    for (const Bus& b : network.buses()) th[b.id] = m.add_variable(var_th(b.id), VarKind::Continuous, -kInf, kInf);

    std::vector<Term> cost;
    for (const Generator& g : network.generators()) cost.push_back({p[g.id], g.marginal_cost});
    m.set_objective(ObjSense::Minimize, cost);

    for (const Bus& b : network.buses()) {
        std::vector<Term> terms;
        for (const Generator* g : network.generators_at(b.id)) terms.push_back({p[g->id], 1.0});
        for (const Line& l : network.lines()) {
            if (l.from_bus == b.id) terms.push_back({f[l.id], -1.0});
            if (l.to_bus == b.id) terms.push_back({f[l.id], 1.0});
        }
        m.add_constraint("bal_" + std::to_string(b.id), terms, Sense::Equal, demand_at(scenario, b.id));
    }
    for (const Line& l : network.lines()) {
        if (!closed_lines.contains(l.id)) continue;
        const double b = l.susceptance;
        m.add_constraint("flow_" + std::to_string(l.id), {{f[l.id], 1.0}, {th[l.from_bus], -b}, {th[l.to_bus], b}},
                         Sense::Equal, 0.0);
    }
    m.add_constraint("ref_angle", {{th[network.reference_bus()], 1.0}}, Sense::Equal, 0.0);
    return m;
}

SwitchingSolution decode_switching_solution(const MilpModel& model, const std::vector<double>& values,
                                            const PowerNetwork& network) {
    if (values.size() != model.num_variables()) throw SolutionError("value vector does not match the model");
    SwitchingSolution s;
    auto get = [&](const std::string& name) -> std::optional<double> {
        if (!model.has_variable(name)) return std::nullopt;
        return values[static_cast<std::size_t>(model.variable_index(name))];
    };
    auto bit = [](double v) { return v >= 0.5 ? 1 : 0; };
    for (const Line& l : network.lines()) {
        if (auto v = get(var_x(l.id))) s.x[l.id] = bit(*v);
        if (auto v = get(var_y(l.id))) s.y[l.id] = bit(*v);
        if (auto v = get(var_z(l.id))) s.z[l.id] = bit(*v);
        if (auto v = get(var_f(l.id))) s.f[l.id] = *v;
    }
    for (const Generator& g : network.generators())
        if (auto v = get(var_p(g.id))) s.p[g.id] = *v;
    for (const Bus& b : network.buses()) {
        if (auto v = get(var_th(b.id))) s.theta[b.id] = *v;
        if (auto v = get(var_u(b.id))) s.u[b.id] = *v;
    }
    s.objective_cost = model.objective_value(values);
    return s;
}

std::vector<std::string> check_switching_solution(const SwitchingSolution& sol, const PowerNetwork& network,
                                                  double eps) {
    std::vector<std::string> issues;
    auto fmt = [](double v) {
        std::ostringstream os;
        os.precision(6);
        os << v;
        return os.str();
    };
    for (const Line& l : network.lines()) {
        const std::string tag = "line " + std::to_string(l.id);
        auto xi = sol.x.find(l.id);
        auto fi = sol.f.find(l.id);
        if (xi == sol.x.end() || fi == sol.f.end()) {
            issues.push_back(tag + ": missing status or flow");
            continue;
        }
        const int x = xi->second;
        const double f = fi->second;
        const double tol = eps * std::max(1.0, std::abs(f));
        if (std::abs(f) > x * l.capacity + tol)
            issues.push_back(tag + ": |f| exceeds x*F by " + fmt(std::abs(f) - x * l.capacity));
        if (x == 1) {
            auto a = sol.theta.find(l.from_bus);
            auto b = sol.theta.find(l.to_bus);
            if (a == sol.theta.end() || b == sol.theta.end()) {
                issues.push_back(tag + ": missing angles");
            } else {
                double residual = f - l.susceptance * (a->second - b->second);
                if (std::abs(residual) > eps * std::max({1.0, std::abs(f), l.susceptance * std::abs(a->second - b->second)}))
                    issues.push_back(tag + ": closed-line flow residual " + fmt(residual));
            }
        } else if (std::abs(f) > eps) {
            issues.push_back(tag + ": open line carries " + fmt(f) + " MW");
        }
        if (sol.y.contains(l.id) && sol.z.contains(l.id) && sol.y.at(l.id) + sol.z.at(l.id) != x)
            issues.push_back(tag + ": arc variables disagree with status");
    }
    if (!lines_connect_all_buses(network, sol.closed_lines())) issues.push_back("closed lines leave an island");
    return issues;
}

SwitchingSolution extract_switching_solution(const MilpModel& model, const std::vector<double>& values,
                                             const PowerNetwork& network, double eps) {
    SwitchingSolution s = decode_switching_solution(model, values, network);
    auto issues = check_switching_solution(s, network, eps);
    if (!issues.empty()) {
        std::string msg = "invalid switching solution:";
        for (const auto& i : issues) msg += "\n  " + i;
        throw SolutionError(msg);
    }
    return s;
}

void orient_towards_reference(const PowerNetwork& network, SwitchingSolution& sol) {
    const std::set<LineId> closed = sol.closed_lines();
    std::map<BusId, std::vector<const Line*>> adj;
    for (const Line& l : network.lines()) {
        if (!closed.contains(l.id)) continue;
        adj[l.from_bus].push_back(&l);
        adj[l.to_bus].push_back(&l);
    }
    std::map<BusId, int> order;
    std::deque<BusId> queue{network.reference_bus()};
    order[network.reference_bus()] = 1;
    while (!queue.empty()) {
        BusId v = queue.front();
        queue.pop_front();
        for (const Line* l : adj[v]) {
            BusId w = l->from_bus == v ? l->to_bus : l->from_bus;
            if (order.contains(w)) continue;
            order[w] = static_cast<int>(order.size()) + 1;
            queue.push_back(w);
        }
    }
    const int n = static_cast<int>(network.buses().size());
    if (static_cast<int>(order.size()) != n) throw SolutionError("closed lines leave an island");

    sol.u.clear();
    for (auto [bus, k] : order) sol.u[bus] = bus == network.reference_bus() ? 1.0 : static_cast<double>(n + 1 - k);
    sol.y.clear();
    sol.z.clear();
    for (const Line& l : network.lines()) {
        bool on = closed.contains(l.id);
        bool forward = on && order[l.from_bus] > order[l.to_bus];  // later-found endpoint points back
        sol.y[l.id] = forward ? 1 : 0;
        sol.z[l.id] = on && !forward ? 1 : 0;
    }
}

std::optional<SwitchingSolution> solve_topology(const PowerNetwork& network, const DemandScenario& scenario,
                                                const std::set<LineId>& closed_lines, SolverBackend& backend) {
    MilpModel m = build_dispatch_model(network, scenario, closed_lines);
    SolveRequest req;
    req.time_limit = 600.0;
    SolveOutcome out = backend.solve(m, req);
    if (out.status == SolveStatus::Infeasible) return std::nullopt;
    if (out.status != SolveStatus::Optimal)
        throw std::runtime_error("dispatch solve failed: " + to_string(out.status) + " " + out.message);
    SwitchingSolution s = decode_switching_solution(m, out.best().values, network);
    for (const Line& l : network.lines()) s.x[l.id] = closed_lines.contains(l.id) ? 1 : 0;
    orient_towards_reference(network, s);
    return s;
}

}  // namespace ots
