#include "ots/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <mutex>
#include <thread>

#include "ots/text_util.hpp"

namespace ots {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Consistent dispatch for the solver's best topology; the raw decode if the
// re-dispatch is not possible.
SwitchingSolution clean_solution(const PowerNetwork& network, const DemandScenario& scenario, const MilpModel& model,
                                 const Incumbent& best, SolverBackend& backend) {
    SwitchingSolution raw = decode_switching_solution(model, best.values, network);
    raw.objective_cost = best.objective;
    try {
        if (auto clean = solve_topology(network, scenario, raw.closed_lines(), backend)) return *clean;
    } catch (const std::exception&) {
    }
    return raw;
}

void fill_from_outcome(RunReport& r, const SolveOutcome& out) {
    r.status = out.status;
    r.message = out.message;
    if (out.has_solution()) {
        r.objective = out.best().objective;
        r.final_gap = out.final_gap;
    }
}

}  // namespace

std::string MethodId::label() const {
    std::string s = lower(to_string(strategy)) + (mode == Mode::SS ? "-ss" : "-it");
    if (scale_pct != 0.0) s += "+" + format_double(scale_pct);
    return s;
}

MethodId MethodId::parse(std::string_view text) {
    std::string t = lower(trim(text));
    MethodId m;
    auto plus = t.find('+');
    if (plus != std::string::npos) {
        try {
            m.scale_pct = parse_double(t.substr(plus + 1));
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("bad scale in method '" + std::string(text) + "'");
        }
        if (!(m.scale_pct >= 0.0)) throw std::invalid_argument("scale must be nonnegative in '" + std::string(text) + "'");
        t.resize(plus);
    }
    auto dash = t.find('-');
    if (dash == std::string::npos) throw std::invalid_argument("method must look like 'sr-ss', got '" + std::string(text) + "'");
    std::string strat = t.substr(0, dash);
    std::string mode = t.substr(dash + 1);
    if (strat == "bn") m.strategy = BigMStrategy::BN;
    else if (strat == "sr") m.strategy = BigMStrategy::SR;
    else if (strat == "lp") m.strategy = BigMStrategy::LP;
    else throw std::invalid_argument("unknown big-M strategy in method '" + std::string(text) + "'");
    if (mode == "ss") m.mode = Mode::SS;
    else if (mode == "it") m.mode = Mode::IT;
    else throw std::invalid_argument("unknown mode in method '" + std::string(text) + "'");
    return m;
}

std::vector<MethodId> parse_method_list(std::string_view csv) {
    std::vector<MethodId> out;
    for (const std::string& part : split(csv, ','))
        if (!part.empty()) out.push_back(MethodId::parse(part));
    if (out.empty()) throw std::invalid_argument("empty method list");
    return out;
}

BigMSet bigms_for(const PowerNetwork& network, const MethodId& method, const RunConfig& cfg, SolverBackend& backend) {
    BigMSet base;
    switch (method.strategy) {
        case BigMStrategy::BN: base = compute_bn(network); break;
        case BigMStrategy::SR: base = compute_sr(network, backend); break;
        case BigMStrategy::LP: base = compute_lp(network, backend, cfg.lp_line_time_limit); break;
        default: throw std::invalid_argument("methods use BN, SR or LP big-Ms");
    }
    return method.scale_pct != 0.0 ? scale(base, method.scale_pct) : base;
}

RunReport run_method(const PowerNetwork& network, const DemandScenario& scenario, const MethodId& method,
                     const RunConfig& cfg, SolverBackend& backend, const BigMSet* bigms,
                     const SwitchingSolution* warm) {
    RunReport r;
    r.method = method;
    r.label = method.label();
    r.scenario_id = scenario.scenario_id;
    const BigMSet set = bigms ? *bigms : bigms_for(network, method, cfg, backend);
    r.bigm_compute_time_s = set.total_compute_time();

    if (method.mode == Mode::SS) {
        const MilpModel model = build_ots_model(network, scenario, set);
        SolveRequest req;
        req.time_limit = cfg.time_limit;
        req.rel_gap_target = cfg.mip_gap;
        req.integrality_emphasis = cfg.integrality_emphasis;
        if (warm) req.warm_start = model.assignment(warm->named_values());
        const auto t0 = Clock::now();
        SolveOutcome out = backend.solve(model, req);
        r.wall_time_s = seconds_since(t0);
        fill_from_outcome(r, out);
        if (out.has_solution()) {
            r.solution = clean_solution(network, scenario, model, out.best(), backend);
            r.solution->objective_cost = out.best().objective;
        }
        return r;
    }

    IterConfig iter = cfg.iter;
    iter.total_budget = cfg.time_limit;
    iter.rel_gap = cfg.mip_gap;
    iter.integrality_emphasis = cfg.integrality_emphasis;
    IterResult it = run_iterative(network, scenario, set, iter, backend);
    r.status = it.status;
    r.message = it.message;
    r.objective = it.objective;
    if (it.objective) r.final_gap = it.final_gap;
    r.wall_time_s = it.wall_time_s;
    r.trace = it.trace;
    r.solution = it.solution;
    return r;
}

std::set<LineId> default_spanning_tree(const PowerNetwork& network) {
    auto ids = minimum_spanning_tree(to_multigraph(network));
    return {ids.begin(), ids.end()};
}

RunReport run_spanning_tree_baseline(const PowerNetwork& network, const DemandScenario& scenario,
                                     const std::set<LineId>& tree, const RunConfig& cfg, SolverBackend& backend) {
    if (tree.size() + 1 != network.buses().size() || !lines_connect_all_buses(network, tree))
        throw std::invalid_argument("baseline tree must be a spanning tree of the network");
    RunReport r;
    r.method = {BigMStrategy::SP, 0.0, Mode::SS};
    r.label = "tree-ss";
    r.scenario_id = scenario.scenario_id;

    const auto t_bounds = Clock::now();
    const BigMSet fallback = compute_bn(network);
    const BigMSet sp = compute_sp(network, tree, fallback);
    r.bigm_compute_time_s = seconds_since(t_bounds);

    MilpModel model = build_ots_model(network, scenario, sp);
    fix_lines_closed(model, tree);
    SolveRequest req;
    req.time_limit = cfg.time_limit;
    req.rel_gap_target = cfg.mip_gap;
    req.integrality_emphasis = cfg.integrality_emphasis;
    const auto ids = network.line_ids();
    if (auto all = solve_topology(network, scenario, {ids.begin(), ids.end()}, backend))
        req.warm_start = model.assignment(all->named_values());
    const auto t0 = Clock::now();
    SolveOutcome out = backend.solve(model, req);
    r.wall_time_s = seconds_since(t0);
    fill_from_outcome(r, out);
    if (out.has_solution()) {
        r.solution = clean_solution(network, scenario, model, out.best(), backend);
        r.solution->objective_cost = out.best().objective;
    }
    return r;
}

BenchmarkBundle run_benchmark(const PowerNetwork& network, const std::vector<DemandScenario>& scenarios,
                              const std::vector<MethodId>& methods, const RunConfig& cfg,
                              const BackendFactory& make_engine, int workers) {
    BenchmarkBundle bundle;
    if (scenarios.empty() || methods.empty()) return bundle;

    // Bounds depend on the topology only: one computation per strategy.
    std::map<std::string, BigMSet> by_method;
    {
        auto engine = make_engine();
        std::map<BigMStrategy, BigMSet> base;
        for (const MethodId& m : methods) {
            if (!base.contains(m.strategy)) base[m.strategy] = bigms_for(network, {m.strategy, 0.0, m.mode}, cfg, *engine);
            BigMSet set = m.scale_pct != 0.0 ? scale(base[m.strategy], m.scale_pct) : base[m.strategy];
            bundle.bigms[set.provenance] = set;
            by_method[m.label()] = set;
        }
    }

    struct Cell {
        std::size_t scenario;
        std::size_t method;
    };
    std::vector<Cell> cells;
    for (std::size_t s = 0; s < scenarios.size(); ++s)
        for (std::size_t m = 0; m < methods.size(); ++m) cells.push_back({s, m});
    bundle.runs.resize(cells.size());

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        auto engine = make_engine();
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& c = cells[i];
            const MethodId& m = methods[c.method];
            const BigMSet& set = by_method.at(m.label());
            try {
                bundle.runs[i] = run_method(network, scenarios[c.scenario], m, cfg, *engine, &set);
            } catch (const std::exception& e) {
                RunReport r;
                r.method = m;
                r.label = m.label();
                r.scenario_id = scenarios[c.scenario].scenario_id;
                r.bigm_compute_time_s = set.total_compute_time();
                r.message = std::string("scenario ") + std::to_string(r.scenario_id) + ", method " + r.label + ": " +
                            e.what();
                bundle.runs[i] = std::move(r);
            }
        }
    };
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(cells.size())));
    if (n == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    std::vector<std::string> order;
    for (const MethodId& m : methods) order.push_back(m.label());
    bundle.summary = summarize(bundle.runs, order);
    for (const std::string& label : order) bundle.curves[label] = solved_curve(bundle.runs, label);
    return bundle;
}

std::vector<SummaryRow> summarize(const std::vector<RunReport>& runs, const std::vector<std::string>& method_order) {
    std::vector<SummaryRow> rows;
    for (const std::string& label : method_order) {
        SummaryRow row;
        row.method = label;
        double time_sum = 0.0;
        double gap_sum = 0.0;
        int count = 0;
        int gaps = 0;
        for (const RunReport& r : runs) {
            if (r.label != label) continue;
            ++count;
            time_sum += r.wall_time_s;
            if (r.final_gap) {
                ++gaps;
                gap_sum += *r.final_gap;
                row.max_gap = std::max(row.max_gap, *r.final_gap);
            }
            if (!r.solved()) ++row.unsolved;
        }
        if (count > 0) row.avg_time_s = time_sum / count;
        if (gaps > 0) row.avg_gap = gap_sum / gaps;
        rows.push_back(row);
    }
    return rows;
}

std::vector<CurvePoint> solved_curve(const std::vector<RunReport>& runs, const std::string& method) {
    std::vector<double> times;
    for (const RunReport& r : runs)
        if (r.label == method && r.solved()) times.push_back(r.wall_time_s);
    std::sort(times.begin(), times.end());
    std::vector<CurvePoint> curve;
    for (std::size_t i = 0; i < times.size(); ++i) curve.emplace_back(times[i], static_cast<int>(i + 1));
    return curve;
}

std::string write_runs_csv(const std::vector<RunReport>& runs) {
    std::string out = "method,scenario_id,status,objective,final_gap,wall_time_s,bigm_compute_time_s\n";
    for (const RunReport& r : runs)
        out += r.label + "," + std::to_string(r.scenario_id) + "," + to_string(r.status) + "," +
               (r.objective ? format_double(*r.objective) : "") + "," +
               (r.final_gap ? format_double(*r.final_gap) : "") + "," + format_double(r.wall_time_s) + "," +
               format_double(r.bigm_compute_time_s) + "\n";
    return out;
}

std::string write_summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out = "method,avg_time_s,max_gap,avg_gap,unsolved\n";
    for (const SummaryRow& r : rows)
        out += r.method + "," + format_double(r.avg_time_s) + "," + format_double(r.max_gap) + "," +
               format_double(r.avg_gap) + "," + std::to_string(r.unsolved) + "\n";
    return out;
}

std::string write_curve_csv(const std::vector<CurvePoint>& curve) {
    std::string out = "time_s,solved\n";
    for (auto [t, n] : curve) out += format_double(t) + "," + std::to_string(n) + "\n";
    return out;
}

void write_bundle(const BenchmarkBundle& bundle, const std::filesystem::path& dir,
                  const std::map<std::string, std::string>& meta) {
    std::filesystem::create_directories(dir);
    write_file(dir / "runs.csv", write_runs_csv(bundle.runs));
    write_file(dir / "summary.csv", write_summary_csv(bundle.summary));
    for (const auto& [label, curve] : bundle.curves) write_file(dir / ("curve_" + label + ".csv"), write_curve_csv(curve));
    for (const RunReport& r : bundle.runs)
        if (r.trace)
            write_file(dir / ("trace_" + std::to_string(r.scenario_id) + "_" + r.label + ".csv"),
                       write_trace_csv(*r.trace));
    for (const auto& [name, set] : bundle.bigms) {
        std::string file = lower(name);
        std::replace(file.begin(), file.end(), '%', 'p');
        write_file(dir / ("bigm_" + file + ".csv"), write_bigm_csv(set));
    }
    nlohmann::json j;
    for (const auto& [k, v] : meta) j[k] = v;
    j["runs"] = bundle.runs.size();
    nlohmann::json failures = nlohmann::json::array();
    for (const RunReport& r : bundle.runs)
        if (r.status == SolveStatus::Error) failures.push_back(r.message);
    j["failures"] = failures;
    write_file(dir / "meta.json", j.dump(2) + "\n");
}

}  // namespace ots
