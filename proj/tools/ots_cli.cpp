// ots: big-M bounds, single OTS solves, benchmark batches and the enumeration check.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "ots/bigm.hpp"
#include "ots/network.hpp"
#include "ots/oracle.hpp"
#include "ots/runner.hpp"
#include "ots/solver.hpp"
#include "ots/text_util.hpp"

#ifndef OTS_DATA_DIR
#define OTS_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace ots;

namespace {

struct Options {
    std::string case_path = "case118";
    int scenarios = 10;
    std::uint64_t seed = 1;
    std::uint64_t scenario_seed = 1;
    std::string methods = "bn-ss,sr-ss,lp-ss,bn-it,sr-it,lp-it";
    std::string method = "sr-it";
    std::string strategy = "sr";
    std::string reference;
    double time_limit = 3600.0;
    double mip_gap = 1e-4;
    int pool_size = 10;
    std::string outer_times = "30,60,120,300,600";
    double heur_time = 30.0;
    double scale_pct = 0.0;
    double lp_line_time = 60.0;
    int workers = 1;
    bool baseline = false;
    std::string out;
};

fs::path resolve_case(const std::string& name) {
    if (name == "case118") return fs::path(OTS_DATA_DIR) / "case118_ots.m";
    return name;
}

RunConfig run_config(const Options& o) {
    RunConfig cfg;
    cfg.time_limit = o.time_limit;
    cfg.mip_gap = o.mip_gap;
    cfg.lp_line_time_limit = o.lp_line_time;
    cfg.iter.pool_size = o.pool_size;
    cfg.iter.heuristic_time = o.heur_time;
    cfg.iter.outer_times.clear();
    for (const std::string& t : split(o.outer_times, ',')) cfg.iter.outer_times.push_back(parse_double(t));
    return cfg;
}

void emit(const std::string& out, const fs::path& file, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    fs::create_directories(out);
    write_file(fs::path(out) / file, text);
}

int cmd_bigm(const Options& o) {
    const PowerNetwork net = load_case(resolve_case(o.case_path));
    auto engine = make_backend();
    RunConfig cfg = run_config(o);
    MethodId m = MethodId::parse(o.strategy + "-ss");
    m.scale_pct = o.scale_pct;
    const BigMSet set = bigms_for(net, m, cfg, *engine);
    emit(o.out, "bigm_" + o.strategy + ".csv", write_bigm_csv(set));
    std::cerr << "lines " << set.entries.size() << ", total time " << set.total_compute_time() << " s, mean "
              << set.total_compute_time() / std::max<std::size_t>(1, set.entries.size()) << " s/line\n";
    if (!o.reference.empty()) {
        const BigMSet ref = bigms_for(net, MethodId::parse(o.reference + "-ss"), cfg, *engine);
        const LambdaReport rep = compare_lambda(set, ref, false);
        std::cerr << "lambda vs " << o.reference << ": min " << rep.min << ", avg " << rep.avg << ", max " << rep.max
                  << " over " << rep.ratios.size() << " lines\n";
    }
    return 0;
}

int cmd_solve(const Options& o) {
    const PowerNetwork net = load_case(resolve_case(o.case_path));
    auto engine = make_backend();
    const RunConfig cfg = run_config(o);
    DemandScenario scenario = sample_scenarios(net, 1, o.scenario_seed).front();
    RunReport r = o.baseline ? run_spanning_tree_baseline(net, scenario, default_spanning_tree(net), cfg, *engine)
                             : run_method(net, scenario, MethodId::parse(o.method), cfg, *engine);
    emit(o.out, "runs.csv", write_runs_csv({r}));
    if (r.trace) emit(o.out, "trace_" + std::to_string(r.scenario_id) + "_" + r.label + ".csv", write_trace_csv(*r.trace));
    if (!r.message.empty()) std::cerr << r.message << "\n";
    return r.status == SolveStatus::Error ? 1 : 0;
}

int cmd_bench(const Options& o) {
    if (o.out.empty()) throw std::invalid_argument("bench needs --out DIR");
    const PowerNetwork net = load_case(resolve_case(o.case_path));
    const RunConfig cfg = run_config(o);
    std::vector<MethodId> methods = parse_method_list(o.methods);
    if (o.scale_pct != 0.0)
        for (MethodId& m : methods)
            if (m.strategy == BigMStrategy::LP && m.scale_pct == 0.0) m.scale_pct = o.scale_pct;
    const auto scenarios = sample_scenarios(net, o.scenarios, o.seed);
    auto probe = make_backend();
    BenchmarkBundle bundle = run_benchmark(net, scenarios, methods, cfg, [] { return make_backend(); }, o.workers);

    std::map<std::string, std::string> meta{{"engine", probe->name()},
                                            {"engine_version", probe->version()},
                                            {"case", resolve_case(o.case_path).string()},
                                            {"seed", std::to_string(o.seed)},
                                            {"scenarios", std::to_string(o.scenarios)},
                                            {"methods", o.methods},
                                            {"time_limit_s", format_double(o.time_limit)},
                                            {"mip_gap", format_double(o.mip_gap)},
                                            {"workers", std::to_string(o.workers)}};
    if (o.baseline) {
        const auto tree = default_spanning_tree(net);
        for (const DemandScenario& s : scenarios) {
            try {
                bundle.runs.push_back(run_spanning_tree_baseline(net, s, tree, cfg, *probe));
            } catch (const std::exception& e) {
                RunReport r;
                r.label = "tree-ss";
                r.scenario_id = s.scenario_id;
                r.message = e.what();
                bundle.runs.push_back(r);
            }
        }
        std::string ids;
        for (LineId l : tree) ids += (ids.empty() ? "" : ",") + std::to_string(l);
        meta["baseline_tree"] = "minimum spanning tree under F/b weights: " + ids;
    }
    write_bundle(bundle, o.out, meta);
    write_file(fs::path(o.out) / "scenarios.csv", write_scenarios_csv(scenarios));
    std::cout << write_summary_csv(bundle.summary);
    return 0;
}

int cmd_oracle(const Options& o) {
    const PowerNetwork net = load_case(resolve_case(o.case_path));
    auto engine = make_backend();
    const DemandScenario scenario = sample_scenarios(net, 1, o.scenario_seed).front();
    const SwitchingSolution truth = enumerate_topologies_oracle(net, scenario, *engine);
    RunConfig cfg = run_config(o);
    RunReport r = run_method(net, scenario, MethodId::parse(o.method), cfg, *engine);
    std::cout << "oracle " << format_double(truth.objective_cost) << "\n";
    std::cout << r.label << " " << (r.objective ? format_double(*r.objective) : "none") << " (" << to_string(r.status)
              << ")\n";
    if (!r.objective) return 1;
    const double diff = std::abs(*r.objective - truth.objective_cost) / std::max(1.0, std::abs(truth.objective_cost));
    const bool connected = r.solution && check_connectivity(r.solution->x, net);
    std::cout << (diff <= 1e-6 && connected ? "match" : "MISMATCH") << "\n";
    return diff <= 1e-6 && connected ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal transmission switching with tightened big-M bounds"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--case", o.case_path, "MATPOWER case file, or 'case118'");
        c->add_option("--time-limit", o.time_limit, "Solve budget per run (s)")->check(CLI::PositiveNumber);
        c->add_option("--mip-gap", o.mip_gap, "Relative MIP gap target")->check(CLI::Range(0.0, 1.0));
        c->add_option("--pool-size", o.pool_size, "Topologies kept per outer stage")->check(CLI::PositiveNumber);
        c->add_option("--outer-times", o.outer_times, "Outer stage times, comma separated (s)");
        c->add_option("--heur-time", o.heur_time, "Restricted stage time (s)")->check(CLI::PositiveNumber);
        c->add_option("--scale-pct", o.scale_pct, "Inflate LP big-Ms by this percentage")->check(CLI::NonNegativeNumber);
        c->add_option("--lp-line-time", o.lp_line_time, "Per-line limit for exact longest paths (s)");
        c->add_option("--out", o.out, "Output directory");
    };

    auto* bigm = app.add_subcommand("bigm", "Compute a big-M set and optionally its ratio to another");
    common(bigm);
    bigm->add_option("--strategy", o.strategy, "bn, sr or lp")->check(CLI::IsMember({"bn", "sr", "lp"}));
    bigm->add_option("--compare", o.reference, "Tighter reference strategy; reports M / M_ref per line")
        ->check(CLI::IsMember({"bn", "sr", "lp"}));

    auto* solve = app.add_subcommand("solve", "Solve one sampled scenario with one method");
    common(solve);
    solve->add_option("--method", o.method, "e.g. sr-it, bn-ss, lp-ss+35");
    solve->add_option("--scenario-seed", o.scenario_seed, "Seed of the sampled scenario");
    solve->add_flag("--baseline", o.baseline, "Run the spanning-tree baseline instead");

    auto* bench = app.add_subcommand("bench", "Run a batch of methods over sampled scenarios");
    common(bench);
    bench->add_option("--scenarios", o.scenarios, "Number of scenarios")->check(CLI::NonNegativeNumber);
    bench->add_option("--seed", o.seed, "Scenario sampling seed");
    bench->add_option("--methods", o.methods, "Comma separated methods");
    bench->add_option("--workers", o.workers, "Concurrent runs")->check(CLI::PositiveNumber);
    bench->add_flag("--baseline", o.baseline, "Also run the spanning-tree baseline per scenario");

    auto* oracle = app.add_subcommand("oracle", "Check a method against topology enumeration (small cases)");
    common(oracle);
    oracle->add_option("--method", o.method, "Method to check");
    oracle->add_option("--scenario-seed", o.scenario_seed, "Seed of the sampled scenario");

    CLI11_PARSE(app, argc, argv);
    try {
        if (bigm->parsed()) return cmd_bigm(o);
        if (solve->parsed()) return cmd_solve(o);
        if (bench->parsed()) return cmd_bench(o);
        if (oracle->parsed()) return cmd_oracle(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
