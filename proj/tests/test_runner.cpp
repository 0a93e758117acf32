#include <doctest.h>

#include <json.hpp>

#include "fixtures.hpp"
#include "ots/oracle.hpp"
#include "ots/runner.hpp"
#include "ots/text_util.hpp"

using namespace ots;
using namespace ots::testing;

namespace {

RunConfig quick_config() {
    RunConfig cfg;
    cfg.time_limit = 30;
    cfg.mip_gap = 1e-6;
    cfg.iter.outer_times = {1, 2};
    cfg.iter.heuristic_time = 1;
    cfg.iter.outer_incumbent_limit = 1;
    return cfg;
}

// Recomputes the summary straight from runs.csv text.
std::map<std::string, SummaryRow> summary_from_csv(const std::string& runs_csv) {
    std::map<std::string, SummaryRow> rows;
    std::map<std::string, std::pair<double, int>> time;
    std::map<std::string, std::pair<double, int>> gap;
    auto lines = split_lines(runs_csv);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto f = split(lines[i], ',');
        SummaryRow& r = rows[f[0]];
        r.method = f[0];
        time[f[0]].first += parse_double(f[5]);
        time[f[0]].second += 1;
        if (!f[4].empty()) {
            const double g = parse_double(f[4]);
            gap[f[0]].first += g;
            gap[f[0]].second += 1;
            r.max_gap = std::max(r.max_gap, g);
        }
        if (f[2] != "optimal") ++r.unsolved;
    }
    for (auto& [m, r] : rows) {
        r.avg_time_s = time[m].first / time[m].second;
        if (gap[m].second) r.avg_gap = gap[m].first / gap[m].second;
    }
    return rows;
}

}  // namespace

TEST_CASE("method labels parse and print") {
    const MethodId m = MethodId::parse("LP-SS+35");
    CHECK(m.strategy == BigMStrategy::LP);
    CHECK(m.mode == Mode::SS);
    CHECK(m.scale_pct == 35);
    CHECK(m.label() == "lp-ss+35");
    CHECK(MethodId::parse("sr-it").label() == "sr-it");
    CHECK(parse_method_list("bn-ss,sr-ss,lp-ss,bn-it,sr-it,lp-it").size() == 6);
    CHECK_THROWS(MethodId::parse("sp-ss"));
    CHECK_THROWS(MethodId::parse("sr"));
    CHECK_THROWS(MethodId::parse("sr-xx"));
    CHECK_THROWS(MethodId::parse("lp-ss+-5"));
    CHECK_THROWS(parse_method_list(""));
}

TEST_CASE("single-step and iterative runs match the enumeration oracle") {
    auto engine = make_backend();
    std::mt19937_64 rng(4);
    const PowerNetwork net = random_ots_network(rng, 6, 8);
    const DemandScenario s = baseline_scenario(net);
    const SwitchingSolution truth = enumerate_topologies_oracle(net, s, *engine);
    const RunConfig cfg = quick_config();
    const RunReport ss = run_method(net, s, MethodId::parse("sr-ss"), cfg, *engine);
    const RunReport it = run_method(net, s, MethodId::parse("sr-it"), cfg, *engine);
    const RunReport scaled = run_method(net, s, MethodId::parse("lp-ss+35"), cfg, *engine);
    for (const RunReport* r : {&ss, &it, &scaled}) {
        CAPTURE(r->label);
        CHECK(r->status == SolveStatus::Optimal);
        REQUIRE(r->objective);
        CHECK(*r->objective == doctest::Approx(truth.objective_cost).epsilon(1e-6));
        REQUIRE(r->solution);
        CHECK(check_connectivity(r->solution->x, net));
        CHECK(r->wall_time_s <= cfg.time_limit + 5);
    }
    CHECK(it.trace);
    CHECK_FALSE(ss.trace);
}

TEST_CASE("spanning-tree baseline") {
    auto engine = make_backend();
    std::mt19937_64 rng(12);
    const RunConfig cfg = quick_config();
    int strictly_better = 0;
    for (int i = 0; i < 6; ++i) {
        const PowerNetwork net = random_ots_network(rng, 6, 9);
        const DemandScenario s = baseline_scenario(net);
        const auto tree = default_spanning_tree(net);
        CHECK(tree.size() == net.buses().size() - 1);
        const RunReport base = run_spanning_tree_baseline(net, s, tree, cfg, *engine);
        REQUIRE(base.objective);
        REQUIRE(base.solution);
        for (LineId l : tree) CHECK(base.solution->x.at(l) == 1);
        const SwitchingSolution truth = enumerate_topologies_oracle(net, s, *engine);
        CHECK(truth.objective_cost <= *base.objective + 1e-6);
        if (truth.objective_cost < *base.objective - 1e-6) ++strictly_better;
        std::set<LineId> short_tree = tree;
        short_tree.erase(short_tree.begin());
        CHECK_THROWS(run_spanning_tree_baseline(net, s, short_tree, cfg, *engine));
    }
    CHECK(strictly_better >= 1);
}

TEST_CASE("benchmark bundle, summary and curves") {
    std::mt19937_64 rng(21);
    const PowerNetwork net = random_ots_network(rng, 5, 7);
    const auto scenarios = sample_scenarios(net, 4, 2);
    const auto methods = parse_method_list("bn-ss,sr-it,lp-ss+10");
    const RunConfig cfg = quick_config();
    BackendFactory factory = [] { return make_backend(); };

    CHECK(run_benchmark(net, {}, methods, cfg, factory).runs.empty());

    const BenchmarkBundle b = run_benchmark(net, scenarios, methods, cfg, factory, 2);
    REQUIRE(b.runs.size() == 12);
    CHECK(b.summary.size() == 3);
    CHECK(b.bigms.contains("BN"));
    CHECK(b.bigms.contains("SR"));
    CHECK(b.bigms.contains("LP+10%"));

    const std::string runs_csv = write_runs_csv(b.runs);
    const auto recomputed = summary_from_csv(runs_csv);
    for (const SummaryRow& row : b.summary) {
        const SummaryRow& r = recomputed.at(row.method);
        CHECK(r.avg_time_s == row.avg_time_s);
        CHECK(r.max_gap == row.max_gap);
        CHECK(r.avg_gap == row.avg_gap);
        CHECK(r.unsolved == row.unsolved);
    }
    CHECK(write_summary_csv(b.summary).rfind("method,avg_time_s,max_gap,avg_gap,unsolved\n", 0) == 0);

    for (const auto& [label, curve] : b.curves) {
        int prev = 0;
        double prev_t = 0;
        for (auto [t, n] : curve) {
            CHECK(n == prev + 1);
            CHECK(t >= prev_t);
            prev = n;
            prev_t = t;
        }
        CHECK(prev <= int(scenarios.size()));
    }

    const auto dir = std::filesystem::temp_directory_path() / "ots_bundle_test";
    std::filesystem::remove_all(dir);
    write_bundle(b, dir, {{"engine", "highs"}});
    for (const char* f : {"runs.csv", "summary.csv", "curve_bn-ss.csv", "curve_sr-it.csv", "bigm_sr.csv", "meta.json"})
        CHECK(std::filesystem::exists(dir / f));
    CHECK(std::filesystem::exists(dir / "trace_0_sr-it.csv"));
    const auto meta = nlohmann::json::parse(read_file(dir / "meta.json"));
    CHECK(meta["engine"] == "highs");
    CHECK(meta["runs"] == 12);
    std::filesystem::remove_all(dir);
}

TEST_CASE("failing cells are recorded and the batch continues") {
    std::mt19937_64 rng(21);
    const PowerNetwork net = random_ots_network(rng, 5, 7);
    const auto scenarios = sample_scenarios(net, 2, 2);
    int calls = 0;
    BackendFactory factory = [&calls]() -> std::unique_ptr<SolverBackend> {
        // The first engine computes bounds; later ones are used for the cells.
        if (calls++ == 0) return make_backend();
        throw std::runtime_error("engine unavailable");
    };
    CHECK_THROWS(run_benchmark(net, scenarios, parse_method_list("bn-ss"), quick_config(), factory));

    struct Broken : SolverBackend {
        SolveOutcome solve(const MilpModel&, const SolveRequest&) override { throw std::runtime_error("boom"); }
        [[nodiscard]] std::string name() const override { return "broken"; }
        [[nodiscard]] std::string version() const override { return "0"; }
    };
    const BenchmarkBundle b = run_benchmark(net, scenarios, parse_method_list("bn-ss,bn-it"), quick_config(),
                                            [] { return std::make_unique<Broken>(); });
    REQUIRE(b.runs.size() == 4);
    for (const RunReport& r : b.runs) {
        CHECK(r.status == SolveStatus::Error);
        CHECK(r.message.find("boom") != std::string::npos);
        CHECK(r.message.find("scenario") != std::string::npos);
        CHECK_FALSE(r.objective);
    }
    CHECK(b.summary[0].unsolved == 2);
}
