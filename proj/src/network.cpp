#include "ots/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ots/text_util.hpp"

namespace ots {

PowerNetwork::PowerNetwork(std::vector<Bus> buses, std::vector<Generator> generators,
                           std::vector<Line> lines, double base_mva)
    : buses_(std::move(buses)),
      generators_(std::move(generators)),
      lines_(std::move(lines)),
      base_mva_(base_mva) {
    if (!(base_mva_ > 0.0) || !std::isfinite(base_mva_)) throw NetworkError("base MVA must be positive");
    if (buses_.size() < 2) throw NetworkError("a network needs at least two buses");

    std::sort(buses_.begin(), buses_.end(), [](const Bus& a, const Bus& b) { return a.id < b.id; });
    int references = 0;
    for (std::size_t i = 0; i < buses_.size(); ++i) {
        const Bus& b = buses_[i];
        if (!bus_pos_.emplace(b.id, i).second) throw NetworkError("duplicate bus " + std::to_string(b.id));
        if (!(b.baseline_demand >= 0.0) || !std::isfinite(b.baseline_demand))
            throw NetworkError("bus " + std::to_string(b.id) + " has negative demand");
        if (b.is_reference) ++references;
    }
    if (references > 1) throw NetworkError("more than one reference bus");
    if (references == 0) buses_.front().is_reference = true;
    for (const Bus& b : buses_)
        if (b.is_reference) reference_bus_ = b.id;

    std::set<GenId> gen_ids;
    for (const Generator& g : generators_) {
        const std::string tag = "generator " + std::to_string(g.id);
        if (!gen_ids.insert(g.id).second) throw NetworkError("duplicate " + tag);
        if (!has_bus(g.bus)) throw NetworkError(tag + " references unknown bus " + std::to_string(g.bus));
        if (!(g.p_min >= 0.0 && g.p_min <= g.p_max) || !std::isfinite(g.p_max))
            throw NetworkError(tag + " violates 0 <= p_min <= p_max");
        if (!(g.marginal_cost >= 0.0) || !std::isfinite(g.marginal_cost))
            throw NetworkError(tag + " has negative marginal cost");
    }

    for (std::size_t i = 0; i < lines_.size(); ++i) {
        const Line& l = lines_[i];
        const std::string tag = "line " + std::to_string(l.id);
        if (!line_pos_.emplace(l.id, i).second) throw NetworkError("duplicate " + tag);
        if (!has_bus(l.from_bus)) throw NetworkError(tag + " references unknown bus " + std::to_string(l.from_bus));
        if (!has_bus(l.to_bus)) throw NetworkError(tag + " references unknown bus " + std::to_string(l.to_bus));
        if (l.from_bus == l.to_bus) throw NetworkError(tag + " connects bus " + std::to_string(l.from_bus) + " to itself");
        if (!(l.susceptance > 0.0) || !std::isfinite(l.susceptance))
            throw NetworkError(tag + " has nonpositive susceptance");
        if (!(l.capacity > 0.0) || !std::isfinite(l.capacity))
            throw NetworkError(tag + " has nonpositive capacity");
    }

    const auto ids = line_ids();
    std::set<LineId> all(ids.begin(), ids.end());
    if (!lines_connect_all_buses(*this, all)) throw NetworkError("network is disconnected");
}

const Bus& PowerNetwork::bus(BusId id) const { return buses_[bus_index(id)]; }

std::size_t PowerNetwork::bus_index(BusId id) const {
    auto it = bus_pos_.find(id);
    if (it == bus_pos_.end()) throw NetworkError("unknown bus " + std::to_string(id));
    return it->second;
}

const Line& PowerNetwork::line(LineId id) const {
    auto it = line_pos_.find(id);
    if (it == line_pos_.end()) throw NetworkError("unknown line " + std::to_string(id));
    return lines_[it->second];
}

std::set<LineId> PowerNetwork::reference_lines() const {
    std::set<LineId> out;
    for (const Line& l : lines_)
        if (l.from_bus == reference_bus_ || l.to_bus == reference_bus_) out.insert(l.id);
    return out;
}

std::vector<LineId> PowerNetwork::line_ids() const {
    std::vector<LineId> ids;
    ids.reserve(lines_.size());
    for (const Line& l : lines_) ids.push_back(l.id);
    return ids;
}

std::vector<const Generator*> PowerNetwork::generators_at(BusId bus) const {
    std::vector<const Generator*> out;
    for (const Generator& g : generators_)
        if (g.bus == bus) out.push_back(&g);
    return out;
}

bool lines_connect_all_buses(const PowerNetwork& network, const std::set<LineId>& closed) {
    std::map<BusId, BusId> parent;
    for (const Bus& b : network.buses()) parent[b.id] = b.id;
    auto find = [&](BusId v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    std::size_t components = parent.size();
    for (LineId id : closed) {
        const Line& l = network.line(id);
        BusId a = find(l.from_bus);
        BusId b = find(l.to_bus);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components == 1;
}

// ---------------------------------------------------------------------------
// MATPOWER subset parser

namespace {

struct Row {
    std::vector<double> values;
    std::size_t line;
};

struct CaseTables {
    std::optional<double> base_mva;
    std::map<std::string, std::vector<Row>> matrices;
    std::size_t last_line = 0;
};

std::string strip_comment(const std::string& line) {
    bool in_quote = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '\'') in_quote = !in_quote;
        if (line[i] == '%' && !in_quote) return line.substr(0, i);
    }
    return line;
}

CaseTables tokenize_case(std::string_view text) {
    CaseTables tables;
    auto lines = split_lines(text);
    tables.last_line = lines.size();

    enum class State { Top, Matrix, Skip } state = State::Top;
    std::string matrix_name;
    std::vector<Row>* rows = nullptr;
    Row current;

    auto finish_row = [&] {
        if (!current.values.empty()) rows->push_back(std::move(current));
        current = Row{};
    };

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        std::string line = trim(strip_comment(lines[i]));

        if (state == State::Skip) {
            if (line.find('}') != std::string::npos) state = State::Top;
            continue;
        }
        if (state == State::Top) {
            if (line.empty()) continue;
            if (line.rfind("function", 0) == 0) continue;
            if (line.rfind("mpc.", 0) != 0) throw CaseParseError(line_no, "unexpected statement '" + line + "'");
            auto eq = line.find('=');
            if (eq == std::string::npos) throw CaseParseError(line_no, "expected '=' in assignment");
            std::string name = trim(line.substr(4, eq - 4));
            std::string rest = trim(line.substr(eq + 1));
            if (rest.empty()) throw CaseParseError(line_no, "missing value for mpc." + name);
            if (rest.front() == '[') {
                if (tables.matrices.contains(name)) throw CaseParseError(line_no, "mpc." + name + " defined twice");
                matrix_name = name;
                rows = &tables.matrices[name];
                current = Row{{}, line_no};
                state = State::Matrix;
                line = rest.substr(1);
            } else if (rest.front() == '{') {
                if (rest.find('}') == std::string::npos) state = State::Skip;
                continue;
            } else if (name == "baseMVA") {
                if (rest.back() == ';') rest.pop_back();
                try {
                    tables.base_mva = parse_double(trim(rest));
                } catch (const std::invalid_argument&) {
                    throw CaseParseError(line_no, "invalid baseMVA '" + rest + "'");
                }
                continue;
            } else {
                continue;  // version string and other scalars
            }
        }

        // Inside a matrix: numbers, ';' or newline end a row, ']' ends the matrix.
        std::size_t pos = 0;
        if (current.values.empty()) current.line = line_no;
        while (pos < line.size()) {
            char c = line[pos];
            if (c == ' ' || c == '\t' || c == ',') {
                ++pos;
            } else if (c == ';') {
                finish_row();
                current.line = line_no;
                ++pos;
            } else if (c == ']') {
                finish_row();
                state = State::Top;
                std::string tail = trim(line.substr(pos + 1));
                if (!tail.empty() && tail != ";")
                    throw CaseParseError(line_no, "unexpected text after ']' in mpc." + matrix_name);
                break;
            } else {
                std::size_t end = line.find_first_of(" \t,;]", pos);
                std::string token = line.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
                try {
                    current.values.push_back(parse_double(token));
                } catch (const std::invalid_argument&) {
                    throw CaseParseError(line_no, "invalid number '" + token + "' in mpc." + matrix_name);
                }
                pos = end == std::string::npos ? line.size() : end;
            }
        }
        if (state == State::Matrix) {
            finish_row();
            current.line = line_no + 1;
        }
    }
    if (state == State::Matrix)
        throw CaseParseError(tables.last_line, "unterminated matrix mpc." + matrix_name);
    return tables;
}

const std::vector<Row>& require_matrix(const CaseTables& t, const std::string& name, std::size_t min_cols) {
    auto it = t.matrices.find(name);
    if (it == t.matrices.end()) throw CaseParseError(t.last_line, "missing matrix mpc." + name);
    for (const Row& r : it->second)
        if (r.values.size() < min_cols)
            throw CaseParseError(r.line, "mpc." + name + " row has " + std::to_string(r.values.size()) +
                                             " columns, expected at least " + std::to_string(min_cols));
    return it->second;
}

int as_id(const Row& r, std::size_t col, const std::string& what) {
    double v = r.values[col];
    if (v != std::floor(v) || std::abs(v) > 1e9) throw CaseParseError(r.line, what + " must be an integer");
    return static_cast<int>(v);
}

}  // namespace

PowerNetwork parse_case(std::string_view text) {
    CaseTables t = tokenize_case(text);
    double base_mva = t.base_mva.value_or(100.0);

    // bus_i type Pd ...
    std::vector<Bus> buses;
    for (const Row& r : require_matrix(t, "bus", 3)) {
        int type = as_id(r, 1, "bus type");
        if (type == 4) throw NetworkError("bus " + std::to_string(as_id(r, 0, "bus id")) + " is isolated (type 4)");
        buses.push_back({as_id(r, 0, "bus id"), r.values[2], type == 3});
    }

    // bus Pg Qg Qmax Qmin Vg mBase status Pmax Pmin ...
    const auto& gen_rows = require_matrix(t, "gen", 10);
    auto gc = t.matrices.find("gencost");
    if (gc == t.matrices.end()) throw CaseParseError(t.last_line, "missing matrix mpc.gencost");
    if (gc->second.size() < gen_rows.size())
        throw CaseParseError(t.last_line, "mpc.gencost has fewer rows than mpc.gen");
    std::vector<Generator> generators;
    for (std::size_t i = 0; i < gen_rows.size(); ++i) {
        const Row& r = gen_rows[i];
        const Row& c = gc->second[i];
        if (c.values.size() < 4) throw CaseParseError(c.line, "mpc.gencost row is too short");
        int model = as_id(c, 0, "cost model");
        int ncost = as_id(c, 3, "cost term count");
        if (model != 2) throw NetworkError("generator " + std::to_string(i + 1) + ": only polynomial costs are supported");
        if (ncost < 1 || c.values.size() < 4 + static_cast<std::size_t>(ncost))
            throw CaseParseError(c.line, "mpc.gencost row has too few coefficients");
        // coefficients are listed from the highest order down to c0
        double linear = 0.0;
        for (int k = 0; k < ncost; ++k) {
            int order = ncost - 1 - k;
            double coef = c.values[4 + k];
            if (order >= 2 && coef != 0.0)
                throw NetworkError("generator " + std::to_string(i + 1) +
                                   ": nonlinear cost terms are not supported");
            if (order == 1) linear = coef;
        }
        if (r.values[7] <= 0.0) continue;  // out of service
        generators.push_back({static_cast<GenId>(generators.size() + 1), as_id(r, 0, "generator bus"), r.values[9],
                              r.values[8], linear});
    }

    // fbus tbus r x b rateA rateB rateC ratio angle status ...
    std::vector<Line> lines;
    for (const Row& r : require_matrix(t, "branch", 11)) {
        if (r.values[10] <= 0.0) continue;
        LineId id = static_cast<LineId>(lines.size() + 1);
        double x = r.values[3];
        if (!(x > 0.0)) throw NetworkError("line " + std::to_string(id) + " has nonpositive susceptance (x = " + format_double(x) + ")");
        if (r.values[9] != 0.0) throw NetworkError("line " + std::to_string(id) + ": phase shifters are not supported");
        lines.push_back({id, as_id(r, 0, "branch from bus"), as_id(r, 1, "branch to bus"), base_mva / x, r.values[5]});
    }
    return PowerNetwork(std::move(buses), std::move(generators), std::move(lines), base_mva);
}

PowerNetwork load_case(const std::filesystem::path& path) { return parse_case(read_file(path)); }

namespace {

// Reactance that maps back to exactly `susceptance` under base / x.
double reactance_for(double base, double susceptance) {
    double x = base / susceptance;
    if (base / x == susceptance) return x;
    double lo = x, hi = x;
    for (int i = 0; i < 8; ++i) {
        lo = std::nextafter(lo, 0.0);
        hi = std::nextafter(hi, kInfinity);
        if (base / lo == susceptance) return lo;
        if (base / hi == susceptance) return hi;
    }
    return x;
}

}  // namespace

std::string write_case(const PowerNetwork& network) {
    std::ostringstream out;
    out << "function mpc = ots_case\n"
        << "mpc.version = '2';\n"
        << "mpc.baseMVA = " << format_double(network.base_mva()) << ";\n\n"
        << "%\tbus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone\tVmax\tVmin\n"
        << "mpc.bus = [\n";
    for (const Bus& b : network.buses())
        out << "\t" << b.id << "\t" << (b.is_reference ? 3 : 1) << "\t" << format_double(b.baseline_demand)
            << "\t0\t0\t0\t1\t1\t0\t0\t1\t1.1\t0.9;\n";
    out << "];\n\n%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin\n"
        << "mpc.gen = [\n";
    for (const Generator& g : network.generators())
        out << "\t" << g.bus << "\t0\t0\t0\t0\t1\t" << format_double(network.base_mva()) << "\t1\t"
            << format_double(g.p_max) << "\t" << format_double(g.p_min) << ";\n";
    out << "];\n\n%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\tangmin\tangmax\n"
        << "mpc.branch = [\n";
    for (const Line& l : network.lines())
        out << "\t" << l.from_bus << "\t" << l.to_bus << "\t0\t"
            << format_double(reactance_for(network.base_mva(), l.susceptance)) << "\t0\t"
            << format_double(l.capacity) << "\t0\t0\t0\t0\t1\t-360\t360;\n";
    out << "];\n\n%\t2\tstartup\tshutdown\tn\tc1\tc0\n"
        << "mpc.gencost = [\n";
    for (const Generator& g : network.generators())
        out << "\t2\t0\t0\t2\t" << format_double(g.marginal_cost) << "\t0;\n";
    out << "];\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Scenarios

std::vector<DemandScenario> sample_scenarios(const PowerNetwork& network, int count, std::uint64_t seed) {
    if (count < 0) throw std::invalid_argument("scenario count must be nonnegative");
    std::mt19937_64 rng(seed);
    std::vector<DemandScenario> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int s = 0; s < count; ++s) {
        DemandScenario scenario{s, {}};
        for (const Bus& b : network.buses()) {
            // 53 random bits -> [0, 1), independent of the standard library's
            // distribution implementations
            double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            scenario.demand[b.id] = b.baseline_demand * (0.9 + 0.2 * u);
        }
        out.push_back(std::move(scenario));
    }
    return out;
}

DemandScenario baseline_scenario(const PowerNetwork& network) {
    DemandScenario s{0, {}};
    for (const Bus& b : network.buses()) s.demand[b.id] = b.baseline_demand;
    return s;
}

std::string write_scenarios_csv(const std::vector<DemandScenario>& scenarios) {
    std::string out = "scenario_id,bus_id,demand_mw\n";
    for (const DemandScenario& s : scenarios)
        for (auto [bus, mw] : s.demand)
            out += std::to_string(s.scenario_id) + "," + std::to_string(bus) + "," + format_double(mw) + "\n";
    return out;
}

std::vector<DemandScenario> parse_scenarios_csv(std::string_view text, const PowerNetwork& network) {
    std::map<int, DemandScenario> by_id;
    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string line = trim(lines[i]);
        if (line.empty()) continue;
        if (i == 0) {
            if (line != "scenario_id,bus_id,demand_mw")
                throw CaseParseError(1, "scenario CSV must start with 'scenario_id,bus_id,demand_mw'");
            continue;
        }
        auto f = split(line, ',');
        if (f.size() != 3) throw CaseParseError(i + 1, "expected 3 fields");
        int sid = 0;
        BusId bus = 0;
        double mw = 0.0;
        try {
            sid = parse_int(f[0]);
            bus = parse_int(f[1]);
            mw = parse_double(f[2]);
        } catch (const std::invalid_argument& err) {
            throw CaseParseError(i + 1, err.what());
        }
        if (!network.has_bus(bus)) throw NetworkError("scenario " + std::to_string(sid) + " references unknown bus " + std::to_string(bus));
        if (!(mw >= 0.0)) throw NetworkError("scenario " + std::to_string(sid) + " has negative demand at bus " + std::to_string(bus));
        auto& s = by_id[sid];
        s.scenario_id = sid;
        if (!s.demand.emplace(bus, mw).second)
            throw CaseParseError(i + 1, "duplicate demand for bus " + std::to_string(bus));
    }
    std::vector<DemandScenario> out;
    for (auto& [sid, s] : by_id) {
        if (s.demand.size() != network.buses().size())
            throw NetworkError("scenario " + std::to_string(sid) + " does not cover every bus");
        out.push_back(std::move(s));
    }
    return out;
}

WeightedMultigraph to_multigraph(const PowerNetwork& network) {
    WeightedMultigraph g;
    for (const Bus& b : network.buses()) g.add_vertex(b.id);
    for (const Line& l : network.lines()) g.add_edge({l.id, l.from_bus, l.to_bus, l.capacity / l.susceptance});
    return g;
}

}  // namespace ots
