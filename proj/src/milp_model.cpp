#include "ots/milp_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include "ots/text_util.hpp"

namespace ots {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool valid_name(std::string_view name) {
    if (name.empty() || std::isdigit(static_cast<unsigned char>(name.front()))) return false;
    return std::all_of(name.begin(), name.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; });
}

}  // namespace

int MilpModel::add_variable(const std::string& name, VarKind kind, double lower, double upper) {
    if (!valid_name(name)) throw ModelError("invalid variable name '" + name + "'");
    if (var_index_.contains(name)) throw ModelError("duplicate variable '" + name + "'");
    if (std::isnan(lower) || std::isnan(upper) || lower > upper)
        throw ModelError("variable '" + name + "' has empty bounds");
    if (kind == VarKind::Binary &&
        !((lower == 0.0 || lower == 1.0) && (upper == 0.0 || upper == 1.0)))
        throw ModelError("binary variable '" + name + "' must have bounds in {0, 1}");
    int id = static_cast<int>(variables_.size());
    variables_.push_back({name, kind, lower, upper});
    var_index_.emplace(name, id);
    return id;
}

void MilpModel::check_terms(const std::vector<Term>& terms, const std::string& where) const {
    for (const Term& t : terms) {
        if (t.var < 0 || t.var >= static_cast<int>(variables_.size()))
            throw ModelError(where + " references undeclared variable " + std::to_string(t.var));
        if (!std::isfinite(t.coef)) throw ModelError(where + " has a non-finite coefficient");
    }
}

void MilpModel::add_constraint(const std::string& name, std::vector<Term> terms, Sense sense, double rhs) {
    if (!valid_name(name)) throw ModelError("invalid constraint name '" + name + "'");
    if (con_index_.contains(name)) throw ModelError("duplicate constraint '" + name + "'");
    if (terms.empty()) throw ModelError("constraint '" + name + "' has no terms");
    if (!std::isfinite(rhs)) throw ModelError("constraint '" + name + "' has a non-finite right-hand side");
    check_terms(terms, "constraint '" + name + "'");
    con_index_.emplace(name, constraints_.size());
    constraints_.push_back({name, std::move(terms), sense, rhs});
}

void MilpModel::set_objective(ObjSense sense, std::vector<Term> terms) {
    check_terms(terms, "objective");
    objective_sense_ = sense;
    objective_ = std::move(terms);
}

void MilpModel::set_bounds(int var, double lower, double upper) {
    Variable& v = variables_.at(static_cast<std::size_t>(var));
    if (lower > upper) throw ModelError("variable '" + v.name + "' has empty bounds");
    if (v.kind == VarKind::Binary && !((lower == 0.0 || lower == 1.0) && (upper == 0.0 || upper == 1.0)))
        throw ModelError("binary variable '" + v.name + "' must have bounds in {0, 1}");
    v.lower = lower;
    v.upper = upper;
}

void MilpModel::set_warm_start(std::vector<double> values) {
    if (values.size() != variables_.size()) throw ModelError("warm start must cover every variable");
    warm_start_ = std::move(values);
}

std::size_t MilpModel::num_binaries() const {
    return static_cast<std::size_t>(
        std::count_if(variables_.begin(), variables_.end(), [](const Variable& v) { return v.kind == VarKind::Binary; }));
}

bool MilpModel::has_variable(std::string_view name) const { return var_index_.find(name) != var_index_.end(); }

int MilpModel::variable_index(std::string_view name) const {
    auto it = var_index_.find(name);
    if (it == var_index_.end()) throw ModelError("unknown variable '" + std::string(name) + "'");
    return it->second;
}

const Constraint& MilpModel::constraint(std::string_view name) const {
    auto it = con_index_.find(name);
    if (it == con_index_.end()) throw ModelError("unknown constraint '" + std::string(name) + "'");
    return constraints_[it->second];
}

double MilpModel::objective_value(const std::vector<double>& values) const {
    double total = 0.0;
    for (const Term& t : objective_) total += t.coef * values.at(static_cast<std::size_t>(t.var));
    return total;
}

std::vector<Violation> MilpModel::violations(const std::vector<double>& values, double tol) const {
    if (values.size() != variables_.size()) throw ModelError("value vector does not match the model");
    std::vector<Violation> out;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        const Variable& v = variables_[i];
        double x = values[i];
        if (!std::isfinite(x)) {
            out.push_back({v.name, kInf});
            continue;
        }
        double scale = std::max(1.0, std::abs(x));
        if (x < v.lower - tol * scale) out.push_back({v.name, v.lower - x});
        if (x > v.upper + tol * scale) out.push_back({v.name, x - v.upper});
        if (v.kind == VarKind::Binary && std::abs(x - std::round(x)) > tol)
            out.push_back({v.name + " (integrality)", std::abs(x - std::round(x))});
    }
    for (const Constraint& c : constraints_) {
        double activity = 0.0;
        double scale = std::max(1.0, std::abs(c.rhs));
        for (const Term& t : c.terms) {
            double contribution = t.coef * values[static_cast<std::size_t>(t.var)];
            activity += contribution;
            scale = std::max(scale, std::abs(contribution));
        }
        double excess = 0.0;
        if (c.sense != Sense::GreaterEqual) excess = std::max(excess, activity - c.rhs);
        if (c.sense != Sense::LessEqual) excess = std::max(excess, c.rhs - activity);
        if (excess > tol * scale) out.push_back({c.name, excess});
    }
    return out;
}

std::vector<double> MilpModel::assignment(const std::map<std::string, double>& by_name, double fill) const {
    std::vector<double> out(variables_.size(), fill);
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        auto it = by_name.find(variables_[i].name);
        if (it != by_name.end()) out[i] = it->second;
    }
    return out;
}

std::map<std::string, double> MilpModel::named_values(const std::vector<double>& values) const {
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < variables_.size() && i < values.size(); ++i) out[variables_[i].name] = values[i];
    return out;
}

// ---------------------------------------------------------------------------
// LP format

namespace {

void write_terms(std::ostringstream& out, const MilpModel& m, const std::vector<Term>& terms) {
    bool first = true;
    for (const Term& t : terms) {
        double c = t.coef;
        bool negative = std::signbit(c);
        if (first) {
            if (negative) out << " -";
        } else {
            out << (negative ? " -" : " +");
        }
        out << " " << format_double(std::abs(c)) << " " << m.variables()[static_cast<std::size_t>(t.var)].name;
        first = false;
    }
}

const char* sense_text(Sense s) {
    switch (s) {
        case Sense::LessEqual: return "<=";
        case Sense::Equal: return "=";
        case Sense::GreaterEqual: return ">=";
    }
    return "=";
}

std::vector<std::string> tokenize_lp_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '<' || c == '>' || c == '=') {
            std::string op(1, c);
            if (i + 1 < line.size() && line[i + 1] == '=') {
                op += '=';
                ++i;
            }
            if (op == "=<") op = "<=";
            if (op == "=>") op = ">=";
            if (op == "<") op = "<=";
            if (op == ">") op = ">=";
            out.push_back(op);
            ++i;
        } else if (c == '+' || c == '-' || c == ':') {
            out.emplace_back(1, c);
            ++i;
        } else {
            std::size_t j = i;
            while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
                   std::string_view("<>=:+").find(line[j]) == std::string_view::npos &&
                   !(line[j] == '-' && j > i && line[j - 1] != 'e' && line[j - 1] != 'E'))
                ++j;
            out.push_back(line.substr(i, j - i));
            i = j;
        }
    }
    return out;
}

bool is_number(const std::string& s) {
    try {
        parse_double(s);
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

// Parses "[name:] [+|-] [coef] var ..." into named terms. Stops at a sense
// operator and returns its position.
std::size_t parse_linear(const std::vector<std::string>& tok, std::size_t pos,
                         std::vector<std::pair<std::string, double>>& terms, std::size_t line_no) {
    double sign = 1.0;
    std::optional<double> coef;
    while (pos < tok.size()) {
        const std::string& t = tok[pos];
        if (t == "<=" || t == ">=" || t == "=") return pos;
        if (t == "+") {
            sign = 1.0;
        } else if (t == "-") {
            sign = -sign;
        } else if (is_number(t) && !coef) {
            coef = parse_double(t);
        } else {
            terms.emplace_back(t, sign * coef.value_or(1.0));
            sign = 1.0;
            coef.reset();
        }
        ++pos;
    }
    if (coef) throw ModelError("line " + std::to_string(line_no) + ": dangling coefficient");
    return pos;
}

}  // namespace

std::string write_lp(const MilpModel& model) {
    std::ostringstream out;
    out << (model.objective_sense() == ObjSense::Minimize ? "Minimize\n" : "Maximize\n") << " obj:";
    write_terms(out, model, model.objective());
    out << "\nSubject To\n";
    for (const Constraint& c : model.constraints()) {
        out << " " << c.name << ":";
        write_terms(out, model, c.terms);
        out << " " << sense_text(c.sense) << " " << format_double(c.rhs) << "\n";
    }
    out << "Bounds\n";
    for (const Variable& v : model.variables()) {
        if (v.lower == -kInf && v.upper == kInf)
            out << " " << v.name << " free\n";
        else
            out << " " << format_double(v.lower) << " <= " << v.name << " <= " << format_double(v.upper) << "\n";
    }
    bool any_binary = false;
    for (const Variable& v : model.variables()) {
        if (v.kind != VarKind::Binary) continue;
        if (!any_binary) out << "Binaries\n";
        any_binary = true;
        out << " " << v.name << "\n";
    }
    out << "End\n";
    return out.str();
}

MilpModel read_lp(std::string_view text) {
    enum class Section { None, Objective, Constraints, Bounds, Binaries, End } section = Section::None;
    ObjSense obj_sense = ObjSense::Minimize;
    std::vector<std::pair<std::string, double>> obj_terms;
    struct RawRow {
        std::string name;
        std::vector<std::pair<std::string, double>> terms;
        Sense sense;
        double rhs;
    };
    std::vector<RawRow> rows;
    std::vector<std::string> order;
    std::map<std::string, std::pair<double, double>> bounds;
    std::set<std::string> binaries;

    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        std::string line = lines[i];
        if (auto c = line.find('\\'); c != std::string::npos) line.resize(c);
        line = trim(line);
        if (line.empty()) continue;
        std::string lower = line;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (lower == "minimize" || lower == "min") {
            section = Section::Objective;
            obj_sense = ObjSense::Minimize;
            continue;
        }
        if (lower == "maximize" || lower == "max") {
            section = Section::Objective;
            obj_sense = ObjSense::Maximize;
            continue;
        }
        if (lower == "subject to" || lower == "st" || lower == "s.t.") {
            section = Section::Constraints;
            continue;
        }
        if (lower == "bounds") {
            section = Section::Bounds;
            continue;
        }
        if (lower == "binaries" || lower == "binary" || lower == "bin") {
            section = Section::Binaries;
            continue;
        }
        if (lower == "end") {
            section = Section::End;
            continue;
        }

        auto tok = tokenize_lp_line(line);
        std::size_t pos = 0;
        std::string name;
        if (tok.size() >= 2 && tok[1] == ":") {
            name = tok[0];
            pos = 2;
        }
        switch (section) {
            case Section::Objective: {
                parse_linear(tok, pos, obj_terms, line_no);
                break;
            }
            case Section::Constraints: {
                RawRow row;
                row.name = name.empty() ? "r" + std::to_string(rows.size() + 1) : name;
                pos = parse_linear(tok, pos, row.terms, line_no);
                std::string rhs;
                for (std::size_t k = pos + 1; k < tok.size(); ++k) rhs += tok[k];
                if (pos >= tok.size() || !is_number(rhs))
                    throw ModelError("line " + std::to_string(line_no) + ": malformed constraint");
                row.sense = tok[pos] == "<=" ? Sense::LessEqual : tok[pos] == ">=" ? Sense::GreaterEqual : Sense::Equal;
                row.rhs = parse_double(rhs);
                rows.push_back(std::move(row));
                break;
            }
            case Section::Bounds: {
                auto note = [&](const std::string& v) {
                    if (!bounds.contains(v)) {
                        order.push_back(v);
                        bounds[v] = {0.0, kInf};
                    }
                    return &bounds[v];
                };
                // "-1 <= x <= 1" arrives as [-, 1, <=, x, <=, 1]; fold signs.
                std::vector<std::string> t;
                for (std::size_t k = 0; k < tok.size(); ++k) {
                    if ((tok[k] == "-" || tok[k] == "+") && k + 1 < tok.size() && is_number(tok[k + 1])) {
                        t.push_back(tok[k] + tok[k + 1]);
                        ++k;
                    } else {
                        t.push_back(tok[k]);
                    }
                }
                if (t.size() == 2 && t[1] == "free") {
                    *note(t[0]) = {-kInf, kInf};
                } else if (t.size() == 5 && t[1] == "<=" && t[3] == "<=") {
                    *note(t[2]) = {parse_double(t[0]), parse_double(t[4])};
                } else if (t.size() == 3 && is_number(t[0])) {
                    auto* b = note(t[2]);
                    double v = parse_double(t[0]);
                    if (t[1] == "<=") b->first = v;
                    else if (t[1] == ">=") b->second = v;
                    else *b = {v, v};
                } else if (t.size() == 3) {
                    auto* b = note(t[0]);
                    double v = parse_double(t[2]);
                    if (t[1] == "<=") b->second = v;
                    else if (t[1] == ">=") b->first = v;
                    else *b = {v, v};
                } else {
                    throw ModelError("line " + std::to_string(line_no) + ": malformed bound");
                }
                break;
            }
            case Section::Binaries:
                for (const std::string& v : tok) binaries.insert(v);
                break;
            default:
                throw ModelError("line " + std::to_string(line_no) + ": text outside any section");
        }
    }

    auto declare = [&](const std::string& v) {
        if (!bounds.contains(v)) {
            order.push_back(v);
            bounds[v] = {0.0, kInf};
        }
    };
    for (auto& [v, c] : obj_terms) declare(v);
    for (const RawRow& r : rows)
        for (auto& [v, c] : r.terms) declare(v);
    for (const std::string& v : binaries) declare(v);

    MilpModel m;
    for (const std::string& v : order) {
        auto [lo, hi] = bounds[v];
        bool binary = binaries.contains(v);
        if (binary && hi == kInf) hi = 1.0;
        m.add_variable(v, binary ? VarKind::Binary : VarKind::Continuous, lo, hi);
    }
    auto resolve = [&](const std::vector<std::pair<std::string, double>>& raw) {
        std::vector<Term> terms;
        for (auto& [v, c] : raw) terms.push_back({m.variable_index(v), c});
        return terms;
    };
    m.set_objective(obj_sense, resolve(obj_terms));
    for (const RawRow& r : rows) m.add_constraint(r.name, resolve(r.terms), r.sense, r.rhs);
    return m;
}

}  // namespace ots
