#ifndef OTS_MILP_MODEL_HPP
#define OTS_MILP_MODEL_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ots {

enum class VarKind { Continuous, Binary };
enum class Sense { LessEqual, Equal, GreaterEqual };
enum class ObjSense { Minimize, Maximize };

struct Variable {
    std::string name;
    VarKind kind;
    double lower;
    double upper;
    bool operator==(const Variable&) const = default;
};

struct Term {
    int var;
    double coef;
    bool operator==(const Term&) const = default;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Sense sense;
    double rhs;
    bool operator==(const Constraint&) const = default;
};

struct Violation {
    std::string what;  // constraint or variable name
    double amount;
};

class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Solver-agnostic linear model. Binary variables carry bounds inside
/// {0, 1}; a lower bound of 1 fixes the variable.
class MilpModel {
public:
    int add_variable(const std::string& name, VarKind kind, double lower, double upper);
    void add_constraint(const std::string& name, std::vector<Term> terms, Sense sense, double rhs);
    void set_objective(ObjSense sense, std::vector<Term> terms);
    void set_bounds(int var, double lower, double upper);
    void set_warm_start(std::vector<double> values);
    void clear_warm_start() { warm_start_.reset(); }

    [[nodiscard]] const std::vector<Variable>& variables() const { return variables_; }
    [[nodiscard]] const std::vector<Constraint>& constraints() const { return constraints_; }
    [[nodiscard]] ObjSense objective_sense() const { return objective_sense_; }
    [[nodiscard]] const std::vector<Term>& objective() const { return objective_; }
    [[nodiscard]] const std::optional<std::vector<double>>& warm_start() const { return warm_start_; }

    [[nodiscard]] std::size_t num_variables() const { return variables_.size(); }
    [[nodiscard]] std::size_t num_binaries() const;
    [[nodiscard]] bool has_variable(std::string_view name) const;
    [[nodiscard]] int variable_index(std::string_view name) const;
    [[nodiscard]] const Constraint& constraint(std::string_view name) const;

    [[nodiscard]] double objective_value(const std::vector<double>& values) const;
    /// Bound, integrality and row violations above `tol`. Row residuals are
    /// compared against tol * max(1, |rhs|, largest |coef * value|).
    [[nodiscard]] std::vector<Violation> violations(const std::vector<double>& values, double tol = 1e-6) const;
    [[nodiscard]] bool is_feasible(const std::vector<double>& values, double tol = 1e-6) const {
        return violations(values, tol).empty();
    }

    /// Values by variable name; names absent from the map get `fill`.
    [[nodiscard]] std::vector<double> assignment(const std::map<std::string, double>& by_name, double fill = 0.0) const;
    [[nodiscard]] std::map<std::string, double> named_values(const std::vector<double>& values) const;

    /// Structural equality (warm start ignored).
    bool operator==(const MilpModel& other) const {
        return variables_ == other.variables_ && constraints_ == other.constraints_ &&
               objective_sense_ == other.objective_sense_ && objective_ == other.objective_;
    }

private:
    void check_terms(const std::vector<Term>& terms, const std::string& where) const;

    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
    std::map<std::string, int, std::less<>> var_index_;
    std::map<std::string, std::size_t, std::less<>> con_index_;
    ObjSense objective_sense_ = ObjSense::Minimize;
    std::vector<Term> objective_;
    std::optional<std::vector<double>> warm_start_;
};

/// CPLEX LP text format. Every variable is listed in the Bounds section in
/// declaration order, so read_lp(write_lp(m)) == m.
std::string write_lp(const MilpModel& model);
MilpModel read_lp(std::string_view text);

}  // namespace ots

#endif  // OTS_MILP_MODEL_HPP
