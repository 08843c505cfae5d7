#pragma once

// Linear-program container shared between the model builder and the solver.
// Minimization of c'x subject to row constraints and per-variable bounds.

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridsched {

inline constexpr double kLpInfinity = std::numeric_limits<double>::infinity();

enum class RowSense { LessEqual, Equal, GreaterEqual };

struct LinearProgram {
    struct Entry {
        int column;
        double value;
    };
    struct Row {
        RowSense sense = RowSense::LessEqual;
        double rhs = 0.0;
        std::vector<Entry> entries;
    };

    std::vector<double> objective;       // c, dense
    std::vector<double> lower;           // per-variable lower bound (-inf allowed)
    std::vector<double> upper;           // per-variable upper bound (+inf allowed)
    std::vector<Row> rows;

    std::vector<std::string> variable_names;  // optional, diagnostics only
    std::vector<std::string> row_names;       // optional, diagnostics only

    int add_variable(double lo, double hi, double cost, std::string name = {});
    int add_row(RowSense sense, double rhs, std::string name = {});
    void add_entry(int row, int column, double value);

    int num_variables() const { return static_cast<int>(objective.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }

    std::string variable_name(int j) const;
    std::string row_name(int i) const;

    /// Shape and finiteness checks; throws InvalidParameterError on a
    /// malformed program.
    void check_consistent() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string to_string(LpStatus s);

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective_value = 0.0;
    std::vector<double> duals;           // one per row
    long iterations = 0;

    /// Rows still violated when phase 1 stalls (status == Infeasible):
    /// (row index, violation magnitude).
    std::vector<std::pair<int, double>> infeasible_rows;
    /// Variable bounds still violated at phase-1 exit: (variable index,
    /// violation magnitude).
    std::vector<std::pair<int, double>> infeasible_bounds;
    /// Entering variable proving unboundedness (status == Unbounded).
    int unbounded_variable = -1;
};

/// Basis hint for warm starts: the set of basic variables. Structural
/// variables are 0..n-1; the slack of row r is n + r. Nonbasic variables
/// listed in at_upper_variables start at their upper bound, the rest at
/// their natural bound.
struct BasisHint {
    std::vector<int> basic_variables;
    std::vector<int> at_upper_variables;
};

struct SolverFailureError : std::runtime_error {
    explicit SolverFailureError(const std::string& what, long iterations_run = 0)
        : std::runtime_error(what), iterations(iterations_run) {}
    long iterations;
};

}  // namespace gridsched
