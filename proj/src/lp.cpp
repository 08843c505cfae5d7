#include "gridsched/lp.hpp"

#include <cmath>

#include "gridsched/types.hpp"

namespace gridsched {

int LinearProgram::add_variable(double lo, double hi, double cost, std::string name) {
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(hi);
    if (!name.empty() || !variable_names.empty()) {
        variable_names.resize(objective.size());
        variable_names.back() = std::move(name);
    }
    return static_cast<int>(objective.size()) - 1;
}

int LinearProgram::add_row(RowSense sense, double rhs, std::string name) {
    rows.push_back(Row{sense, rhs, {}});
    if (!name.empty() || !row_names.empty()) {
        row_names.resize(rows.size());
        row_names.back() = std::move(name);
    }
    return static_cast<int>(rows.size()) - 1;
}

void LinearProgram::add_entry(int row, int column, double value) {
    if (value == 0.0) return;
    rows[row].entries.push_back(Entry{column, value});
}

std::string LinearProgram::variable_name(int j) const {
    if (j < static_cast<int>(variable_names.size()) && !variable_names[j].empty())
        return variable_names[j];
    return "x" + std::to_string(j);
}

std::string LinearProgram::row_name(int i) const {
    if (i < static_cast<int>(row_names.size()) && !row_names[i].empty())
        return row_names[i];
    return "r" + std::to_string(i);
}

void LinearProgram::check_consistent() const {
    const int n = num_variables();
    if (lower.size() != objective.size() || upper.size() != objective.size())
        throw InvalidParameterError("lp: bound vectors do not match variable count");
    for (int j = 0; j < n; ++j) {
        if (std::isnan(lower[j]) || std::isnan(upper[j]))
            throw InvalidParameterError("lp: NaN bound on variable " + variable_name(j));
        if (lower[j] > upper[j])
            throw InvalidParameterError("lp: inconsistent bounds on " + variable_name(j));
        if (!std::isfinite(objective[j]))
            throw InvalidParameterError("lp: non-finite cost on " + variable_name(j));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!std::isfinite(rows[i].rhs))
            throw InvalidParameterError("lp: non-finite rhs on row " + row_name(static_cast<int>(i)));
        for (const auto& e : rows[i].entries) {
            if (e.column < 0 || e.column >= n)
                throw InvalidParameterError("lp: entry column out of range in row " +
                                            row_name(static_cast<int>(i)));
            if (!std::isfinite(e.value))
                throw InvalidParameterError("lp: non-finite coefficient in row " +
                                            row_name(static_cast<int>(i)));
        }
    }
}

std::string to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "infeasible";
}

}  // namespace gridsched
