#include "gridsched/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <vector>

#include "gridsched/basis_factor.hpp"

namespace gridsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotEligibleTol = 1e-9;
constexpr double kDegenerateStep = 1e-10;

enum class VarState : char { Basic, AtLower, AtUpper, FreeNonbasic };

class Simplex {
public:
    Simplex(const LinearProgram& lp, const SimplexOptions& opts) : lp_(lp), opts_(opts) {
        n_ = lp.num_variables();
        m_ = lp.num_rows();
        total_ = n_ + m_;
        build_columns();
        max_iterations_ = opts.max_iterations > 0
                              ? opts.max_iterations
                              : 20000 + 10L * (n_ + m_);
    }

    LpSolution run(const BasisHint* hint, BasisHint* final_basis);

private:
    const LinearProgram& lp_;
    SimplexOptions opts_;
    int n_ = 0, m_ = 0, total_ = 0;
    long max_iterations_ = 0;

    std::vector<SparseColumn> columns_;  // structural + slack
    std::vector<double> lower_, upper_, cost_;
    std::vector<double> rhs_;

    std::vector<int> basic_;       // basis position -> variable
    std::vector<int> pos_of_;      // variable -> basis position or -1
    std::vector<VarState> state_;
    std::vector<double> x_;

    BasisFactor factor_;
    bool phase1_ = false;
    bool bland_ = false;
    int degenerate_run_ = 0;
    long iterations_ = 0;

    void build_columns();
    bool install_basis(const std::vector<int>& basis);
    void install_slack_basis();
    void set_nonbasic_states();
    void compute_basic_values();
    void refactorize();
    double infeasibility_of(int var) const;
    double total_infeasibility() const;
    void phase_costs(std::vector<double>& cb) const;
    double reduced_cost(int j, const std::vector<double>& y) const;
    LpSolution finish_optimal();
    LpSolution finish_infeasible();
    LpSolution finish_unbounded(int entering);
    [[noreturn]] void fail(const std::string& why) const;
};

void Simplex::build_columns() {
    columns_.assign(total_, {});
    lower_.assign(total_, 0.0);
    upper_.assign(total_, 0.0);
    cost_.assign(total_, 0.0);
    rhs_.assign(m_, 0.0);

    // Structural columns from row-wise storage.
    for (int j = 0; j < n_; ++j) {
        lower_[j] = lp_.lower[j];
        upper_[j] = lp_.upper[j];
        cost_[j] = lp_.objective[j];
    }
    for (int i = 0; i < m_; ++i) {
        const auto& row = lp_.rows[i];
        rhs_[i] = row.rhs;
        for (const auto& e : row.entries) {
            columns_[e.column].index.push_back(i);
            columns_[e.column].value.push_back(e.value);
        }
        // Slack: row activity + slack == rhs.
        int s = n_ + i;
        columns_[s].index.push_back(i);
        columns_[s].value.push_back(1.0);
        switch (row.sense) {
            case RowSense::LessEqual:
                lower_[s] = 0.0;
                upper_[s] = kInf;
                break;
            case RowSense::Equal:
                lower_[s] = 0.0;
                upper_[s] = 0.0;
                break;
            case RowSense::GreaterEqual:
                lower_[s] = -kInf;
                upper_[s] = 0.0;
                break;
        }
    }
}

bool Simplex::install_basis(const std::vector<int>& basis) {
    basic_ = basis;
    pos_of_.assign(total_, -1);
    for (int p = 0; p < m_; ++p) pos_of_[basic_[p]] = p;

    std::vector<SparseColumn> cols(m_);
    for (int p = 0; p < m_; ++p) cols[p] = columns_[basic_[p]];
    return factor_.factor(cols);
}

void Simplex::install_slack_basis() {
    std::vector<int> basis(m_);
    for (int i = 0; i < m_; ++i) basis[i] = n_ + i;
    if (!install_basis(basis)) fail("slack basis factorization failed");
}

void Simplex::set_nonbasic_states() {
    state_.assign(total_, VarState::AtLower);
    x_.assign(total_, 0.0);
    for (int j = 0; j < total_; ++j) {
        if (pos_of_[j] >= 0) {
            state_[j] = VarState::Basic;
            continue;
        }
        if (std::isfinite(lower_[j])) {
            state_[j] = VarState::AtLower;
            x_[j] = lower_[j];
        } else if (std::isfinite(upper_[j])) {
            state_[j] = VarState::AtUpper;
            x_[j] = upper_[j];
        } else {
            state_[j] = VarState::FreeNonbasic;
            x_[j] = 0.0;
        }
    }
}

void Simplex::compute_basic_values() {
    std::vector<double> work = rhs_;
    for (int j = 0; j < total_; ++j) {
        if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
        const auto& col = columns_[j];
        for (std::size_t k = 0; k < col.index.size(); ++k)
            work[col.index[k]] -= col.value[k] * x_[j];
    }
    factor_.ftran(work);
    for (int p = 0; p < m_; ++p) x_[basic_[p]] = work[p];
}

void Simplex::refactorize() {
    std::vector<SparseColumn> cols(m_);
    for (int p = 0; p < m_; ++p) cols[p] = columns_[basic_[p]];
    if (!factor_.factor(cols))
        fail("basis refactorization failed (singular beyond recovery)");
    compute_basic_values();
    for (int p = 0; p < m_; ++p)
        if (!std::isfinite(x_[basic_[p]]))
            fail("non-finite basic values after refactorization");
}

double Simplex::infeasibility_of(int var) const {
    if (x_[var] < lower_[var] - opts_.tol_feas) return lower_[var] - x_[var];
    if (x_[var] > upper_[var] + opts_.tol_feas) return x_[var] - upper_[var];
    return 0.0;
}

double Simplex::total_infeasibility() const {
    double sum = 0.0;
    for (int p = 0; p < m_; ++p) sum += infeasibility_of(basic_[p]);
    return sum;
}

void Simplex::phase_costs(std::vector<double>& cb) const {
    cb.assign(m_, 0.0);
    for (int p = 0; p < m_; ++p) {
        int var = basic_[p];
        if (phase1_) {
            if (x_[var] < lower_[var] - opts_.tol_feas)
                cb[p] = -1.0;
            else if (x_[var] > upper_[var] + opts_.tol_feas)
                cb[p] = 1.0;
        } else {
            cb[p] = cost_[var];
        }
    }
}

double Simplex::reduced_cost(int j, const std::vector<double>& y) const {
    double d = phase1_ ? 0.0 : cost_[j];
    const auto& col = columns_[j];
    for (std::size_t k = 0; k < col.index.size(); ++k)
        d -= y[col.index[k]] * col.value[k];
    return d;
}

LpSolution Simplex::finish_optimal() {
    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.x.assign(x_.begin(), x_.begin() + n_);
    sol.objective_value = 0.0;
    for (int j = 0; j < n_; ++j) sol.objective_value += cost_[j] * x_[j];
    sol.iterations = iterations_;

    // Duals of the final basis under the true objective.
    std::vector<double> cb(m_);
    for (int p = 0; p < m_; ++p) cb[p] = cost_[basic_[p]];
    factor_.btran(cb);
    sol.duals = cb;
    return sol;
}

LpSolution Simplex::finish_infeasible() {
    LpSolution sol;
    sol.status = LpStatus::Infeasible;
    sol.x.assign(x_.begin(), x_.begin() + n_);
    sol.iterations = iterations_;
    sol.duals.assign(m_, 0.0);

    for (int i = 0; i < m_; ++i) {
        double act = 0.0;
        for (const auto& e : lp_.rows[i].entries) act += e.value * x_[e.column];
        double viol = 0.0;
        switch (lp_.rows[i].sense) {
            case RowSense::LessEqual: viol = act - lp_.rows[i].rhs; break;
            case RowSense::GreaterEqual: viol = lp_.rows[i].rhs - act; break;
            case RowSense::Equal: viol = std::abs(act - lp_.rows[i].rhs); break;
        }
        double scale = std::max(1.0, std::abs(lp_.rows[i].rhs));
        if (viol > opts_.tol_feas * scale) sol.infeasible_rows.emplace_back(i, viol);
    }
    for (int j = 0; j < n_; ++j) {
        double viol = infeasibility_of(j);
        if (viol > opts_.tol_feas) sol.infeasible_bounds.emplace_back(j, viol);
    }
    return sol;
}

LpSolution Simplex::finish_unbounded(int entering) {
    LpSolution sol;
    sol.status = LpStatus::Unbounded;
    sol.x.assign(x_.begin(), x_.begin() + n_);
    sol.iterations = iterations_;
    sol.duals.assign(m_, 0.0);
    sol.unbounded_variable = entering < n_ ? entering : -1;
    return sol;
}

void Simplex::fail(const std::string& why) const {
    throw SolverFailureError("simplex: " + why + " after " +
                                 std::to_string(iterations_) + " iterations",
                             iterations_);
}

LpSolution Simplex::run(const BasisHint* hint, BasisHint* final_basis) {
    bool installed = false;
    if (hint != nullptr) {
        bool compatible = static_cast<int>(hint->basic_variables.size()) == m_;
        if (compatible) {
            std::vector<char> seen(total_, 0);
            for (int v : hint->basic_variables) {
                if (v < 0 || v >= total_ || seen[v]) {
                    compatible = false;
                    break;
                }
                seen[v] = 1;
            }
        }
        if (compatible && install_basis(hint->basic_variables)) {
            installed = true;
        } else {
            std::cerr << "gridsched: warm-start basis "
                      << (compatible ? "singular" : "incompatible")
                      << ", falling back to cold start\n";
        }
    }
    if (!installed) install_slack_basis();
    set_nonbasic_states();
    if (installed) {
        for (int v : hint->at_upper_variables) {
            if (v >= 0 && v < total_ && state_[v] == VarState::AtLower &&
                std::isfinite(upper_[v])) {
                state_[v] = VarState::AtUpper;
                x_[v] = upper_[v];
            }
        }
    }
    compute_basic_values();

    phase1_ = total_infeasibility() > opts_.tol_feas;
    bland_ = false;
    degenerate_run_ = 0;

    std::vector<double> y(m_), alpha(m_);
    std::vector<double> scores(total_, 0.0);

    while (true) {
        if (iterations_ > max_iterations_)
            fail("iteration limit " + std::to_string(max_iterations_) + " exceeded");

        // Pricing.
        phase_costs(y);
        factor_.btran(y);

        int entering = -1;
        double best_score = 0.0;
        if (bland_) {
            for (int j = 0; j < total_ && entering < 0; ++j) {
                if (state_[j] == VarState::Basic || lower_[j] == upper_[j]) continue;
                double d = reduced_cost(j, y);
                if ((state_[j] == VarState::AtLower && d < -opts_.tol_opt) ||
                    (state_[j] == VarState::AtUpper && d > opts_.tol_opt) ||
                    (state_[j] == VarState::FreeNonbasic && std::abs(d) > opts_.tol_opt))
                    entering = j;
            }
        } else {
            // Dantzig with a deterministic tie rule: among candidates whose
            // score is within tol_opt of the best, take the lowest index.
            std::fill(scores.begin(), scores.end(), 0.0);
            for (int j = 0; j < total_; ++j) {
                if (state_[j] == VarState::Basic || lower_[j] == upper_[j]) continue;
                double d = reduced_cost(j, y);
                double s = 0.0;
                if (state_[j] == VarState::AtLower && d < -opts_.tol_opt) s = -d;
                else if (state_[j] == VarState::AtUpper && d > opts_.tol_opt) s = d;
                else if (state_[j] == VarState::FreeNonbasic && std::abs(d) > opts_.tol_opt)
                    s = std::abs(d);
                scores[j] = s;
                best_score = std::max(best_score, s);
            }
            if (best_score > 0.0) {
                for (int j = 0; j < total_; ++j) {
                    if (scores[j] > 0.0 && scores[j] >= best_score - opts_.tol_opt) {
                        entering = j;
                        break;
                    }
                }
            }
        }

        if (entering < 0) {
            // No improving candidate at the current factorization. Confirm
            // against a fresh factorization before declaring a result.
            if (factor_.updates_since_factor() > 0) {
                refactorize();
                double infeas = total_infeasibility();
                if (phase1_ && infeas <= opts_.tol_feas) phase1_ = false;
                else if (!phase1_ && infeas > 10.0 * opts_.tol_feas) phase1_ = true;
                continue;
            }
            if (phase1_) {
                if (total_infeasibility() > opts_.tol_feas) return finish_infeasible();
                phase1_ = false;
                continue;
            }
            if (final_basis != nullptr) {
                final_basis->basic_variables = basic_;
                final_basis->at_upper_variables.clear();
                for (int j = 0; j < total_; ++j)
                    if (state_[j] == VarState::AtUpper)
                        final_basis->at_upper_variables.push_back(j);
            }
            return finish_optimal();
        }

        double d_enter = reduced_cost(entering, y);
        int dir;
        if (state_[entering] == VarState::AtLower) dir = 1;
        else if (state_[entering] == VarState::AtUpper) dir = -1;
        else dir = d_enter < 0.0 ? 1 : -1;

        // FTRAN of the entering column.
        std::fill(alpha.begin(), alpha.end(), 0.0);
        {
            const auto& col = columns_[entering];
            for (std::size_t k = 0; k < col.index.size(); ++k)
                alpha[col.index[k]] = col.value[k];
        }
        factor_.ftran(alpha);

        // Ratio test. The entering variable moves by theta*dir; basics move
        // by -theta*dir*alpha. In phase 1 an infeasible basic blocks only at
        // the bound it is approaching from outside.
        double theta_bound = upper_[entering] - lower_[entering];  // inf allowed
        double theta = theta_bound;
        int leave_pos = -1;
        double leave_to = 0.0;
        double best_alpha = 0.0;
        const double tie = bland_ ? 1e-12 : 1e-9;

        for (int p = 0; p < m_; ++p) {
            double a = alpha[p];
            if (std::abs(a) <= kPivotEligibleTol) continue;
            int var = basic_[p];
            double rate = dir * a;  // positive: basic value decreases
            double xv = x_[var];
            double limit = kInf;
            double to = 0.0;
            bool below = xv < lower_[var] - opts_.tol_feas;
            bool above = xv > upper_[var] + opts_.tol_feas;
            if (phase1_ && below) {
                if (rate < 0.0) {  // rising toward its lower bound
                    limit = (xv - lower_[var]) / rate;
                    to = lower_[var];
                }
            } else if (phase1_ && above) {
                if (rate > 0.0) {
                    limit = (xv - upper_[var]) / rate;
                    to = upper_[var];
                }
            } else if (rate > 0.0) {
                if (std::isfinite(lower_[var])) {
                    limit = (xv - lower_[var]) / rate;
                    to = lower_[var];
                }
            } else {
                if (std::isfinite(upper_[var])) {
                    limit = (xv - upper_[var]) / rate;
                    to = upper_[var];
                }
            }
            if (!std::isfinite(limit)) continue;
            limit = std::max(limit, 0.0);

            if (limit < theta - tie) {
                theta = limit;
                leave_pos = p;
                leave_to = to;
                best_alpha = std::abs(a);
            } else if (limit <= theta + tie && leave_pos >= 0) {
                bool better = bland_ ? basic_[p] < basic_[leave_pos]
                                     : std::abs(a) > best_alpha;
                if (better) {
                    theta = std::min(theta, limit);
                    leave_pos = p;
                    leave_to = to;
                    best_alpha = std::abs(a);
                }
            }
        }

        if (!std::isfinite(theta)) {
            if (phase1_) fail("phase-1 direction unbounded (numerical)");
            return finish_unbounded(entering);
        }

        ++iterations_;
        if (opts_.log_iterations && iterations_ % 1000 == 0)
            std::cerr << "iter " << iterations_ << " phase " << (phase1_ ? 1 : 2)
                      << " infeas " << total_infeasibility() << "\n";

        degenerate_run_ = theta <= kDegenerateStep ? degenerate_run_ + 1 : 0;
        if (!bland_ && degenerate_run_ > opts_.degenerate_threshold) bland_ = true;
        if (bland_ && theta > kDegenerateStep) {
            bland_ = false;
            degenerate_run_ = 0;
        }

        if (leave_pos < 0 || theta_bound <= theta + 1e-12) {
            // Bound-to-bound flip of the entering variable.
            double step = theta_bound;
            for (int p = 0; p < m_; ++p)
                if (alpha[p] != 0.0) x_[basic_[p]] -= step * dir * alpha[p];
            x_[entering] += dir * step;
            state_[entering] =
                state_[entering] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
            x_[entering] = state_[entering] == VarState::AtLower ? lower_[entering]
                                                                 : upper_[entering];
            continue;
        }

        // Pivot.
        int leaving = basic_[leave_pos];
        for (int p = 0; p < m_; ++p)
            if (alpha[p] != 0.0) x_[basic_[p]] -= theta * dir * alpha[p];
        x_[entering] = x_[entering] + dir * theta;
        x_[leaving] = leave_to;  // snap exactly onto its bound

        basic_[leave_pos] = entering;
        pos_of_[entering] = leave_pos;
        pos_of_[leaving] = -1;
        state_[entering] = VarState::Basic;
        if (lower_[leaving] == upper_[leaving])
            state_[leaving] = VarState::AtLower;
        else if (leave_to == lower_[leaving])
            state_[leaving] = VarState::AtLower;
        else
            state_[leaving] = VarState::AtUpper;

        bool updated = factor_.update(leave_pos, alpha);
        if (!updated || factor_.updates_since_factor() >= opts_.refactor_interval) {
            refactorize();
        }

        // Phase transition check.
        if (phase1_ && total_infeasibility() <= opts_.tol_feas) phase1_ = false;
    }
}

}  // namespace

LpSolution solve(const LinearProgram& lp, const SimplexOptions& options) {
    return solve_detailed(lp, options, nullptr).solution;
}

LpSolution warm_start_solve(const LinearProgram& lp, const BasisHint& hint,
                            const SimplexOptions& options) {
    return solve_detailed(lp, options, &hint).solution;
}

SolveResult solve_detailed(const LinearProgram& lp, const SimplexOptions& options,
                           const BasisHint* hint) {
    lp.check_consistent();
    Simplex engine(lp, options);
    SolveResult result;
    result.solution = engine.run(hint, &result.final_basis);
    return result;
}

}  // namespace gridsched
