#include "gridsched/basis_factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gridsched {

namespace {

constexpr double kDropTol = 1e-13;
constexpr double kPivotTol = 1e-11;
constexpr double kUpdatePivotTol = 1e-9;
constexpr double kStabilityRatio = 0.01;  // threshold partial pivoting

struct WorkEntry {
    int col;
    double value;
};

}  // namespace

bool BasisFactor::factor(const std::vector<SparseColumn>& cols) {
    m_ = static_cast<int>(cols.size());
    valid_ = false;
    etas_.clear();
    pivot_row_.assign(m_, -1);
    pivot_col_.assign(m_, -1);
    step_of_row_.assign(m_, -1);
    step_of_col_.assign(m_, -1);
    lower_.assign(m_, {});
    upper_rows_.assign(m_, {});
    upper_cols_.assign(m_, {});
    diag_.assign(m_, 0.0);
    if (m_ == 0) {
        valid_ = true;
        return true;
    }

    // Active matrix, row-major, plus column occurrence lists. Occurrence
    // lists may hold stale rows; row_value() is the ground truth.
    std::vector<std::vector<WorkEntry>> rows(m_);
    std::vector<std::vector<int>> col_rows(m_);
    std::vector<int> row_count(m_, 0);
    std::vector<int> col_count(m_, 0);
    std::vector<bool> row_active(m_, true);
    std::vector<bool> col_active(m_, true);

    for (int p = 0; p < m_; ++p) {
        const auto& c = cols[p];
        for (std::size_t k = 0; k < c.index.size(); ++k) {
            if (std::abs(c.value[k]) < kDropTol) continue;
            rows[c.index[k]].push_back(WorkEntry{p, c.value[k]});
            col_rows[p].push_back(c.index[k]);
            ++row_count[c.index[k]];
            ++col_count[p];
        }
    }

    std::vector<int> col_q, row_q;
    for (int c = 0; c < m_; ++c)
        if (col_count[c] == 1) col_q.push_back(c);
    for (int r = 0; r < m_; ++r)
        if (row_count[r] == 1) row_q.push_back(r);

    std::vector<double> acc(m_, 0.0);
    std::vector<bool> acc_set(m_, false);

    auto row_value = [&](int r, int c) -> double {
        for (const auto& e : rows[r])
            if (e.col == c) return e.value;
        return 0.0;
    };

    for (int step = 0; step < m_; ++step) {
        int piv_row = -1, piv_col = -1;
        double piv_val = 0.0;

        // Column singletons: pivoting costs no fill.
        while (!col_q.empty() && piv_col < 0) {
            int c = col_q.back();
            col_q.pop_back();
            if (!col_active[c] || col_count[c] != 1) continue;
            for (int r : col_rows[c]) {
                if (!row_active[r]) continue;
                double v = row_value(r, c);
                if (std::abs(v) > kPivotTol) {
                    piv_row = r;
                    piv_col = c;
                    piv_val = v;
                    break;
                }
            }
        }
        // Row singletons: the pivot row has one entry, so updates touch only
        // the pivot column.
        while (!row_q.empty() && piv_col < 0) {
            int r = row_q.back();
            row_q.pop_back();
            if (!row_active[r] || row_count[r] != 1) continue;
            for (const auto& e : rows[r]) {
                if (col_active[e.col] && std::abs(e.value) > kPivotTol) {
                    piv_row = r;
                    piv_col = e.col;
                    piv_val = e.value;
                    break;
                }
            }
        }
        if (piv_col < 0) {
            // Markowitz-style: cheapest active column, then the stablest row
            // with the fewest entries.
            int best_col = -1;
            for (int c = 0; c < m_; ++c) {
                if (!col_active[c] || col_count[c] == 0) continue;
                if (best_col < 0 || col_count[c] < col_count[best_col]) best_col = c;
            }
            if (best_col < 0) return false;  // structurally singular

            double col_max = 0.0;
            for (int r : col_rows[best_col]) {
                if (!row_active[r]) continue;
                col_max = std::max(col_max, std::abs(row_value(r, best_col)));
            }
            if (col_max <= kPivotTol) return false;

            int best_row = -1;
            double best_val = 0.0;
            for (int r : col_rows[best_col]) {
                if (!row_active[r]) continue;
                double v = row_value(r, best_col);
                if (std::abs(v) < kStabilityRatio * col_max) continue;
                if (best_row < 0 || row_count[r] < row_count[best_row] ||
                    (row_count[r] == row_count[best_row] &&
                     std::abs(v) > std::abs(best_val))) {
                    best_row = r;
                    best_val = v;
                }
            }
            piv_row = best_row;
            piv_col = best_col;
            piv_val = best_val;
        }
        if (piv_row < 0 || std::abs(piv_val) <= kPivotTol) return false;

        pivot_row_[step] = piv_row;
        pivot_col_[step] = piv_col;
        step_of_row_[piv_row] = step;
        step_of_col_[piv_col] = step;
        diag_[step] = piv_val;
        row_active[piv_row] = false;
        col_active[piv_col] = false;
        for (const auto& e : rows[piv_row]) {
            if (!col_active[e.col]) continue;
            if (--col_count[e.col] == 1) col_q.push_back(e.col);
        }

        // Eliminate the pivot column from the remaining active rows.
        for (int r : col_rows[piv_col]) {
            if (!row_active[r]) continue;
            double target = row_value(r, piv_col);
            if (target == 0.0) continue;
            double mult = target / piv_val;
            lower_[step].push_back(LEntry{r, mult});

            // acc = row r - mult * pivot row, over active columns.
            for (const auto& e : rows[r]) {
                if (!col_active[e.col]) continue;
                acc[e.col] = e.value;
                acc_set[e.col] = true;
            }
            for (const auto& e : rows[piv_row]) {
                if (!col_active[e.col]) continue;
                if (!acc_set[e.col]) {
                    acc[e.col] = 0.0;
                    acc_set[e.col] = true;
                    col_rows[e.col].push_back(r);
                }
                acc[e.col] -= mult * e.value;
            }

            std::vector<WorkEntry> fresh;
            fresh.reserve(rows[r].size() + 4);
            for (const auto& e : rows[r]) {
                if (!col_active[e.col]) continue;  // drops the pivot column
                if (!acc_set[e.col]) continue;
                double v = acc[e.col];
                acc_set[e.col] = false;
                if (std::abs(v) < kDropTol) {
                    if (--col_count[e.col] == 1) col_q.push_back(e.col);
                    continue;
                }
                fresh.push_back(WorkEntry{e.col, v});
            }
            for (const auto& e : rows[piv_row]) {
                if (!col_active[e.col] || !acc_set[e.col]) continue;
                double v = acc[e.col];
                acc_set[e.col] = false;
                if (std::abs(v) < kDropTol) continue;  // cancelled fill-in
                fresh.push_back(WorkEntry{e.col, v});
                ++col_count[e.col];
            }
            rows[r] = std::move(fresh);
            row_count[r] = static_cast<int>(rows[r].size());
            if (row_count[r] == 1) row_q.push_back(r);
        }
    }

    // Freeze U in step indexing.
    for (int step = 0; step < m_; ++step) {
        int r = pivot_row_[step];
        for (const auto& e : rows[r]) {
            int cstep = step_of_col_[e.col];
            if (cstep == step) continue;  // diagonal stored separately
            upper_rows_[step].push_back(UEntry{cstep, e.value});
            upper_cols_[cstep].push_back(UEntry{step, e.value});
        }
    }

    valid_ = true;
    return true;
}

void BasisFactor::ftran(std::vector<double>& v) const {
    // L solve, in row indexing.
    for (int step = 0; step < m_; ++step) {
        double t = v[pivot_row_[step]];
        if (t == 0.0) continue;
        for (const auto& e : lower_[step]) v[e.row] -= e.mult * t;
    }
    // U backsolve into step indexing, then scatter to basis positions.
    scratch_.assign(m_, 0.0);
    std::vector<double>& xq = scratch_;
    for (int step = m_ - 1; step >= 0; --step) {
        double s = v[pivot_row_[step]];
        for (const auto& e : upper_rows_[step]) s -= e.value * xq[e.step];
        xq[step] = s / diag_[step];
    }
    for (int step = 0; step < m_; ++step) v[pivot_col_[step]] = xq[step];

    // Product-form updates, forward order.
    for (const auto& eta : etas_) {
        double xp = v[eta.pos] / eta.pivot;
        if (xp != 0.0) {
            for (std::size_t k = 0; k < eta.index.size(); ++k)
                v[eta.index[k]] -= eta.value[k] * xp;
        }
        v[eta.pos] = xp;
    }
}

void BasisFactor::btran(std::vector<double>& v) const {
    // Update etas, transposed, reverse order. Input indexed by basis position.
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        double s = v[it->pos];
        for (std::size_t k = 0; k < it->index.size(); ++k)
            s -= it->value[k] * v[it->index[k]];
        v[it->pos] = s / it->pivot;
    }

    // U' forward solve in step indexing.
    scratch_.assign(m_, 0.0);
    std::vector<double>& w = scratch_;
    for (int step = 0; step < m_; ++step) {
        double s = v[pivot_col_[step]];
        for (const auto& e : upper_cols_[step]) s -= e.value * w[e.step];
        w[step] = s / diag_[step];
    }
    // L' backsolve, writing into row indexing.
    for (int step = m_ - 1; step >= 0; --step) {
        double s = w[step];
        for (const auto& e : lower_[step]) s -= e.mult * v[e.row];
        v[pivot_row_[step]] = s;
    }
}

bool BasisFactor::update(int pos, const std::vector<double>& w) {
    double pivot = w[pos];
    if (std::abs(pivot) < kUpdatePivotTol) return false;
    Eta eta;
    eta.pos = pos;
    eta.pivot = pivot;
    for (int i = 0; i < m_; ++i) {
        if (i == pos) continue;
        if (std::abs(w[i]) >= kDropTol) {
            eta.index.push_back(i);
            eta.value.push_back(w[i]);
        }
    }
    etas_.push_back(std::move(eta));
    return true;
}

}  // namespace gridsched
