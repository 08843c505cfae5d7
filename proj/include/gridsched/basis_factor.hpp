#pragma once

// Sparse LU factorization of a simplex basis with product-form rank-one
// updates. The factorization eliminates column/row singletons first (the
// scheduling bases are almost entirely triangular) and falls back to a
// Markowitz-style pivot search with threshold partial pivoting on the
// remaining kernel.

#include <vector>

namespace gridsched {

struct SparseColumn {
    std::vector<int> index;    // row indices
    std::vector<double> value;
};

class BasisFactor {
public:
    /// Factors the m x m matrix whose p-th column is cols[p]. Returns false
    /// if the matrix is singular within the drop tolerance; the object is
    /// unusable until a successful factor() afterwards.
    bool factor(const std::vector<SparseColumn>& cols);

    bool valid() const { return valid_; }
    int dimension() const { return m_; }
    int updates_since_factor() const { return static_cast<int>(etas_.size()); }

    /// Solves B * x = v in place. Input indexed by row, output indexed by
    /// basis position.
    void ftran(std::vector<double>& v) const;

    /// Solves B' * y = v in place. Input indexed by basis position, output
    /// indexed by row.
    void btran(std::vector<double>& v) const;

    /// Replaces basis position `pos`. `w` is the FTRAN image of the incoming
    /// column (indexed by basis position, includes the pivot entry at `pos`).
    /// Returns false when the pivot w[pos] is too small to update safely.
    bool update(int pos, const std::vector<double>& w);

private:
    struct LEntry {
        int row;
        double mult;
    };
    struct UEntry {
        int step;
        double value;
    };
    struct Eta {
        int pos;
        std::vector<int> index;    // basis positions
        std::vector<double> value;
        double pivot;
    };

    int m_ = 0;
    bool valid_ = false;

    // Pivot order: step k eliminated row pivot_row_[k] and basis position
    // pivot_col_[k].
    std::vector<int> pivot_row_;
    std::vector<int> pivot_col_;
    std::vector<int> step_of_row_;
    std::vector<int> step_of_col_;

    // L multipliers recorded per elimination step.
    std::vector<std::vector<LEntry>> lower_;
    // U stored both row-wise and column-wise in step indexing.
    std::vector<std::vector<UEntry>> upper_rows_;
    std::vector<std::vector<UEntry>> upper_cols_;
    std::vector<double> diag_;

    std::vector<Eta> etas_;

    mutable std::vector<double> scratch_;
};

}  // namespace gridsched
