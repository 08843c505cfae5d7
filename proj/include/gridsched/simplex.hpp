#pragma once

// Bounded-variable primal revised simplex over sparse columns, two-phase
// with a composite infeasibility objective in phase 1. Nonbasic variables
// rest at a bound; the basis is kept as a sparse LU with product-form
// updates and periodic refactorization.

#include "gridsched/lp.hpp"

namespace gridsched {

struct SimplexOptions {
    double tol_feas = 1e-7;
    double tol_opt = 1e-9;
    int refactor_interval = 100;   // pivots between refactorizations
    int degenerate_threshold = 100;  // consecutive degenerate pivots before Bland's rule
    long max_iterations = 0;       // 0 = derived from problem size
    bool log_iterations = false;
};

/// Solves min c'x subject to lp's rows and bounds from a cold (all-slack)
/// start. Throws SolverFailureError on numerical breakdown.
LpSolution solve(const LinearProgram& lp, const SimplexOptions& options = {});

/// Identical contract to solve(); a dimensionally compatible basis hint only
/// changes the iteration count. An incompatible or singular hint falls back
/// to a cold start with a warning on stderr.
LpSolution warm_start_solve(const LinearProgram& lp, const BasisHint& hint,
                            const SimplexOptions& options = {});

/// Basis of the last Optimal solution (variable indices, slacks as n + row).
/// Exposed so callers can chain warm starts across related models.
struct SolveResult {
    LpSolution solution;
    BasisHint final_basis;
};

SolveResult solve_detailed(const LinearProgram& lp, const SimplexOptions& options = {},
                           const BasisHint* hint = nullptr);

}  // namespace gridsched
