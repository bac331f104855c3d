#pragma once

#include "opdet/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace opdet {

using KernelFn = std::function<double(double, double)>;

// Symmetrized Nystrom discretization on a grid: entries(i, j) =
// sqrt(w_i) k(x_i, x_j) sqrt(w_j). A mask zeroes the rows and columns of
// excluded nodes while keeping the full index set, so matrices built on a
// shared grid stay composable.
struct NystromMatrix {
    Eigen::MatrixXd entries;
    Grid grid;
};

struct DetFlags {
    bool singular = false;        // det is exactly 0 (a pivot vanished)
    bool ill_conditioned = false; // rcond below 1e-12; digits are suspect
    bool non_convergent = false;  // refinement budget exhausted above tol
};

// Determinant with a log-space companion so that values beyond double range
// stay usable: value = sign * exp(log_value) whenever that is representable.
struct DetResult {
    double value = 1.0;
    double log_value = 0.0;
    int sign = 1;
    double error_estimate = 0.0; // last refinement delta, 0 if not refined
    double cross_check = 0.0;    // route disagreement, 0 if single-route
    std::size_t grid_size = 0;
    DetFlags flags;
};

NystromMatrix nystrom_matrix(const KernelFn& kernel, const Grid& grid,
                             const std::vector<bool>* mask = nullptr);

// det(I + M) via pivoted LU, accumulated as sum of log |pivots|.
// A zero pivot yields value 0 with the singular flag, not a throw.
DetResult det_of_identity_plus(const Eigen::MatrixXd& m);

// Fredholm determinant det(I + K) on the grid. A mask restricts the operator
// to the selected nodes; the result equals the determinant of the dense
// sub-matrix over those nodes exactly (masked-out indices are dropped, not
// zeroed, before factoring).
DetResult fredholm_det(const KernelFn& kernel, const Grid& grid,
                       const std::vector<bool>* mask = nullptr);

struct RefineOptions {
    int base_n = 20;          // nodes per panel at the coarsest level
    int max_doublings = 4;
    double panel_width = 1.0;
};

// Grid-refined determinant on [a, b]: doubles the per-panel order until two
// consecutive values agree to tol (relative to max(1, |value|)), comparing
// logs instead when values leave double range. Exhausting the budget sets
// flags.non_convergent on the finest result.
DetResult det_refined(const KernelFn& kernel, double a, double b, double tol,
                      const RefineOptions& opts = {});

// det(I + (I + A)^{-1} B) for operators sharing one grid. Factors I + A once,
// then cross-checks against det(I + A + B) / det(I + A); the relative
// disagreement lands in cross_check. Throws SingularError when I + A cannot
// be inverted.
DetResult perturbed_inverse_det(const KernelFn& a, const KernelFn& b, const Grid& grid,
                                const std::vector<bool>* a_mask = nullptr,
                                const std::vector<bool>* b_mask = nullptr);

} // namespace opdet
