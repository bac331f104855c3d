#include "opdet/fredholm.hpp"

#include "opdet/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace opdet {

namespace {

constexpr double kIllConditioned = 1e-12;

double checked_eval(const KernelFn& kernel, double x, double y) {
    const double v = kernel(x, y);
    if (!std::isfinite(v)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "kernel not finite at (x, y) = (%.17g, %.17g)", x, y);
        throw std::runtime_error(buf);
    }
    return v;
}

// Symmetrized kernel matrix over the listed node indices.
Eigen::MatrixXd assemble(const KernelFn& kernel, const Grid& grid,
                         const std::vector<std::size_t>& idx) {
    const std::size_t n = idx.size();
    Eigen::MatrixXd m(n, n);
    std::vector<double> sw(n);
    for (std::size_t i = 0; i < n; ++i) sw[i] = std::sqrt(grid.weights[idx[i]]);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = grid.nodes[idx[i]];
        for (std::size_t j = i; j < n; ++j) {
            const double v = sw[i] * checked_eval(kernel, xi, grid.nodes[idx[j]]) * sw[j];
            m(i, j) = v;
            m(j, i) = v; // mirrored, never re-evaluated: exact symmetry
        }
    }
    return m;
}

std::vector<std::size_t> kept_indices(const Grid& grid, const std::vector<bool>* mask) {
    std::vector<std::size_t> idx;
    idx.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (!mask || (*mask)[i]) idx.push_back(i);
    return idx;
}

void check_mask(const Grid& grid, const std::vector<bool>* mask, const char* where) {
    if (mask && mask->size() != grid.size())
        throw std::invalid_argument(std::string(where) + ": mask size does not match grid");
}

} // namespace

NystromMatrix nystrom_matrix(const KernelFn& kernel, const Grid& grid,
                             const std::vector<bool>* mask) {
    check_mask(grid, mask, "nystrom_matrix");
    const std::size_t n = grid.size();
    NystromMatrix out;
    out.grid = grid;
    out.entries = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> sw(n);
    for (std::size_t i = 0; i < n; ++i) sw[i] = std::sqrt(grid.weights[i]);
    for (std::size_t i = 0; i < n; ++i) {
        if (mask && !(*mask)[i]) continue;
        for (std::size_t j = i; j < n; ++j) {
            if (mask && !(*mask)[j]) continue;
            const double v = sw[i] * checked_eval(kernel, grid.nodes[i], grid.nodes[j]) * sw[j];
            out.entries(i, j) = v;
            out.entries(j, i) = v;
        }
    }
    return out;
}

DetResult det_of_identity_plus(const Eigen::MatrixXd& m) {
    DetResult r;
    r.grid_size = static_cast<std::size_t>(m.rows());
    if (m.rows() == 0) return r; // det of empty operator is 1

    Eigen::MatrixXd a = m;
    a.diagonal().array() += 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const double rcond = lu.rcond();

    double log_abs = 0.0;
    int sign = static_cast<int>(lu.permutationP().determinant());
    bool singular = false;
    const auto& u = lu.matrixLU();
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        const double d = u(i, i);
        if (d == 0.0) {
            singular = true;
            break;
        }
        log_abs += std::log(std::abs(d));
        if (d < 0.0) sign = -sign;
    }

    if (singular) {
        r.value = 0.0;
        r.log_value = -std::numeric_limits<double>::infinity();
        r.sign = 0;
        r.flags.singular = true;
        return r;
    }
    r.log_value = log_abs;
    r.sign = sign;
    r.value = sign * std::exp(log_abs); // may overflow to +-inf; log stays exact
    r.flags.ill_conditioned = rcond < kIllConditioned;
    return r;
}

DetResult fredholm_det(const KernelFn& kernel, const Grid& grid, const std::vector<bool>* mask) {
    check_mask(grid, mask, "fredholm_det");
    return det_of_identity_plus(assemble(kernel, grid, kept_indices(grid, mask)));
}

DetResult det_refined(const KernelFn& kernel, double a, double b, double tol,
                      const RefineOptions& opts) {
    if (!(tol > 0.0)) throw std::invalid_argument("det_refined: need tol > 0");
    if (opts.base_n < 1 || opts.max_doublings < 1)
        throw std::invalid_argument("det_refined: bad refinement budget");

    const std::vector<double> edges = make_panel_edges(a, b, opts.panel_width);
    DetResult prev;
    for (int k = 0; k <= opts.max_doublings; ++k) {
        DetResult cur = fredholm_det(kernel, build_composite(edges, opts.base_n << k));
        if (k > 0) {
            const bool finite = std::isfinite(cur.value) && std::isfinite(prev.value);
            const double diff = finite ? std::abs(cur.value - prev.value)
                                       : std::abs(cur.log_value - prev.log_value);
            cur.error_estimate = diff;
            const double scale = finite ? std::max(1.0, std::abs(cur.value)) : 1.0;
            if (diff <= tol * scale) return cur;
            if (k == opts.max_doublings) {
                cur.flags.non_convergent = true;
                return cur;
            }
        }
        prev = cur;
    }
    throw std::logic_error("det_refined: unreachable");
}

DetResult perturbed_inverse_det(const KernelFn& a, const KernelFn& b, const Grid& grid,
                                const std::vector<bool>* a_mask,
                                const std::vector<bool>* b_mask) {
    check_mask(grid, a_mask, "perturbed_inverse_det");
    check_mask(grid, b_mask, "perturbed_inverse_det");
    const NystromMatrix am = nystrom_matrix(a, grid, a_mask);
    const NystromMatrix bm = nystrom_matrix(b, grid, b_mask);

    Eigen::MatrixXd ia = am.entries;
    ia.diagonal().array() += 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(ia);
    const double rcond = lu.rcond();
    for (Eigen::Index i = 0; i < ia.rows(); ++i)
        if (lu.matrixLU()(i, i) == 0.0)
            throw SingularError("perturbed_inverse_det: I + A is singular on this grid");

    DetResult r = det_of_identity_plus(lu.solve(bm.entries));
    r.flags.ill_conditioned = r.flags.ill_conditioned || rcond < kIllConditioned;

    // Independent route: det(I + (I+A)^{-1} B) = det(I + A + B) / det(I + A).
    const DetResult ab = det_of_identity_plus(am.entries + bm.entries);
    const DetResult a0 = det_of_identity_plus(am.entries);
    if (std::isfinite(r.value) && std::isfinite(ab.value) && std::isfinite(a0.value) &&
        a0.value != 0.0) {
        r.cross_check = std::abs(r.value - ab.value / a0.value) /
                        std::max(std::abs(r.value), 1e-300);
    } else {
        r.cross_check = std::abs(r.log_value - (ab.log_value - a0.log_value));
        if (r.sign != ab.sign * a0.sign) r.cross_check = std::max(r.cross_check, 1.0);
    }
    return r;
}

} // namespace opdet
