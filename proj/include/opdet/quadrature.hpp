#pragma once

#include <functional>
#include <vector>

namespace opdet {

// Composite quadrature rule on [a, b]: nodes ascending, weights positive.
struct Grid {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> panel_edges; // ascending, first == a, last == b
    int n_per_panel = 0;
    double a = 0.0;
    double b = 0.0;

    std::size_t size() const { return nodes.size(); }
};

// Gauss-Legendre rule with n nodes on [a, b]. Exact for polynomials of
// degree <= 2n-1. Nodes ascending; for symmetric [a, b] = [-c, c] the rule
// is symmetric about 0 to the last bit.
Grid gauss_legendre(int n, double a, double b);

// Panel edges covering [a, b] with panels no wider than `width`.
// If a < 0 < b, the point 0 is always an edge so that half-line masks
// never split a panel.
std::vector<double> make_panel_edges(double a, double b, double width = 1.0);

// Composite Gauss-Legendre rule over the given ascending edges,
// n nodes per panel.
Grid build_composite(const std::vector<double>& edges, int n_per_panel);

// Convenience: edges from make_panel_edges(a, b, width).
Grid build_composite(double a, double b, int n_per_panel, double width = 1.0);

// Grid for the reflected domain [-b, -a]: nodes negated and reversed.
Grid mirrored(const Grid& grid);

enum class HalfLine { plus, minus };

// Restriction mask: true where the node lies on the requested half-line.
// The point 0 belongs to the plus side by convention (composite grids built
// across 0 never place a node there, so the choice is unobservable there).
std::vector<bool> mask(const Grid& grid, HalfLine side);

// Restriction to the open interval (lo, hi).
std::vector<bool> mask_interval(const Grid& grid, double lo, double hi);

// Quadrature sum of f over the grid.
double integrate(const Grid& grid, const std::function<double(double)>& f);

} // namespace opdet
