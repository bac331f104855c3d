#include "opdet/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace opdet {

namespace {

// Legendre P_n(z) and its derivative via the three-term recurrence.
struct LegendreEval {
    double p;  // P_n(z)
    double dp; // P_n'(z)
};

LegendreEval legendre(int n, double z) {
    double p0 = 1.0, p1 = 0.0;
    for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
    }
    return {p0, n * (z * p0 - p1) / (z * z - 1.0)};
}

} // namespace

Grid gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
    if (!(a < b)) throw std::invalid_argument("gauss_legendre: need a < b");

    Grid g;
    g.a = a;
    g.b = b;
    g.panel_edges = {a, b};
    g.n_per_panel = n;
    g.nodes.resize(n);
    g.weights.resize(n);

    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    if (n == 1) {
        g.nodes[0] = c;
        g.weights[0] = b - a;
        return g;
    }

    // Roots come in +/- pairs on the reference interval; solve the positive
    // half by Newton iteration and mirror, so symmetric intervals produce
    // bit-symmetric rules.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        if (2 * i + 1 == n) {
            z = 0.0; // middle root of an odd-degree rule is exactly 0
        } else {
            bool converged = false;
            for (int it = 0; it < 64; ++it) {
                const auto [p, dp] = legendre(n, z);
                const double dz = p / dp;
                z -= dz;
                if (std::abs(dz) < 1e-15) {
                    converged = true;
                    break;
                }
            }
            if (!converged)
                throw std::runtime_error("gauss_legendre: Newton iteration stalled");
            const auto [p, dp] = legendre(n, z); // one polishing step
            z -= p / dp;
        }
        const double dp = legendre(n, z).dp;
        const double w = 2.0 * h / ((1.0 - z * z) * dp * dp);
        g.nodes[i] = c - h * z; // z descends with i, so nodes ascend
        g.nodes[n - 1 - i] = c + h * z;
        g.weights[i] = w;
        g.weights[n - 1 - i] = w;
    }
    return g;
}

std::vector<double> make_panel_edges(double a, double b, double width) {
    if (!(a < b)) throw std::invalid_argument("make_panel_edges: need a < b");
    if (!(width > 0.0)) throw std::invalid_argument("make_panel_edges: need width > 0");

    auto fill = [width](double lo, double hi, std::vector<double>& out) {
        const int k = std::max(1, static_cast<int>(std::ceil((hi - lo) / width - 1e-12)));
        for (int i = 1; i < k; ++i) out.push_back(lo + (hi - lo) * i / k);
        out.push_back(hi); // endpoint exact
    };

    std::vector<double> edges{a};
    if (a < 0.0 && 0.0 < b) {
        fill(a, 0.0, edges); // 0 becomes an exact edge
        fill(0.0, b, edges);
    } else {
        fill(a, b, edges);
    }
    return edges;
}

Grid build_composite(const std::vector<double>& edges, int n_per_panel) {
    if (edges.size() < 2) throw std::invalid_argument("build_composite: need >= 2 edges");
    if (!std::is_sorted(edges.begin(), edges.end()))
        throw std::invalid_argument("build_composite: edges must ascend");
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        if (!(edges[i] < edges[i + 1]))
            throw std::invalid_argument("build_composite: edges must be strictly ascending");
    if (n_per_panel < 1) throw std::invalid_argument("build_composite: need n_per_panel >= 1");

    Grid g;
    g.a = edges.front();
    g.b = edges.back();
    g.panel_edges = edges;
    g.n_per_panel = n_per_panel;
    g.nodes.reserve((edges.size() - 1) * n_per_panel);
    g.weights.reserve((edges.size() - 1) * n_per_panel);
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const Grid panel = gauss_legendre(n_per_panel, edges[p], edges[p + 1]);
        g.nodes.insert(g.nodes.end(), panel.nodes.begin(), panel.nodes.end());
        g.weights.insert(g.weights.end(), panel.weights.begin(), panel.weights.end());
    }
    return g;
}

Grid build_composite(double a, double b, int n_per_panel, double width) {
    return build_composite(make_panel_edges(a, b, width), n_per_panel);
}

Grid mirrored(const Grid& grid) {
    Grid g;
    g.a = -grid.b;
    g.b = -grid.a;
    g.n_per_panel = grid.n_per_panel;
    const std::size_t n = grid.size();
    g.nodes.resize(n);
    g.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.nodes[i] = -grid.nodes[n - 1 - i];
        g.weights[i] = grid.weights[n - 1 - i];
    }
    g.panel_edges.resize(grid.panel_edges.size());
    for (std::size_t i = 0; i < grid.panel_edges.size(); ++i)
        g.panel_edges[i] = -grid.panel_edges[grid.panel_edges.size() - 1 - i];
    return g;
}

std::vector<bool> mask(const Grid& grid, HalfLine side) {
    std::vector<bool> m(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        m[i] = (side == HalfLine::plus) ? (grid.nodes[i] >= 0.0) : (grid.nodes[i] < 0.0);
    return m;
}

std::vector<bool> mask_interval(const Grid& grid, double lo, double hi) {
    std::vector<bool> m(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        m[i] = lo < grid.nodes[i] && grid.nodes[i] < hi;
    return m;
}

double integrate(const Grid& grid, const std::function<double(double)>& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) acc += grid.weights[i] * f(grid.nodes[i]);
    return acc;
}

} // namespace opdet
