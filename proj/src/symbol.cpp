#include "opdet/symbol.hpp"

#include "opdet/errors.hpp"
#include "opdet/fredholm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace opdet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// True when the samples are exactly real and even about the grid center;
// both kernel families land here, and it keeps every transform below real.
bool real_even(const std::vector<std::complex<double>>& f) {
    const std::size_t m = f.size();
    for (std::size_t j = 0; j < m; ++j)
        if (f[j].imag() != 0.0 || f[j].real() != f[m - 1 - j].real()) return false;
    return true;
}

// (2 pi)^{-1} h Sum'' f_j e^{-i u xi_j} for real even f on the symmetric
// uniform grid: collapses to a cosine series. cos(r th) runs on the two-term
// recurrence, reseeded periodically because the recurrence amplifies roundoff
// in its coefficient when th is small.
double ift_real_even(const std::vector<std::complex<double>>& f, double step, double u) {
    const std::size_t m = f.size();
    const std::size_t c = (m - 1) / 2;
    const double th = u * step;
    const double two_c = 2.0 * std::cos(th);
    double c_prev = 1.0;
    double c_cur = std::cos(th);
    double acc = f[c].real();
    for (std::size_t r = 1; r <= c; ++r) {
        if (r % 256 == 0) {
            c_prev = std::cos((r - 1) * th);
            c_cur = std::cos(r * th);
        }
        acc += (r == c ? 1.0 : 2.0) * f[c + r].real() * c_cur;
        const double next = two_c * c_cur - c_prev;
        c_prev = c_cur;
        c_cur = next;
    }
    return acc * step / kTwoPi;
}

// General trapezoid transform with a phasor recurrence, reseeded to bound
// drift. Only exercised if a symbol ever leaves the real even class.
std::complex<double> ift_complex(const std::vector<std::complex<double>>& f,
                                 const std::vector<double>& xi, double u) {
    const std::size_t m = f.size();
    const double h = xi[1] - xi[0];
    const std::complex<double> rot = std::polar(1.0, -u * h);
    std::complex<double> ph = std::polar(1.0, -u * xi[0]);
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        if (j > 0 && j % 256 == 0) ph = std::polar(1.0, -u * xi[j]);
        acc += ((j == 0 || j == m - 1) ? 0.5 : 1.0) * f[j] * ph;
        ph *= rot;
    }
    return acc * (h / kTwoPi);
}

} // namespace

WindingResult unwrap_winding(const std::vector<std::complex<double>>& samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("unwrap_winding: need at least 2 samples");
    WindingResult r;
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < samples.size(); ++j) {
        const std::complex<double>& p = samples[j];
        const std::complex<double>& c = samples[j + 1];
        if (std::abs(p) == 0.0 || std::abs(c) == 0.0) {
            r.sign_change = true; // the curve touches 0: phase undefined
            return r;
        }
        const double dphi = std::arg(c / p);
        r.max_jump = std::max(r.max_jump, std::abs(dphi));
        if (std::abs(dphi) > 0.5 * std::numbers::pi) {
            if (p.imag() == 0.0 && c.imag() == 0.0 && p.real() * c.real() < 0.0) {
                r.sign_change = true; // real curve crossed 0 between samples
                return r;
            }
            throw std::runtime_error(
                "unwrap_winding: phase step exceeds pi/2; increase sampling density");
        }
        total += dphi;
    }
    r.winding = static_cast<int>(std::lround(total / kTwoPi));
    r.valid = true;
    return r;
}

double hat_k(const KernelSpec& spec, double xi) {
    return kTwoPi * spec.lambda / std::cosh(std::numbers::pi * std::abs(xi));
}

double hat_k_quadrature(const KernelSpec& spec, double xi, double tol) {
    if (!(tol > 0.0) || !(tol < 1.0))
        throw std::invalid_argument("hat_k_quadrature: need tol in (0, 1)");
    if (spec.lambda == 0.0) return 0.0;
    // k is even: the transform is 2 * integral_0^X cos(x xi) k(x) dx with the
    // tail beyond X below tol. Narrow panels keep the oscillation resolved.
    const double scale = std::max(std::abs(spec.lambda), 1.0);
    const double cut = 2.0 * std::log(8.0 * scale / tol);
    const double width = std::min(1.0, 3.0 / std::max(std::abs(xi), 1.0));
    const Grid g = build_composite(0.0, cut, 20, width);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        acc += g.weights[i] * std::cos(g.nodes[i] * xi) * eval_limit(spec, g.nodes[i]);
    return 2.0 * acc;
}

SymbolData build_symbol(const KernelSpec& spec, const SymbolOptions& opts) {
    if (!(opts.xi_max > 0.0)) throw std::invalid_argument("build_symbol: need xi_max > 0");
    if (opts.samples < 3 || opts.samples % 2 == 0)
        throw std::invalid_argument("build_symbol: samples must be odd and >= 3");

    SymbolData sd;
    sd.spec = spec;
    sd.xi_max = opts.xi_max;
    const std::size_t m = opts.samples;
    const auto c = static_cast<std::ptrdiff_t>((m - 1) / 2);
    sd.step = opts.xi_max / static_cast<double>(c);
    sd.xi.resize(m);
    sd.sigma.resize(m);
    sd.log_sigma.resize(m);
    sd.min_abs = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
        // (j - c) * step: +/- pairs and the center 0 are exact
        sd.xi[j] = static_cast<double>(static_cast<std::ptrdiff_t>(j) - c) * sd.step;
        sd.sigma[j] = 1.0 + hat_k(spec, sd.xi[j]);
        sd.min_abs = std::min(sd.min_abs, std::abs(sd.sigma[j]));
    }

    const WindingResult w = unwrap_winding(sd.sigma);
    sd.winding = w.winding;
    sd.winding_valid = w.valid;
    sd.sign_change = w.sign_change;

    if (w.valid) {
        // continuous branch of log sigma along the curve
        double phase = std::arg(sd.sigma[0]);
        sd.log_sigma[0] = {std::log(std::abs(sd.sigma[0])), phase};
        for (std::size_t j = 1; j < m; ++j) {
            phase += std::arg(sd.sigma[j] / sd.sigma[j - 1]);
            sd.log_sigma[j] = {std::log(std::abs(sd.sigma[j])), phase};
        }
    } else {
        for (std::size_t j = 0; j < m; ++j) sd.log_sigma[j] = std::log(sd.sigma[j]);
    }
    return sd;
}

IndexReport check_index(const SymbolData& sd, double floor) {
    IndexReport r;
    r.min_abs = sd.min_abs;
    r.winding = sd.winding;
    r.winding_valid = sd.winding_valid;
    r.sign_change = sd.sign_change;
    char buf[192];
    if (sd.sign_change) {
        r.detail = "symbol crosses zero on the real line (sign change): "
                   "factorization index undefined";
    } else if (!sd.winding_valid) {
        r.detail = "symbol winding count could not be established";
    } else if (!(sd.min_abs > floor)) {
        std::snprintf(buf, sizeof buf,
                      "symbol modulus %.3g is not above the floor %.3g: "
                      "too close to a zero crossing",
                      sd.min_abs, floor);
        r.detail = buf;
    } else if (sd.winding != 0) {
        std::snprintf(buf, sizeof buf, "symbol winding number %d != 0", sd.winding);
        r.detail = buf;
    } else {
        r.ok = true;
    }
    return r;
}

std::vector<std::complex<double>> log_symbol_ift(const SymbolData& sd,
                                                 const std::vector<double>& xs) {
    const IndexReport rep = check_index(sd);
    if (!rep.ok) throw IndexError("log_symbol_ift: " + rep.detail);
    std::vector<std::complex<double>> out(xs.size());
    if (real_even(sd.log_sigma)) {
        for (std::size_t i = 0; i < xs.size(); ++i)
            out[i] = ift_real_even(sd.log_sigma, sd.step, xs[i]);
    } else {
        for (std::size_t i = 0; i < xs.size(); ++i)
            out[i] = ift_complex(sd.log_sigma, sd.xi, xs[i]);
    }
    return out;
}

SzegoConstants szego_constants(const SymbolData& sd, double x_max, int n_per_panel) {
    if (!(x_max > 0.0)) throw std::invalid_argument("szego_constants: need x_max > 0");
    const Grid g = build_composite(0.0, x_max, n_per_panel);
    std::vector<double> xs;
    xs.reserve(2 * g.size() + 1);
    xs.push_back(0.0);
    for (double x : g.nodes) xs.push_back(x);
    for (double x : g.nodes) xs.push_back(-x);
    const auto s = log_symbol_ift(sd, xs);

    double max_imag = 0.0;
    for (const auto& v : s) max_imag = std::max(max_imag, std::abs(v.imag()));
    if (max_imag > 1e-8)
        throw std::runtime_error("szego_constants: s(x) is not real; "
                                 "symbol outside the supported class");

    SzegoConstants out;
    out.log_g = s[0].real();
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        acc += g.weights[i] * g.nodes[i] * (s[1 + i] * s[1 + g.size() + i]).real();
    out.log_e = acc;
    out.g = std::exp(out.log_g);
    out.e = std::exp(out.log_e);
    return out;
}

double e_operator_route(const SymbolData& sd, const EOperatorOptions& opts) {
    const IndexReport rep = check_index(sd);
    if (!rep.ok) throw IndexError("e_operator_route: " + rep.detail);
    if (!(opts.domain_l > 0.0) || !(opts.margin >= 0.0) || opts.n_per_panel < 1 ||
        !(opts.table_step > 0.0))
        throw std::invalid_argument("e_operator_route: bad options");
    if (sd.spec.lambda == 0.0) return 1.0; // sigma == 1: both factors are I

    // rho = sigma^{-1} - 1; its transform q is the kernel of the second
    // factor minus the identity.
    const std::size_t m = sd.sigma.size();
    std::vector<std::complex<double>> rho(m);
    for (std::size_t j = 0; j < m; ++j) rho[j] = 1.0 / sd.sigma[j] - 1.0;

    const double umax = opts.domain_l + opts.margin;
    const auto ntab = static_cast<std::size_t>(std::ceil(umax / opts.table_step)) + 4;
    const bool fast = real_even(rho);
    std::vector<double> qtab(ntab);
    for (std::size_t i = 0; i < ntab; ++i) {
        const double u = static_cast<double>(i) * opts.table_step;
        qtab[i] = fast ? ift_real_even(rho, sd.step, u) : ift_complex(rho, sd.xi, u).real();
    }
    // 4-point Lagrange on the uniform table; q inherits evenness from rho.
    const auto q = [&qtab, ntab, &opts](double u) {
        const double t = std::abs(u) / opts.table_step;
        auto i0 = static_cast<std::size_t>(t);
        if (i0 > 0) --i0;
        i0 = std::min(i0, ntab - 4);
        const double s = t - static_cast<double>(i0);
        const double a0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
        const double a1 = s * (s - 2.0) * (s - 3.0) / 2.0;
        const double a2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
        const double a3 = s * (s - 1.0) * (s - 2.0) / 6.0;
        return a0 * qtab[i0] + a1 * qtab[i0 + 1] + a2 * qtab[i0 + 2] + a3 * qtab[i0 + 3];
    };
    const auto k = [&sd](double d) { return eval_limit(sd.spec, d); };

    // Kernel of W(sigma) W(sigma^{-1}) - I on [0, L]:
    //   c(x, y) = k(x - y) + q(x - y) + integral_0^{L + margin} k(x - t) q(t - y) dt.
    // The composition variable must out-reach the section; truncating it at L
    // would compute the section of a product of truncations instead (limit
    // E^2, not E).
    const Grid xg = build_composite(0.0, opts.domain_l, opts.n_per_panel);
    const Grid tg = build_composite(0.0, umax, opts.n_per_panel);
    const auto nx = static_cast<Eigen::Index>(xg.size());
    const auto nt = static_cast<Eigen::Index>(tg.size());

    Eigen::MatrixXd direct(nx, nx);
    for (Eigen::Index i = 0; i < nx; ++i)
        for (Eigen::Index j = 0; j < nx; ++j) {
            const double d = xg.nodes[i] - xg.nodes[j];
            direct(i, j) = k(d) + q(d);
        }
    Eigen::MatrixXd kxt(nx, nt);
    for (Eigen::Index i = 0; i < nx; ++i)
        for (Eigen::Index r = 0; r < nt; ++r)
            kxt(i, r) = k(xg.nodes[i] - tg.nodes[r]) * tg.weights[r];
    Eigen::MatrixXd qty(nt, nx);
    for (Eigen::Index r = 0; r < nt; ++r)
        for (Eigen::Index j = 0; j < nx; ++j)
            qty(r, j) = q(tg.nodes[r] - xg.nodes[j]);

    Eigen::MatrixXd cmat = direct + kxt * qty;
    Eigen::VectorXd sw(nx);
    for (Eigen::Index i = 0; i < nx; ++i) sw[i] = std::sqrt(xg.weights[i]);
    cmat = sw.asDiagonal() * cmat * sw.asDiagonal();
    return det_of_identity_plus(cmat).value;
}

double critical_coupling(Family family, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("critical_coupling: need tol > 0");
    const auto min_sigma = [family](double lambda) {
        const KernelSpec spec{family, lambda};
        double mn = std::numeric_limits<double>::infinity();
        for (int j = 0; j <= 4096; ++j) { // sigma is even: positive xi suffices
            const double xi = 16.0 * j / 4096.0;
            mn = std::min(mn, 1.0 + hat_k(spec, xi));
        }
        return mn;
    };
    double lo = -1.0, hi = 0.0;
    if (!(min_sigma(lo) < 0.0) || !(min_sigma(hi) > 0.0))
        throw std::runtime_error("critical_coupling: bisection bracket failed");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (min_sigma(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace opdet
