#include "opdet/wienerhopf.hpp"

#include "opdet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

namespace opdet {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Grid covering the support box of the requested correction kernel. Kernels
// that vanish identically (window family, lambda = 0) still get a nominal
// box so determinants evaluate (to exactly 1). The k22 grid is built as the
// exact mirror of the k11 grid: reflection symmetry then holds to rounding.
Grid correction_grid(const KernelSpec& spec, CorrectionKind which, double tol, int n_per_panel,
                     double pad) {
    if (which == CorrectionKind::k22)
        return mirrored(correction_grid(spec, CorrectionKind::k11, tol, n_per_panel, pad));
    const DecayProfile box = decay_radius(spec, CorrectionKind::k11, tol);
    const double lo = (box.vanishes ? -6.0 : box.lo) - pad;
    const double hi = (box.vanishes ? 6.0 : box.hi) + pad;
    return build_composite(lo, hi, n_per_panel);
}

KernelFn limit_fn(const KernelSpec& spec) {
    return [spec](double x, double y) { return eval_limit(spec, x - y); };
}

// Resolvent-difference engine behind logderiv_trace and integrate_logdet.
struct TraceEngine {
    Grid grid;
    Eigen::MatrixXd km; // K_minus, full line
    Eigen::MatrixXd kp; // chi+ K chi+
    double lambda;

    TraceEngine(const KernelSpec& spec, const TraceOptions& opts) : lambda(spec.lambda) {
        grid = correction_grid(spec, CorrectionKind::k11, opts.tol, opts.n_per_panel, opts.pad);
        km = nystrom_matrix(
                 [&spec](double x, double y) {
                     return eval_half_limit(spec, HalfLine::minus, x, y);
                 },
                 grid)
                 .entries;
        const std::vector<bool> plus = mask(grid, HalfLine::plus);
        kp = nystrom_matrix(limit_fn(spec), grid, &plus).entries;
    }

    static Eigen::PartialPivLU<Eigen::MatrixXd> resolvent(const Eigen::MatrixXd& k, double c) {
        Eigen::MatrixXd a = c * k;
        a.diagonal().array() += 1.0;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
        if (lu.rcond() < 1e-10) {
            char buf[96];
            std::snprintf(buf, sizeof buf,
                          "resolvent nearly singular at coupling c = %.9g", c);
            throw SingularError(buf);
        }
        return lu;
    }

    double trace_at(double c) const {
        // Difference of the solves before tracing: each term alone drifts
        // with the domain length, only the difference converges.
        return (resolvent(km, c).solve(km) - resolvent(kp, c).solve(kp)).trace();
    }

    // Reject a coupling path that brackets a spectral point of either
    // resolvent. Cheap norm bound first; eigenvalues only when it fails.
    void check_path(double target) const {
        const double cmax = std::abs(target);
        const auto norm1 = [](const Eigen::MatrixXd& m) {
            return m.cwiseAbs().colwise().sum().maxCoeff();
        };
        if (cmax * std::max(norm1(km), norm1(kp)) < 0.9) return;
        const double lo = std::min(0.0, target), hi = std::max(0.0, target);
        const double margin = 1e-9 * (1.0 + cmax);
        for (const Eigen::MatrixXd* m : {&km, &kp}) {
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*m,
                                                                    Eigen::EigenvaluesOnly);
            for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
                const double mu = es.eigenvalues()[i];
                if (mu == 0.0) continue;
                const double cstar = -1.0 / mu;
                if (cstar >= lo - margin && cstar <= hi + margin) {
                    char buf[96];
                    std::snprintf(buf, sizeof buf,
                                  "coupling path crosses a resolvent singularity at "
                                  "c = %.9g",
                                  cstar);
                    throw SingularError(buf);
                }
            }
        }
    }
};

double adaptive_simpson(const std::function<double(double)>& f, double a, double fa, double b,
                        double fb, double m, double fm, double whole, double eps, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    if (depth <= 0)
        throw ConvergenceError("integrate_logdet: adaptive refinement exhausted its depth");
    return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * eps, depth - 1) +
           adaptive_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * eps, depth - 1);
}

} // namespace

double factor_m(double x, double u) {
    if (u < 0.0) throw std::invalid_argument("factor_m: need u >= 0");
    return kSqrt2 * std::exp(0.5 * (u - x) - std::exp(u - x));
}

double factor_n(double u, double y) { return factor_m(y, u); }

FactorPair eval_factors(double x, double u) { return {factor_m(x, u), factor_n(u, x)}; }

double nm_kernel(double u, double v) { return 1.0 / std::cosh(0.5 * std::abs(u - v)); }

double nm_compose_quadrature(double u, double v, double tol) {
    if (u < 0.0 || v < 0.0) throw std::invalid_argument("nm_compose_quadrature: need u, v >= 0");
    if (!(tol > 0.0) || !(tol < 1.0))
        throw std::invalid_argument("nm_compose_quadrature: need tol in (0, 1)");
    // Integrand N(u, x) M(x, v): double-exponential cutoff below min(u, v),
    // e^{-x} tail above max(u, v).
    const double lo = std::min(u, v) - 5.0;
    const double hi = std::max(u, v) + std::log(2.0 / tol);
    const Grid g = build_composite(lo, hi, 20);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        acc += g.weights[i] * factor_n(u, g.nodes[i]) * factor_m(g.nodes[i], v);
    return acc;
}

double kminus_compose_quadrature(double x, double y, double u_max, int n_per_panel) {
    if (!(u_max > 0.0))
        throw std::invalid_argument("kminus_compose_quadrature: need u_max > 0");
    const Grid g = build_composite(0.0, u_max, n_per_panel);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        acc += g.weights[i] * factor_m(x, g.nodes[i]) * factor_n(g.nodes[i], y);
    return acc;
}

HalfLineOp build_half_line_op(const KernelSpec& spec, CorrectionKind which,
                              const CorrectionOptions& opts) {
    HalfLineOp op;
    op.side = (which == CorrectionKind::k11) ? HalfLine::plus : HalfLine::minus;
    op.grid = correction_grid(spec, which, opts.tol, opts.n_per_panel, opts.pad);
    const std::vector<bool> side_mask = mask(op.grid, op.side);
    op.truncated = nystrom_matrix(limit_fn(spec), op.grid, &side_mask).entries;
    op.correction = nystrom_matrix(
                        [&spec, which](double x, double y) {
                            return eval_correction_kernel(spec, which, x, y);
                        },
                        op.grid)
                        .entries;
    return op;
}

DetResult correction_det(const KernelSpec& spec, CorrectionKind which,
                         const CorrectionOptions& opts) {
    const Grid grid = correction_grid(spec, which, opts.tol, opts.n_per_panel, opts.pad);
    const HalfLine side = (which == CorrectionKind::k11) ? HalfLine::plus : HalfLine::minus;
    const std::vector<bool> side_mask = mask(grid, side);
    return perturbed_inverse_det(
        limit_fn(spec),
        [&spec, which](double x, double y) { return eval_correction_kernel(spec, which, x, y); },
        grid, &side_mask, nullptr);
}

double reflection_check(const KernelSpec& spec, const CorrectionOptions& opts) {
    const DetResult d1 = correction_det(spec, CorrectionKind::k11, opts);
    const DetResult d2 = correction_det(spec, CorrectionKind::k22, opts);
    return std::abs(d1.value - d2.value);
}

double logderiv_trace(const KernelSpec& spec, double coupling, const TraceOptions& opts) {
    return TraceEngine(spec, opts).trace_at(coupling);
}

TraceRoutes logderiv_trace_routes(const KernelSpec& spec, double coupling,
                                  const TraceOptions& opts) {
    if (spec.family != Family::toda)
        throw std::invalid_argument(
            "logderiv_trace_routes: the M/N factor display exists only for the toda family");
    const TraceEngine eng(spec, opts);
    TraceRoutes out;
    out.direct = eng.trace_at(coupling);

    // Factored first term: tr[(I + c K_minus)^{-1} K_minus] with the
    // resolvent pushed through the factorization,
    //   (I + c lambda M N)^{-1} M N = M (I + c lambda N M)^{-1} N,
    // discretized over u in [0, span]. N M must be composed over the same
    // truncated x-domain the direct resolvent lives on: N(u, x) M(x, v)
    // decays only like e^{-x} against a growing e^{(u+v)/2}, so swapping in
    // the whole-line closed form sech((u - v)/2) would re-add exactly the
    // tail the direct route truncates. The trace uses plain weights, matching
    // the symmetrized matrix trace identically.
    const double span = eng.grid.b + 4.0; // factors die double-exponentially past max x
    const Grid ug = build_composite(0.0, span, opts.n_per_panel);
    const auto nu = static_cast<Eigen::Index>(ug.size());
    const auto nx = static_cast<Eigen::Index>(eng.grid.size());
    std::vector<double> swu(ug.size());
    for (std::size_t i = 0; i < ug.size(); ++i) swu[i] = std::sqrt(ug.weights[i]);

    Eigen::MatrixXd ms(nx, nu), ns(nu, nx);
    for (Eigen::Index i = 0; i < nx; ++i)
        for (Eigen::Index k = 0; k < nu; ++k) {
            ms(i, k) = factor_m(eng.grid.nodes[i], ug.nodes[k]) * swu[k];
            ns(k, i) = swu[k] * factor_n(ug.nodes[k], eng.grid.nodes[i]);
        }
    const Eigen::Map<const Eigen::VectorXd> wx(eng.grid.weights.data(), nx);
    const Eigen::MatrixXd nm = ns * wx.asDiagonal() * ms;

    const Eigen::MatrixXd g = TraceEngine::resolvent(nm, coupling * eng.lambda).solve(ns);
    double term1 = 0.0;
    for (Eigen::Index i = 0; i < nx; ++i)
        term1 += eng.grid.weights[i] * ms.row(i).dot(g.col(i));
    term1 *= eng.lambda;

    const double term2 = TraceEngine::resolvent(eng.kp, coupling).solve(eng.kp).trace();
    out.factored = term1 - term2;
    return out;
}

double integrate_logdet(const KernelSpec& spec, double coupling_target, double tol,
                        const TraceOptions& opts) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_logdet: need tol > 0");
    if (coupling_target == 0.0) return 0.0;

    const TraceEngine eng(spec, opts);
    eng.check_path(coupling_target);

    const std::function<double(double)> f = [&eng](double c) { return eng.trace_at(c); };
    const double a = 0.0, b = coupling_target;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // Integration budget kept at a quarter of the caller's tolerance.
    return adaptive_simpson(f, a, fa, b, fb, m, fm, whole, 0.25 * tol, 30);
}

} // namespace opdet
