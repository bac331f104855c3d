#pragma once

#include "opdet/fredholm.hpp"
#include "opdet/kernels.hpp"

#include <Eigen/Dense>

namespace opdet {

// Explicit factorization of the minus edge limit at unit coupling:
//   K_minus|_{lambda=1} = M N with
//   M(x, u) = sqrt(2) e^{-x/2} e^{-e^{u-x}} e^{u/2},  N(u, y) = M(y, u),
// the composition running over u in [0, inf). The reversed composition is
// translation invariant: (N M)(u, v) = sech((u - v)/2).
double factor_m(double x, double u); // requires u >= 0
double factor_n(double u, double y); // requires u >= 0

struct FactorPair {
    double m = 0.0; // M(x, u)
    double n = 0.0; // N(u, x)
};

FactorPair eval_factors(double x, double u);

// (N M)(u, v) in closed form.
double nm_kernel(double u, double v);

// (N M)(u, v) by direct quadrature of N(u, x) M(x, v) over the real line,
// truncated where the integrand is below tol.
double nm_compose_quadrature(double u, double v, double tol = 1e-12);

// (M N)(x, y) by quadrature over u in [0, u_max]; equals K_minus(x, y) at
// unit coupling once u_max clears max(x, y).
double kminus_compose_quadrature(double x, double y, double u_max, int n_per_panel = 20);

// Discretization shared by the correction determinants and the trace route:
// a grid covering the correction kernel's support, with the truncated limit
// operator and the correction kernel assembled on it (symmetrized).
struct HalfLineOp {
    Grid grid;
    Eigen::MatrixXd truncated;  // chi K chi
    Eigen::MatrixXd correction; // k11 or k22
    HalfLine side;              // half-line carrying the truncation
};

struct CorrectionOptions {
    double tol = 1e-10;  // decay tolerance sizing the grid
    int n_per_panel = 20;
    double pad = 2.0;    // domain padding beyond the decay box
};

HalfLineOp build_half_line_op(const KernelSpec& spec, CorrectionKind which,
                              const CorrectionOptions& opts = {});

// det(I + (I + chi K chi)^{-1} K_cc) for the requested correction, with the
// solve-vs-ratio cross-check of perturbed_inverse_det. The k22 grid is the
// exact mirror image of the k11 grid, so the pair is related by reflection
// down to rounding.
DetResult correction_det(const KernelSpec& spec, CorrectionKind which,
                         const CorrectionOptions& opts = {});

// |det(I + K_1) - det(I + K_2)|: the two corrections agree by the x -> -x
// symmetry of the families, so this difference is a global sanity indicator.
double reflection_check(const KernelSpec& spec, const CorrectionOptions& opts = {});

struct TraceOptions {
    double tol = 1e-10;
    int n_per_panel = 20;
    double pad = 2.0;
};

// g(c) = tr[(I + c K_minus)^{-1} K_minus - (I + c chi K chi)^{-1} chi K chi]
// with both resolvents on one shared grid. The two traces diverge separately
// as the domain grows; only their difference is stable, so the difference of
// the solves is formed before tracing. c scales the kernels on top of
// spec.lambda.
double logderiv_trace(const KernelSpec& spec, double coupling, const TraceOptions& opts = {});

struct TraceRoutes {
    double direct = 0.0;   // resolvent difference on the shared grid
    double factored = 0.0; // first term pushed through the M/N factorization
};

// The same quantity two ways: directly, and with the K_minus term rewritten
// via (I + c lambda M N)^{-1} -> M (I + c lambda N M)^{-1} N.
TraceRoutes logderiv_trace_routes(const KernelSpec& spec, double coupling,
                                  const TraceOptions& opts = {});

// log det(I + K_1) at coupling_target by integrating g(c) from 0 with
// adaptive Simpson run at tol / 4. The coupling path is vetted against the
// spectra of both resolvents first; a spectral point inside the path throws
// SingularError.
double integrate_logdet(const KernelSpec& spec, double coupling_target, double tol = 1e-8,
                        const TraceOptions& opts = {});

} // namespace opdet
