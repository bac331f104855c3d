#pragma once

#include "opdet/quadrature.hpp"

namespace opdet {

enum class Family { toda, window };

// A coupling-scaled kernel family. `lambda` multiplies every kernel in the
// family; negative values are legal here and are vetted later by the symbol
// index check.
struct KernelSpec {
    Family family = Family::toda;
    double lambda = 1.0;
};

enum class CorrectionKind { k11, k22 };

// Region outside which a kernel's entries fall below the requested tolerance.
// `vanishes` marks kernels that are identically zero.
struct DecayProfile {
    double lo = 0.0;
    double hi = 0.0;
    bool vanishes = false;
};

// Translation-invariant limit kernel k evaluated at x - y = d:
//   k(d) = lambda / cosh(d / 2).
// Both families share this limit. Even in d to the last bit.
double eval_limit(const KernelSpec& spec, double d);

// Finite-size kernel K_alpha(x, y).
//   toda:   lambda * exp(-(e^{x-a} + e^{-x-a} + e^{y-a} + e^{-y-a})) / cosh((x-y)/2)
//   window: k(x - y) restricted to |x| < alpha, |y| < alpha
// Symmetric in (x, y) and invariant under (x, y) -> (-x, -y) bit-for-bit.
double eval_window_kernel(const KernelSpec& spec, double alpha, double x, double y);

// Edge limits of K_alpha under translation to the two escaping edges.
//   minus: vanishes as x -> -inf   (toda: lambda * exp(-(e^{-x} + e^{-y})) / cosh((x-y)/2))
//   plus:  vanishes as x -> +inf   (toda: lambda * exp(-(e^{x} + e^{y})) / cosh((x-y)/2))
// For the window family these are the half-line truncations of k: the minus
// limit lives on {x >= 0, y >= 0}, the plus limit on {x < 0, y < 0}.
// Reflection law: plus(x, y) == minus(-x, -y) away from the 0 boundary.
double eval_half_limit(const KernelSpec& spec, HalfLine side, double x, double y);

// Defect between an edge limit and its own half-line truncation:
//   k11(x, y) = minus(x, y) - [x >= 0][y >= 0] k(x - y)
//   k22(x, y) = plus(x, y)  - [x < 0][y < 0]  k(x - y)
// Identically zero for the window family. k22(x, y) == k11(-x, -y) away
// from the 0 boundary.
double eval_correction_kernel(const KernelSpec& spec, CorrectionKind which, double x, double y);

// Support box for K_alpha at tolerance tol (entries outside [lo, hi]^2 are
// below tol in magnitude). Requires alpha >= 0 and tol in (0, 1).
DecayProfile decay_radius(const KernelSpec& spec, double alpha, double tol);

// Support box for a correction kernel at tolerance tol.
DecayProfile decay_radius(const KernelSpec& spec, CorrectionKind which, double tol);

} // namespace opdet
