#pragma once

#include "opdet/kernels.hpp"

#include <complex>
#include <string>
#include <vector>

namespace opdet {

// Fourier conventions used throughout (and assumed by every constant below):
//   forward:  hat_k(xi) = integral e^{+i x xi} k(x) dx
//   inverse:  s(x)      = (2 pi)^{-1} integral e^{-i x xi} log sigma(xi) dxi
// The critical negative coupling of the sech family sits at -1/(2 pi) under
// this convention (sigma(0) = 1 + 2 pi lambda).

// Symbol sigma = 1 + hat_k sampled on a uniform, symmetric xi grid
// (odd sample count, so xi = 0 and the +/- pairs are exact).
struct SymbolData {
    KernelSpec spec;
    double xi_max = 0.0;
    double step = 0.0;
    std::vector<double> xi;
    std::vector<std::complex<double>> sigma;
    std::vector<std::complex<double>> log_sigma; // phase-unwrapped branch
    double min_abs = 0.0;  // min |sigma| over the samples
    int winding = 0;       // winding of sigma about 0 (0 required downstream)
    bool winding_valid = false;
    bool sign_change = false; // real sigma crossed 0 between samples
};

struct WindingResult {
    int winding = 0;
    bool valid = false;
    bool sign_change = false;
    double max_jump = 0.0; // largest phase step seen, radians
};

// Accumulated phase of a sampled curve, in turns. A real sign flip (or an
// exact zero) marks sign_change and invalidates the count; a phase step above
// pi/2 between consecutive samples with no real flip throws, asking for a
// denser sampling.
WindingResult unwrap_winding(const std::vector<std::complex<double>>& samples);

// Closed-form transform of the shared limit kernel:
//   hat_k(xi) = 2 pi lambda sech(pi xi).
double hat_k(const KernelSpec& spec, double xi);

// The same transform by direct quadrature of e^{i x xi} k(x) on a truncated
// domain; used to validate the closed form, never in the hot path.
double hat_k_quadrature(const KernelSpec& spec, double xi, double tol = 1e-12);

struct SymbolOptions {
    double xi_max = 16.0;
    std::size_t samples = 16385; // odd: keeps the grid symmetric through 0
};

SymbolData build_symbol(const KernelSpec& spec, const SymbolOptions& opts = {});

struct IndexReport {
    bool ok = false;
    double min_abs = 0.0;
    int winding = 0;
    bool winding_valid = false;
    bool sign_change = false;
    std::string detail; // human-readable reason when !ok
};

// Factorization admissibility: sigma bounded away from zero (above `floor`),
// no sign change, winding number zero.
IndexReport check_index(const SymbolData& sd, double floor = 1e-6);

// s(x) at the requested points, by trapezoid sum over the symbol grid.
// Throws IndexError when the symbol fails check_index.
std::vector<std::complex<double>> log_symbol_ift(const SymbolData& sd,
                                                 const std::vector<double>& xs);

struct SzegoConstants {
    double log_g = 0.0; // s(0)
    double log_e = 0.0; // integral_0^inf x s(x) s(-x) dx
    double g = 1.0;
    double e = 1.0;
};

// Both constants from the transform route. x_max truncates the log_e
// integral; s decays exponentially, so the default loses nothing at double
// precision.
SzegoConstants szego_constants(const SymbolData& sd, double x_max = 50.0, int n_per_panel = 20);

struct EOperatorOptions {
    double domain_l = 30.0;  // finite section [0, L]
    double margin = 30.0;    // extra reach of the inner composition variable
    int n_per_panel = 40;
    double table_step = 0.01; // resolvent-kernel table spacing
};

// E by the operator route: the finite section of the product W(sigma)
// W(sigma^{-1}) on [0, L]. The product's kernel is assembled before
// truncation -- the composition integral runs over [0, L + margin] -- because
// truncating each factor first converges to the wrong limit (E squared).
// Converges to E as L grows; the default options reach ~1e-12 relative.
double e_operator_route(const SymbolData& sd, const EOperatorOptions& opts = {});

// Most negative coupling with sigma still positive, located by bisection on
// min Re sigma. Documented resolution: -1/(2 pi) under this file's transform
// convention.
double critical_coupling(Family family = Family::toda, double tol = 1e-10);

} // namespace opdet
