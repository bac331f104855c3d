#include "opdet/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace opdet {

namespace {

// max(|lambda|, 1): decay boxes may only grow with the coupling.
double coupling_scale(const KernelSpec& spec) {
    return std::max(std::abs(spec.lambda), 1.0);
}

void check_tol(double tol) {
    if (!(tol > 0.0) || !(tol < 1.0))
        throw std::invalid_argument("decay_radius: need tol in (0, 1)");
}

} // namespace

double eval_limit(const KernelSpec& spec, double d) {
    return spec.lambda / std::cosh(0.5 * std::abs(d));
}

double eval_window_kernel(const KernelSpec& spec, double alpha, double x, double y) {
    switch (spec.family) {
    case Family::toda: {
        // Exponents grouped per variable so that swapping x and y, or negating
        // both, permutes the same summands: the value is bit-identical.
        const double px = std::exp(x - alpha) + std::exp(-x - alpha);
        const double py = std::exp(y - alpha) + std::exp(-y - alpha);
        return spec.lambda * std::exp(-(px + py)) / std::cosh(0.5 * std::abs(x - y));
    }
    case Family::window:
        if (std::abs(x) < alpha && std::abs(y) < alpha) return eval_limit(spec, x - y);
        return 0.0;
    }
    throw std::logic_error("eval_window_kernel: bad family");
}

double eval_half_limit(const KernelSpec& spec, HalfLine side, double x, double y) {
    switch (spec.family) {
    case Family::toda: {
        const double s = (side == HalfLine::minus)
                             ? std::exp(-x) + std::exp(-y)  // dies as x, y -> -inf
                             : std::exp(x) + std::exp(y);   // dies as x, y -> +inf
        return spec.lambda * std::exp(-s) / std::cosh(0.5 * std::abs(x - y));
    }
    case Family::window: {
        const bool inside = (side == HalfLine::minus) ? (x >= 0.0 && y >= 0.0)
                                                      : (x < 0.0 && y < 0.0);
        return inside ? eval_limit(spec, x - y) : 0.0;
    }
    }
    throw std::logic_error("eval_half_limit: bad family");
}

double eval_correction_kernel(const KernelSpec& spec, CorrectionKind which, double x, double y) {
    if (spec.family == Family::window) return 0.0; // half limits equal their truncations
    if (which == CorrectionKind::k11) {
        const double trunc = (x >= 0.0 && y >= 0.0) ? eval_limit(spec, x - y) : 0.0;
        return eval_half_limit(spec, HalfLine::minus, x, y) - trunc;
    }
    const double trunc = (x < 0.0 && y < 0.0) ? eval_limit(spec, x - y) : 0.0;
    return eval_half_limit(spec, HalfLine::plus, x, y) - trunc;
}

DecayProfile decay_radius(const KernelSpec& spec, double alpha, double tol) {
    check_tol(tol);
    if (alpha < 0.0) throw std::invalid_argument("decay_radius: need alpha >= 0");
    DecayProfile p;
    if (spec.lambda == 0.0) {
        p.vanishes = true;
        return p;
    }
    switch (spec.family) {
    case Family::toda: {
        // Diagonal tail exp(-e^{|x|-alpha}) <= tol/scale.
        const double inner = std::max(std::log(coupling_scale(spec) / tol), 1.0);
        const double r = alpha + std::log(inner);
        p.lo = -r;
        p.hi = r;
        return p;
    }
    case Family::window:
        if (alpha == 0.0) {
            p.vanishes = true;
            return p;
        }
        p.lo = -alpha;
        p.hi = alpha;
        return p;
    }
    throw std::logic_error("decay_radius: bad family");
}

DecayProfile decay_radius(const KernelSpec& spec, CorrectionKind which, double tol) {
    check_tol(tol);
    DecayProfile p;
    if (spec.lambda == 0.0 || spec.family == Family::window) {
        p.vanishes = true;
        return p;
    }
    // k11 diagonal: double-exponential cutoff on the left, e^{-x} tail on the
    // right. k22 is its mirror image.
    const double scale = coupling_scale(spec);
    const double lo = -std::log(std::max(0.5 * std::log(scale / tol), 1.0));
    const double hi = std::log(2.0 * scale / tol);
    if (which == CorrectionKind::k11) {
        p.lo = lo;
        p.hi = hi;
    } else {
        p.lo = -hi;
        p.hi = -lo;
    }
    return p;
}

} // namespace opdet
