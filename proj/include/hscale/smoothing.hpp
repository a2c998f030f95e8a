#pragma once

// Periodic data smoothing: the forward map is the identity embedding of
// H^0_per(0,2pi) into the data space H^{-1}_per(0,2pi).  Noise is measured in
// the H^{-1} norm, the penalty in H^s, and the Tikhonov minimizer is an
// explicit spectral filter.

#include <cmath>

#include "hscale/fourier.hpp"
#include "hscale/scale.hpp"

namespace hscale {

/// A 2pi-periodic signal: an element over a Fourier scale.
using PeriodicSignal = ScaleElement;

/// Which realization of the stability assumption a study uses.  The Lipschitz
/// variant (a = 1, gamma = 1) comes from the two-sided estimate
/// ||f||_{-1} <= ||Tf|| <= ||f||_{-1}; the Hoelder variant (a = 0,
/// gamma = 1/2) needs penalty index s >= 1.
enum class SmoothingStability { lipschitz_a1, hoelder_a0 };

struct SmoothingSpec {
    int max_wavenumber = 2048;
    double s = 0.0;
    SmoothingStability stability = SmoothingStability::lipschitz_a1;

    void validate() const {
        if (max_wavenumber < 1) throw InvalidArgument("SmoothingSpec: K must be >= 1");
        if (stability == SmoothingStability::hoelder_a0 && s < 1.0)
            throw InvalidArgument("SmoothingSpec: hoelder_a0 variant requires s >= 1");
    }

    StabilityParams stability_params(double u, double r) const {
        StabilityParams sp;
        if (stability == SmoothingStability::lipschitz_a1) {
            sp.a = 1.0;
            sp.gamma = 1.0;
        } else {
            sp.a = 0.0;
            sp.gamma = 0.5;
        }
        sp.s = s;
        sp.u = u;
        sp.r = r;
        return sp;
    }
};

/// The forward operator T: identity on coefficients; only the norm of the
/// target space changes.
inline PeriodicSignal smoothing_forward(const PeriodicSignal& f) { return f; }

/// Data-space norm: the H^{-1} norm.
inline double smoothing_y_norm(const PeriodicSignal& g) { return scale_norm(g, -1.0); }

/// Exact global minimizer of ||f - d||_{-1}^2 + alpha ||f||_s^2 for the
/// identity forward map: the spectral filter f_i = d_i / (1 + alpha l_i^{s+1})
/// with l_i = 1 + k^2.
inline PeriodicSignal tikhonov_closed_form(const PeriodicSignal& data, double alpha, double s) {
    if (alpha < 0.0) throw InvalidArgument("tikhonov_closed_form: alpha must be >= 0");
    Vector c = data.coeffs();
    const Vector& lam = data.scale()->eigenvalues();
    for (Eigen::Index i = 0; i < c.size(); ++i)
        c[i] /= 1.0 + alpha * std::pow(lam[i], s + 1.0);
    return PeriodicSignal(data.scale(), std::move(c));
}

enum class SmoothingReference { step, sqrt_bump, hat };

struct SmoothingTruth {
    PeriodicSignal signal;
    double u_max;  // supremum of X_u membership (open)
};

/// Truncated Fourier expansion of the reference signal, from analytic
/// coefficient formulas (no sampling, no aliasing).
///  - step:      0 on (0,pi), 1 on (pi,2pi); in H^u for u < 1/2
///  - sqrt_bump: sqrt(t(2pi-t));             in H^u for u < 1
///  - hat:       t on (0,pi), 2pi-t after;   in H^u for u < 3/2
inline SmoothingTruth smoothing_reference(SmoothingReference kind, int max_wavenumber) {
    ScalePtr scale = build_fourier_scale(max_wavenumber);
    Vector c = Vector::Zero(scale->dim());
    const double pi = std::numbers::pi;
    switch (kind) {
        case SmoothingReference::step: {
            c[0] = 0.5;
            for (int k = 1; k <= max_wavenumber; ++k) {
                double sign = (k % 2 == 0) ? 1.0 : -1.0;
                c[fourier_sin_index(k)] = (sign - 1.0) / (k * pi);
            }
            return {PeriodicSignal(scale, std::move(c)), 0.5};
        }
        case SmoothingReference::sqrt_bump: {
            c[0] = pi * pi / 4.0;
            for (int k = 1; k <= max_wavenumber; ++k) {
                double sign = (k % 2 == 0) ? 1.0 : -1.0;
                c[fourier_cos_index(k)] = sign * pi * std::cyl_bessel_j(1, k * pi) / k;
            }
            return {PeriodicSignal(scale, std::move(c)), 1.0};
        }
        case SmoothingReference::hat: {
            c[0] = pi / 2.0;
            for (int k = 1; k <= max_wavenumber; ++k) {
                double sign = (k % 2 == 0) ? 1.0 : -1.0;
                c[fourier_cos_index(k)] = 2.0 * (sign - 1.0) / (pi * k * k);
            }
            return {PeriodicSignal(scale, std::move(c)), 1.5};
        }
    }
    throw InvalidArgument("smoothing_reference: unknown reference kind");
}

}  // namespace hscale
