#pragma once

// Periodic Sobolev scale over (0, period) in the real trigonometric basis
// {1, cos kt, sin kt : 1 <= k <= K}, declared X_0-orthonormal.  The spectral
// coefficient of the constant mode is the mean of the signal, and the
// coefficients of cos/sin modes are the classical Fourier amplitudes.  Mode k
// carries the eigenvalue 1 + k^2, so the X_s norms are the periodic H^s norms.

#include <cmath>
#include <memory>
#include <numbers>

#include "hscale/scale.hpp"

namespace hscale {

/// Maximum truncation; keeps lambda^s within double range for |s| <= 2.
inline constexpr int kMaxFourierWavenumber = 4096;

/// Index of the constant mode is 0; cos-k sits at 2k-1, sin-k at 2k.
inline Eigen::Index fourier_cos_index(int k) { return 2 * k - 1; }
inline Eigen::Index fourier_sin_index(int k) { return 2 * k; }

/// Builds the Fourier scale of dimension 2K+1.  Primal and spectral
/// coordinates coincide (the trigonometric basis is already diagonalizing),
/// so both transforms are the identity.
inline ScalePtr build_fourier_scale(int max_wavenumber, double period = 2.0 * std::numbers::pi) {
    if (max_wavenumber < 0)
        throw InvalidArgument("build_fourier_scale: negative max wavenumber");
    if (max_wavenumber > kMaxFourierWavenumber)
        throw InvalidArgument("build_fourier_scale: max wavenumber exceeds cap");
    if (!(period > 0.0)) throw InvalidArgument("build_fourier_scale: period must be positive");

    const Eigen::Index n = 2 * static_cast<Eigen::Index>(max_wavenumber) + 1;
    Vector lam(n);
    lam[0] = 1.0;
    for (int k = 1; k <= max_wavenumber; ++k) {
        double l = 1.0 + static_cast<double>(k) * k;
        lam[fourier_cos_index(k)] = l;
        lam[fourier_sin_index(k)] = l;
    }
    Matrix id = Matrix::Identity(n, n);
    return std::make_shared<SpectralScale>(std::move(lam), id, id, "fourier-periodic");
}

inline int fourier_max_wavenumber(const SpectralScale& scale) {
    return static_cast<int>((scale.dim() - 1) / 2);
}

/// Evaluates the element at a point t of (0, period).
inline double fourier_evaluate(const ScaleElement& x, double t,
                               double period = 2.0 * std::numbers::pi) {
    const Vector& c = x.coeffs();
    const double w = 2.0 * std::numbers::pi / period;
    double acc = c[0];
    const int K = fourier_max_wavenumber(*x.scale());
    for (int k = 1; k <= K; ++k)
        acc += c[fourier_cos_index(k)] * std::cos(k * w * t) +
               c[fourier_sin_index(k)] * std::sin(k * w * t);
    return acc;
}

/// Recovers spectral coefficients from samples on the uniform grid
/// t_j = j * period / N, j = 0..N-1, by the rectangle rule (exact for
/// trigonometric polynomials with 2K < N).
inline ScaleElement fourier_from_samples(ScalePtr scale, const Vector& samples,
                                         double period = 2.0 * std::numbers::pi) {
    const int K = fourier_max_wavenumber(*scale);
    const Eigen::Index N = samples.size();
    if (N <= 2 * K) throw InvalidArgument("fourier_from_samples: grid too coarse for K");
    Vector c = Vector::Zero(scale->dim());
    const double w = 2.0 * std::numbers::pi / period;
    const double h = period / static_cast<double>(N);
    for (Eigen::Index j = 0; j < N; ++j) c[0] += samples[j];
    c[0] *= h / period;
    for (int k = 1; k <= K; ++k) {
        double ak = 0.0, bk = 0.0;
        for (Eigen::Index j = 0; j < N; ++j) {
            double t = h * static_cast<double>(j);
            ak += samples[j] * std::cos(k * w * t);
            bk += samples[j] * std::sin(k * w * t);
        }
        c[fourier_cos_index(k)] = ak * 2.0 * h / period;
        c[fourier_sin_index(k)] = bk * 2.0 * h / period;
    }
    return ScaleElement(std::move(scale), std::move(c));
}

}  // namespace hscale
