#pragma once

// Deterministic, platform-independent noise generation.  Draws come from
// mt19937_64 (fully specified by the standard) turned into standard normals
// by the Box-Muller transform, so the same seed produces bit-identical noise
// on every platform.  Perturbations are rescaled to hit the requested norm
// exactly, making the ladder's effective noise level sharp.

#include <cstdint>
#include <functional>

#include "hscale/scale.hpp"

#include <random>

namespace hscale {

/// Mixes a base seed with stream identifiers (splitmix64 finalizer), so each
/// (cell, ladder point, repetition) gets an independent deterministic stream.
inline std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t x = seed;
    for (std::uint64_t id : ids) {
        x += 0x9e3779b97f4a7c15ULL + id;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        x = x ^ (x >> 31);
    }
    return x;
}

/// Vector of i.i.d. standard normals from mt19937_64 + Box-Muller.
inline Vector standard_normal_vector(std::uint64_t seed, Eigen::Index dim) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
        // 53-bit uniform in (0, 1]; never zero, so the log below is finite.
        return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
    };
    Vector out(dim);
    const double two_pi = 2.0 * std::numbers::pi;
    for (Eigen::Index i = 0; i < dim; i += 2) {
        double u1 = uniform(), u2 = uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        out[i] = radius * std::cos(two_pi * u2);
        if (i + 1 < dim) out[i + 1] = radius * std::sin(two_pi * u2);
    }
    return out;
}

struct NoiseModel {
    std::uint64_t seed = 0;
};

/// y + noise with the perturbation calibrated so that norm(noise) == delta
/// exactly (to rounding).  `norm` must be the data-space norm of the problem.
inline Vector make_noisy_data(const Vector& y, double delta, std::uint64_t seed,
                              const std::function<double(const Vector&)>& norm) {
    if (delta < 0.0) throw InvalidArgument("make_noisy_data: delta must be >= 0");
    if (delta == 0.0) return y;
    Vector draw = standard_normal_vector(seed, y.size());
    double n = norm(draw);
    if (n == 0.0) {
        draw = standard_normal_vector(mix_seed(seed, {1}), y.size());
        n = norm(draw);
        if (n == 0.0) throw NumericError("make_noisy_data: degenerate zero draw");
    }
    return y + draw * (delta / n);
}

}  // namespace hscale
