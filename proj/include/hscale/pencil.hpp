#pragma once

// Scale over an interval built from a matrix pencil (A, M): A phi = lambda M phi
// with M-orthonormal eigenvectors.  M is the mass (X_0) Gram and A the
// smoothness (X_1) Gram of some primal basis, so that
//
//     ||v||_{X_0}^2 = v^T M v   and   ||v||_{X_1}^2 = v^T A v
//
// hold exactly, and fractional indices interpolate through the eigenvalues.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <memory>

#include "hscale/scale.hpp"

namespace hscale {

inline constexpr Eigen::Index kMaxPencilDim = 2048;

namespace detail {
inline void require_symmetric(const Matrix& X, const char* name) {
    double scale = X.cwiseAbs().maxCoeff();
    if ((X - X.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(scale, 1.0))
        throw InvalidArgument(std::string("build_pencil_scale: ") + name + " is not symmetric");
}
}  // namespace detail

/// Solves the generalized eigenproblem A phi = lambda M phi and packages the
/// result as a SpectralScale.  to_spectral maps primal coefficients v to
/// Phi^T M v; from_spectral is Phi.
inline ScalePtr build_pencil_scale(const Matrix& mass_gram, const Matrix& smooth_gram,
                                   const std::string& label = "pencil-interval") {
    const Eigen::Index n = mass_gram.rows();
    if (n == 0 || mass_gram.cols() != n)
        throw InvalidArgument("build_pencil_scale: mass Gram must be square and nonempty");
    if (smooth_gram.rows() != n || smooth_gram.cols() != n)
        throw InvalidArgument("build_pencil_scale: Gram dimensions disagree");
    if (n > kMaxPencilDim) throw InvalidArgument("build_pencil_scale: dimension exceeds cap");
    detail::require_symmetric(mass_gram, "mass Gram");
    detail::require_symmetric(smooth_gram, "smoothness Gram");

    Eigen::LLT<Matrix> llt(mass_gram);
    if (llt.info() != Eigen::Success)
        throw InvalidArgument("build_pencil_scale: mass Gram is not positive definite");

    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(smooth_gram, mass_gram);
    if (es.info() != Eigen::Success)
        throw NumericError("build_pencil_scale: generalized eigensolver failed");
    Vector lam = es.eigenvalues();
    Matrix phi = es.eigenvectors();  // M-orthonormal, eigenvalues ascending

    if (!(lam.minCoeff() > 0.0))
        throw InvalidArgument("build_pencil_scale: smoothness Gram is not positive definite");

    // Residual check of the decomposition.
    double resid = (smooth_gram * phi - mass_gram * phi * lam.asDiagonal()).cwiseAbs().maxCoeff();
    double scale = smooth_gram.cwiseAbs().maxCoeff();
    if (resid > 1e-8 * std::max(scale, 1.0))
        throw NumericError("build_pencil_scale: eigen residual too large: " +
                           std::to_string(resid));

    Matrix to_spec = phi.transpose() * mass_gram;
    return std::make_shared<SpectralScale>(std::move(lam), std::move(to_spec), std::move(phi),
                                           label);
}

}  // namespace hscale
