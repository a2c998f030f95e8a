#pragma once

// Hilbert scale {X_s} represented through a diagonalizing spectral basis.
//
// A scale is generated by a positive self-adjoint operator L; the norm of
// index s is ||x||_{X_s} = ||L^s x||.  We diagonalize L once, so that every
// element is a vector of spectral coefficients c_i, the eigenvalues lambda_i
// are positive and ascending, and every scale norm becomes a weighted
// euclidean norm
//
//     ||x||_{X_s}^2 = sum_i lambda_i^s c_i^2.
//
// Fractional powers of L are exact in this representation and norm
// evaluation is O(dim).

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "hscale/errors.hpp"

namespace hscale {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Diagonalized representation of a scale generator: eigenvalues plus the
/// transform between primal (nodal) and spectral coordinates.
class SpectralScale {
  public:
    SpectralScale(Vector eigenvalues, Matrix to_spectral, Matrix from_spectral,
                  std::string label)
        : eigenvalues_(std::move(eigenvalues)),
          to_spectral_(std::move(to_spectral)),
          from_spectral_(std::move(from_spectral)),
          label_(std::move(label)) {
        for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
            if (!(eigenvalues_[i] > 0.0))
                throw InvalidArgument("SpectralScale: eigenvalue " + std::to_string(i) +
                                      " is not positive");
            if (i > 0 && eigenvalues_[i] < eigenvalues_[i - 1])
                throw InvalidArgument("SpectralScale: eigenvalues not ascending at index " +
                                      std::to_string(i));
        }
    }

    Eigen::Index dim() const { return eigenvalues_.size(); }
    const Vector& eigenvalues() const { return eigenvalues_; }
    double eigenvalue(Eigen::Index i) const { return eigenvalues_[i]; }
    const std::string& label() const { return label_; }

    /// Primal (nodal) coefficients -> spectral coordinates.
    Vector to_spectral(const Vector& primal) const { return to_spectral_ * primal; }
    /// Spectral coordinates -> primal (nodal) coefficients.
    Vector from_spectral(const Vector& spectral) const { return from_spectral_ * spectral; }

    const Matrix& to_spectral_matrix() const { return to_spectral_; }
    const Matrix& from_spectral_matrix() const { return from_spectral_; }

  private:
    Vector eigenvalues_;
    Matrix to_spectral_;
    Matrix from_spectral_;
    std::string label_;
};

using ScalePtr = std::shared_ptr<const SpectralScale>;

/// An element of the scale, stored in spectral coordinates.  The spectral
/// coordinates are X_0-orthonormal, so ||x||_{X_0} is the euclidean norm of
/// the coefficient vector.
class ScaleElement {
  public:
    ScaleElement(ScalePtr scale, Vector coeffs)
        : scale_(std::move(scale)), coeffs_(std::move(coeffs)) {
        if (!scale_) throw InvalidArgument("ScaleElement: null scale");
        if (coeffs_.size() != scale_->dim())
            throw InvalidArgument("ScaleElement: coefficient count does not match scale dimension");
    }

    static ScaleElement zero(ScalePtr scale) {
        Vector c = Vector::Zero(scale->dim());
        return ScaleElement(std::move(scale), std::move(c));
    }

    const ScalePtr& scale() const { return scale_; }
    const Vector& coeffs() const { return coeffs_; }
    Vector& coeffs() { return coeffs_; }
    Eigen::Index dim() const { return coeffs_.size(); }

    ScaleElement operator+(const ScaleElement& o) const {
        return ScaleElement(scale_, coeffs_ + o.coeffs_);
    }
    ScaleElement operator-(const ScaleElement& o) const {
        return ScaleElement(scale_, coeffs_ - o.coeffs_);
    }
    ScaleElement operator*(double t) const { return ScaleElement(scale_, coeffs_ * t); }

  private:
    ScalePtr scale_;
    Vector coeffs_;
};

/// Parameters of the conditional stability assumption and of the rate
/// theorems: degree of ill-posedness a, stability exponent gamma, penalty
/// index s, solution smoothness u, reporting norm index r.
struct StabilityParams {
    double a = 0.0;      // degree of ill-posedness, >= 0
    double gamma = 1.0;  // stability exponent, in (0,1]
    double s = 0.0;      // penalty smoothness index
    double u = 0.0;      // solution smoothness index
    double r = 0.0;      // norm index for reported errors

    /// True when -a <= s <= u <= 2s+a, the admissible range of the rate
    /// theorems.  Violations are reported, never silently accepted.
    bool smoothness_admissible() const {
        return -a <= s && s <= u && u <= 2.0 * s + a;
    }
    /// True when -a <= r <= s, the admissible range for reported norms.
    bool report_norm_admissible() const { return -a <= r && r <= s; }

    void validate_basic() const {
        if (a < 0.0) throw InvalidArgument("StabilityParams: a must be >= 0");
        if (!(gamma > 0.0 && gamma <= 1.0))
            throw InvalidArgument("StabilityParams: gamma must be in (0,1]");
    }
};

namespace detail {
inline void check_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) throw InvalidElement(std::string(what) + ": non-finite coefficients");
}
}  // namespace detail

/// ||x||_{X_s} = (sum_i lambda_i^s c_i^2)^{1/2}.
inline double scale_norm(const ScaleElement& x, double s) {
    detail::check_finite(x.coeffs(), "scale_norm");
    if (s == 0.0) return x.coeffs().norm();
    const Vector& lam = x.scale()->eigenvalues();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.dim(); ++i) {
        double c = x.coeffs()[i];
        acc += std::pow(lam[i], s) * c * c;
    }
    if (!std::isfinite(acc)) throw NumericError("scale_norm: overflow in lambda^s weighting");
    return std::sqrt(acc);
}

/// Applies L^{s/2} coefficient-wise: coefficient i is multiplied by
/// lambda_i^{s/2}, so that scale_norm(x, s) == scale_norm(apply_power(x, s), 0).
inline ScaleElement apply_power(const ScaleElement& x, double s) {
    detail::check_finite(x.coeffs(), "apply_power");
    if (s == 0.0) return x;
    Vector c = x.coeffs();
    const Vector& lam = x.scale()->eigenvalues();
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        double w = std::pow(lam[i], 0.5 * s);
        if (!std::isfinite(w))
            throw NumericError("apply_power: overflow in lambda^{s/2} at index " +
                               std::to_string(i));
        c[i] *= w;
    }
    return ScaleElement(x.scale(), std::move(c));
}

/// Ratio ||x||_q / (||x||_p^{(r-q)/(r-p)} ||x||_r^{(q-p)/(r-p)}) for
/// p <= q <= r.  The interpolation inequality says this is <= 1.
inline double interpolation_ratio(const ScaleElement& x, double p, double q, double r) {
    if (p == r) throw InvalidArgument("interpolation_ratio: degenerate interval p == r");
    if (!(p <= q && q <= r)) throw InvalidArgument("interpolation_ratio: requires p <= q <= r");
    double np = scale_norm(x, p);
    double nq = scale_norm(x, q);
    double nr = scale_norm(x, r);
    if (np == 0.0 || nr == 0.0)
        throw InvalidArgument("interpolation_ratio: undefined for the zero element");
    double wp = (r - q) / (r - p);
    double wr = (q - p) / (r - p);
    return nq / (std::pow(np, wp) * std::pow(nr, wr));
}

}  // namespace hscale
