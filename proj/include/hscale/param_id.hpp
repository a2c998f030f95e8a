#pragma once

// Coefficient identification for U' + cU = 0 on [0, T], U(0) = U0 given.
// The state U is continuous piecewise linear over a uniform grid, the
// coefficient c a cubic spline over the same grid, and the initial value
// problem is discretized by a Petrov-Galerkin method with discontinuous
// piecewise constant test functions:
//
//     U_{i+1} - U_i + int_{t_i}^{t_{i+1}} c U dt = 0.
//
// The integrand is (cubic c) x (linear U), degree 4, integrated exactly by
// 3-point Gauss quadrature, so the discrete Jacobian and its adjoint are
// exact on the discrete level.

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "hscale/bspline.hpp"
#include "hscale/pencil.hpp"
#include "hscale/scale.hpp"

namespace hscale {

struct ParamIdSpec {
    double horizon = 1.0;  // T
    double u0 = 1.0;       // U(0), must be nonzero
    int grid_n = 200;
    double s = 1.0;        // penalty index
    int gauss_points = 3;  // per-interval quadrature order

    void validate() const {
        if (u0 == 0.0) throw InvalidArgument("ParamIdSpec: U(0) must be nonzero");
        if (grid_n < 1) throw InvalidArgument("ParamIdSpec: grid_n must be >= 1");
        if (gauss_points < 3)
            throw InvalidArgument("ParamIdSpec: need at least 3 Gauss points per interval");
    }
};

/// Cubic-spline coefficient c with control values over the grid of [0, T].
struct CoefficientSpline {
    Vector control;  // dimension grid_n + 3

    double evaluate(const SplineGrid& grid, double t) const {
        return spline_evaluate(grid, control, t);
    }
};

/// Nodal values of the piecewise linear state U_0 .. U_n.
struct StateTrajectory {
    Vector nodal;
};

enum class ParamIdReference { hat, t_sqrt_t, parabola };

struct ParamIdTruth {
    CoefficientSpline coefficient;
    double u_max;
};

/// Forward problem with precomputed quadrature tables and scale structure.
/// Immutable after construction; forward and Jacobian evaluations are pure.
class ParamIdProblem {
  public:
    explicit ParamIdProblem(ParamIdSpec spec)
        : spec_(spec), grid_(spec.grid_n, spec.horizon) {
        spec_.validate();
        build_quadrature_tables();
        build_observation_mass();
        mass_gram_ = spline_mass_gram(grid_);
        // Pencil on the H2 Gram ||c||_0^2 + ||c''||_0^2, the norm defining X_2.
        // With the index map sigma -> sigma/2, X_0 and X_2 are realized exactly
        // and X_1 is an equivalent discrete H1 norm; natural boundary
        // conditions of the generator first restrict X_u beyond u = 5/2.
        scale_ = build_pencil_scale(mass_gram_, spline_h2_gram(grid_), "pencil-interval");
    }

    const ParamIdSpec& spec() const { return spec_; }
    const SplineGrid& grid() const { return grid_; }
    const ScalePtr& scale() const { return scale_; }
    int state_dim() const { return spec_.grid_n + 1; }
    int coeff_dim() const { return grid_.dim(); }
    const Matrix& observation_mass() const { return obs_mass_; }
    const Matrix& coefficient_mass() const { return mass_gram_; }

    /// L2(0,T) inner product of two piecewise linear observations.
    double obs_inner(const Vector& u, const Vector& v) const {
        return u.dot(obs_mass_ * v);
    }
    double obs_norm(const Vector& u) const { return std::sqrt(std::max(0.0, obs_inner(u, u))); }

    /// X_sigma norm of a coefficient (spline control vector).  Pencil index 1
    /// corresponds to X_2, hence the factor 1/2 on the scale index.
    double coeff_norm(const Vector& control, double sigma) const {
        return scale_norm(ScaleElement(scale_, scale_->to_spectral(control)), 0.5 * sigma);
    }

    /// Penalty Gram S_sigma with v^T S_sigma v = ||v||_{X_sigma}^2.
    Matrix penalty_gram(double sigma) const {
        // to_spectral = Phi^T M, so S = to_spectral^T Lambda^{sigma/2} to_spectral.
        const Eigen::Index n = scale_->dim();
        const Matrix& B = scale_->to_spectral_matrix();
        Vector w(n);
        for (Eigen::Index i = 0; i < n; ++i)
            w[i] = std::pow(scale_->eigenvalue(i), 0.5 * sigma);
        return B.transpose() * w.asDiagonal() * B;
    }

    /// Solves the interval recursion U_{i+1}(1 + int c phi_R) = U_i(1 - int c phi_L).
    StateTrajectory solve_state(const CoefficientSpline& c) const {
        if (c.control.size() != coeff_dim())
            throw InvalidArgument("solve_state: control vector has wrong dimension");
        detail::check_finite(c.control, "solve_state");
        Vector u(state_dim());
        u[0] = spec_.u0;
        for (int i = 0; i < spec_.grid_n; ++i) {
            auto [a, b] = interval_weights(c, i);
            double denom = 1.0 + b;
            if (denom <= 0.0)
                throw NumericError("solve_state: singular interval equation at interval " +
                                   std::to_string(i));
            u[i + 1] = u[i] * (1.0 - a) / denom;
        }
        return {std::move(u)};
    }

    /// Forward map F(c) = U as an L2(0,T) observation.
    StateTrajectory forward(const CoefficientSpline& c) const { return solve_state(c); }

    /// Directional derivative W = F'(c) h: same scheme for W' + cW = -hU, W(0)=0.
    StateTrajectory jacobian_apply(const CoefficientSpline& c, const CoefficientSpline& h) const {
        StateTrajectory u = solve_state(c);
        return jacobian_apply_with_state(c, h, u);
    }

    StateTrajectory jacobian_apply_with_state(const CoefficientSpline& c,
                                              const CoefficientSpline& h,
                                              const StateTrajectory& u) const {
        Vector w(state_dim());
        w[0] = 0.0;
        for (int i = 0; i < spec_.grid_n; ++i) {
            auto [a, b] = interval_weights(c, i);
            double src = interval_source(h, u, i);
            w[i + 1] = (w[i] * (1.0 - a) - src) / (1.0 + b);
        }
        return {std::move(w)};
    }

    /// Explicit (n+1) x (n+3) Jacobian of the discrete forward map at c,
    /// assembled column-by-column from the linearized recursion.
    Matrix assemble_jacobian(const CoefficientSpline& c, const StateTrajectory& u) const {
        Matrix J(state_dim(), coeff_dim());
        CoefficientSpline basis;
        basis.control = Vector::Zero(coeff_dim());
        for (int j = 0; j < coeff_dim(); ++j) {
            basis.control[j] = 1.0;
            J.col(j) = jacobian_apply_with_state(c, basis, u).nodal;
            basis.control[j] = 0.0;
        }
        return J;
    }

    /// Adjoint d = F'(c)^* r in coefficient space: the exact transpose of the
    /// assembled Jacobian composed with the observation mass matrix, so that
    /// <F'(c)h, r>_obs = <h, d> for all h.
    Vector jacobian_adjoint(const CoefficientSpline& c, const Vector& r) const {
        StateTrajectory u = solve_state(c);
        Matrix J = assemble_jacobian(c, u);
        return J.transpose() * (obs_mass_ * r);
    }

  private:
    std::pair<double, double> interval_weights(const CoefficientSpline& c, int i) const {
        // a = int c phi_left, b = int c phi_right over interval i.
        double a = 0.0, b = 0.0;
        const QuadTable& tab = quad_[static_cast<std::size_t>(i)];
        for (std::size_t q = 0; q < tab.weight.size(); ++q) {
            double cv = 0.0;
            for (int j = 0; j < 4; ++j)
                cv += c.control[tab.first[q] + j] * tab.basis[q][static_cast<std::size_t>(j)];
            a += tab.weight[q] * cv * tab.phi_left[q];
            b += tab.weight[q] * cv * tab.phi_right[q];
        }
        return {a, b};
    }

    double interval_source(const CoefficientSpline& h, const StateTrajectory& u, int i) const {
        // int h U over interval i with U piecewise linear.
        double acc = 0.0;
        const QuadTable& tab = quad_[static_cast<std::size_t>(i)];
        for (std::size_t q = 0; q < tab.weight.size(); ++q) {
            double hv = 0.0;
            for (int j = 0; j < 4; ++j)
                hv += h.control[tab.first[q] + j] * tab.basis[q][static_cast<std::size_t>(j)];
            double uv = u.nodal[i] * tab.phi_left[q] + u.nodal[i + 1] * tab.phi_right[q];
            acc += tab.weight[q] * hv * uv;
        }
        return acc;
    }

    struct QuadTable {
        std::vector<double> weight;
        std::vector<double> phi_left, phi_right;
        std::vector<int> first;
        std::vector<std::array<double, 4>> basis;
    };

    void build_quadrature_tables() {
        auto [nodes, weights] = gauss_rule(spec_.gauss_points >= 5 ? 5 : 3);
        const double h = grid_.step();
        quad_.resize(static_cast<std::size_t>(spec_.grid_n));
        for (int i = 0; i < spec_.grid_n; ++i) {
            QuadTable& tab = quad_[static_cast<std::size_t>(i)];
            double t0 = grid_.node(i);
            for (std::size_t q = 0; q < nodes.size(); ++q) {
                double xi = 0.5 * (nodes[q] + 1.0);  // in (0,1)
                double t = t0 + h * xi;
                tab.weight.push_back(0.5 * h * weights[q]);
                tab.phi_left.push_back(1.0 - xi);
                tab.phi_right.push_back(xi);
                BasisEval b = spline_basis(grid_, t);
                tab.first.push_back(b.first);
                tab.basis.push_back(b.value);
            }
        }
    }

    void build_observation_mass() {
        const int n = spec_.grid_n;
        const double h = grid_.step();
        obs_mass_ = Matrix::Zero(n + 1, n + 1);
        for (int i = 0; i < n; ++i) {
            obs_mass_(i, i) += h / 3.0;
            obs_mass_(i + 1, i + 1) += h / 3.0;
            obs_mass_(i, i + 1) += h / 6.0;
            obs_mass_(i + 1, i) += h / 6.0;
        }
    }

    ParamIdSpec spec_;
    SplineGrid grid_;
    std::vector<QuadTable> quad_;
    Matrix obs_mass_;
    Matrix mass_gram_;
    ScalePtr scale_;
};

/// Spline interpolant of the reference coefficient; all references are
/// nonnegative on [0, T].
///  - hat:       t then T-t;   in X_u for u < 3/2
///  - t_sqrt_t:  t^{3/2};      in X_u for u < 2
///  - parabola:  t(T-t);       in X_u for u < 5/2
inline ParamIdTruth param_id_reference(ParamIdReference kind, const ParamIdProblem& problem) {
    const SplineGrid& grid = problem.grid();
    const double T = grid.horizon();
    ParamIdTruth out;
    switch (kind) {
        case ParamIdReference::hat:
            out.coefficient.control = spline_interpolate(
                grid, [T](double t) { return t < T / 2.0 ? t : T - t; });
            out.u_max = 1.5;
            return out;
        case ParamIdReference::t_sqrt_t:
            out.coefficient.control =
                spline_interpolate(grid, [](double t) { return t * std::sqrt(t); });
            out.u_max = 2.0;
            return out;
        case ParamIdReference::parabola:
            out.coefficient.control =
                spline_interpolate(grid, [T](double t) { return t * (T - t); });
            out.u_max = 2.5;
            return out;
    }
    throw InvalidArgument("param_id_reference: unknown reference kind");
}

}  // namespace hscale
