#pragma once

// Cubic B-splines over a uniform grid of [0, T] with an open (clamped) knot
// vector.  n intervals give a space of dimension n + 3.  Provides basis
// evaluation with derivatives, Gauss quadrature, L2/H1 Gram matrices, and
// interpolation at the Greville abscissae.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "hscale/scale.hpp"

namespace hscale {

/// Uniform clamped cubic-spline grid on [0, T].
class SplineGrid {
  public:
    static constexpr int kDegree = 3;

    SplineGrid(int intervals, double horizon) : n_(intervals), T_(horizon) {
        if (intervals < 1) throw InvalidArgument("SplineGrid: need at least one interval");
        if (!(horizon > 0.0)) throw InvalidArgument("SplineGrid: horizon must be positive");
        const int p = kDegree;
        knots_.resize(static_cast<std::size_t>(n_ + 2 * p + 1));
        const double h = T_ / n_;
        for (int i = 0; i <= p; ++i) knots_[static_cast<std::size_t>(i)] = 0.0;
        for (int i = 1; i < n_; ++i) knots_[static_cast<std::size_t>(p + i)] = h * i;
        for (int i = 0; i <= p; ++i) knots_[static_cast<std::size_t>(n_ + p + i)] = T_;
    }

    int intervals() const { return n_; }
    double horizon() const { return T_; }
    double step() const { return T_ / n_; }
    int dim() const { return n_ + kDegree; }
    double node(int i) const { return T_ * i / n_; }
    const std::vector<double>& knots() const { return knots_; }

    /// Knot span index for t in [0, T]: largest i with knots[i] <= t (< dim).
    int find_span(double t) const {
        const int p = kDegree;
        if (t >= T_) return dim() - 1;
        if (t <= 0.0) return p;
        int lo = p, hi = dim();
        while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            if (knots_[static_cast<std::size_t>(mid)] <= t)
                lo = mid;
            else
                hi = mid;
        }
        return lo;
    }

    /// Greville abscissae (averages of p consecutive interior knots); natural
    /// interpolation points, dim() of them, spanning [0, T].
    std::vector<double> greville() const {
        std::vector<double> g(static_cast<std::size_t>(dim()));
        for (int j = 0; j < dim(); ++j) {
            double acc = 0.0;
            for (int i = 1; i <= kDegree; ++i) acc += knots_[static_cast<std::size_t>(j + i)];
            g[static_cast<std::size_t>(j)] = acc / kDegree;
        }
        return g;
    }

  private:
    int n_;
    double T_;
    std::vector<double> knots_;
};

/// Values (and optionally derivatives) of the four basis functions that are
/// nonzero at t; the first one has global index span - 3.
struct BasisEval {
    int first = 0;                      // global index of the first nonzero basis
    std::array<double, 4> value{};      // B_j(t)
    std::array<double, 4> deriv{};      // B_j'(t)
    std::array<double, 4> deriv2{};     // B_j''(t)
};

/// Cox-de Boor evaluation with derivatives up to order 2.
inline BasisEval spline_basis(const SplineGrid& grid, double t) {
    constexpr int p = SplineGrid::kDegree;
    const auto& U = grid.knots();
    const int span = grid.find_span(t);

    // ndu[j][r]: triangular table of basis values and knot differences.
    double ndu[p + 1][p + 1];
    double left[p + 1], right[p + 1];
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = t - U[static_cast<std::size_t>(span + 1 - j)];
        right[j] = U[static_cast<std::size_t>(span + j)] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            double temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    BasisEval out;
    out.first = span - p;
    for (int j = 0; j <= p; ++j) out.value[static_cast<std::size_t>(j)] = ndu[j][p];

    // Derivatives (The NURBS Book, A2.3), orders 1 and 2.
    double a[2][p + 1];
    double ders[3][p + 1] = {};
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        for (int k = 1; k <= 2; ++k) {
            double d = 0.0;
            int rk = r - k, pk = p - k;
            if (r >= k) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            int j1 = (rk >= -1) ? 1 : -rk;
            int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::swap(s1, s2);
        }
    }
    double fac = p;
    for (int j = 0; j <= p; ++j) out.deriv[static_cast<std::size_t>(j)] = ders[1][j] * fac;
    fac *= p - 1;
    for (int j = 0; j <= p; ++j) out.deriv2[static_cast<std::size_t>(j)] = ders[2][j] * fac;
    return out;
}

/// Evaluates the spline with the given control coefficients at t.
inline double spline_evaluate(const SplineGrid& grid, const Vector& control, double t) {
    BasisEval b = spline_basis(grid, t);
    double acc = 0.0;
    for (int j = 0; j < 4; ++j)
        acc += control[b.first + j] * b.value[static_cast<std::size_t>(j)];
    return acc;
}

/// Gauss-Legendre nodes and weights on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_rule(int points) {
    switch (points) {
        case 3: {
            double r = std::sqrt(3.0 / 5.0);
            return {{-r, 0.0, r}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
        }
        case 5: {
            double r1 = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
            double r2 = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
            double w1 = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
            double w2 = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
            return {{-r2, -r1, 0.0, r1, r2}, {w2, w1, 128.0 / 225.0, w1, w2}};
        }
        default:
            throw InvalidArgument("gauss_rule: only 3 and 5 point rules are provided");
    }
}

/// L2 Gram matrix of the cubic basis (5-point Gauss, exact for degree 6).
inline Matrix spline_mass_gram(const SplineGrid& grid) {
    const int dim = grid.dim();
    Matrix M = Matrix::Zero(dim, dim);
    auto [nodes, weights] = gauss_rule(5);
    const double h = grid.step();
    for (int i = 0; i < grid.intervals(); ++i) {
        double t0 = grid.node(i);
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            double t = t0 + 0.5 * h * (nodes[q] + 1.0);
            double w = 0.5 * h * weights[q];
            BasisEval b = spline_basis(grid, t);
            for (int jr = 0; jr < 4; ++jr)
                for (int jc = 0; jc < 4; ++jc)
                    M(b.first + jr, b.first + jc) +=
                        w * b.value[static_cast<std::size_t>(jr)] *
                        b.value[static_cast<std::size_t>(jc)];
        }
    }
    return M;
}

/// Gram matrix of first derivatives (stiffness part of the H1 inner product).
inline Matrix spline_derivative_gram(const SplineGrid& grid) {
    const int dim = grid.dim();
    Matrix D = Matrix::Zero(dim, dim);
    auto [nodes, weights] = gauss_rule(5);
    const double h = grid.step();
    for (int i = 0; i < grid.intervals(); ++i) {
        double t0 = grid.node(i);
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            double t = t0 + 0.5 * h * (nodes[q] + 1.0);
            double w = 0.5 * h * weights[q];
            BasisEval b = spline_basis(grid, t);
            for (int jr = 0; jr < 4; ++jr)
                for (int jc = 0; jc < 4; ++jc)
                    D(b.first + jr, b.first + jc) +=
                        w * b.deriv[static_cast<std::size_t>(jr)] *
                        b.deriv[static_cast<std::size_t>(jc)];
        }
    }
    return D;
}

/// Full H1 Gram: L2 part plus derivative part.
inline Matrix spline_h1_gram(const SplineGrid& grid) {
    return spline_mass_gram(grid) + spline_derivative_gram(grid);
}

/// Gram matrix of second derivatives (piecewise linear for cubics).
inline Matrix spline_second_derivative_gram(const SplineGrid& grid) {
    const int dim = grid.dim();
    Matrix D = Matrix::Zero(dim, dim);
    auto [nodes, weights] = gauss_rule(5);
    const double h = grid.step();
    for (int i = 0; i < grid.intervals(); ++i) {
        double t0 = grid.node(i);
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            double t = t0 + 0.5 * h * (nodes[q] + 1.0);
            double w = 0.5 * h * weights[q];
            BasisEval b = spline_basis(grid, t);
            for (int jr = 0; jr < 4; ++jr)
                for (int jc = 0; jc < 4; ++jc)
                    D(b.first + jr, b.first + jc) +=
                        w * b.deriv2[static_cast<std::size_t>(jr)] *
                        b.deriv2[static_cast<std::size_t>(jc)];
        }
    }
    return D;
}

/// H2 Gram ||c||_0^2 + ||c''||_0^2 (no cross or first-derivative term).
inline Matrix spline_h2_gram(const SplineGrid& grid) {
    return spline_mass_gram(grid) + spline_second_derivative_gram(grid);
}

/// Control coefficients of the spline interpolating f at the Greville points.
inline Vector spline_interpolate(const SplineGrid& grid, const std::function<double(double)>& f) {
    const int dim = grid.dim();
    Matrix C = Matrix::Zero(dim, dim);
    Vector rhs(dim);
    auto pts = grid.greville();
    for (int i = 0; i < dim; ++i) {
        BasisEval b = spline_basis(grid, pts[static_cast<std::size_t>(i)]);
        for (int j = 0; j < 4; ++j)
            if (b.first + j < dim) C(i, b.first + j) = b.value[static_cast<std::size_t>(j)];
        rhs[i] = f(pts[static_cast<std::size_t>(i)]);
    }
    Eigen::PartialPivLU<Matrix> lu(C);
    Vector sol = lu.solve(rhs);
    if (!sol.allFinite()) throw NumericError("spline_interpolate: collocation solve failed");
    return sol;
}

}  // namespace hscale
