#pragma once

// Tikhonov functional T(x; alpha) = ||F(x) - y^d||_Y^2 + alpha ||x||_{X_s}^2,
// approximate minimization (exact spectral filter for the linear smoothing
// problem, damped Gauss-Newton for the coefficient problem), the parameter
// choice rules alpha = delta^2 (simple), alpha = delta^{2 - 2 gamma (u-s)/(u+a)}
// (a-priori) and the discrepancy ladder alpha_n = 2^{-n} stopped at the first
// residual <= 4 delta, plus the theoretical rate exponent gamma (u-r)/(u+a).

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hscale/param_id.hpp"
#include "hscale/scale.hpp"
#include "hscale/smoothing.hpp"

namespace hscale {

/// Certificate of an (approximate) minimization run.
struct MinimizeReport {
    double functional_value = 0.0;
    double residual_norm = 0.0;
    double penalty_norm = 0.0;
    int iterations = 0;
    double gradient_norm = 0.0;
    /// Upper bound on T(x) minus the best-known infimum (0 for the exact
    /// linear path; the last accepted functional decrease otherwise).
    double slack_certificate = 0.0;
    /// Accepted functional values, one per iteration (non-increasing).
    std::vector<double> functional_history;
    std::vector<std::string> warnings;
};

/// Gauss-Newton stagnation: the line search could not decrease the functional.
struct StagnationError : NumericError {
    StagnationError(const std::string& msg, MinimizeReport rep)
        : NumericError(msg), report(std::move(rep)) {}
    MinimizeReport report;
};

/// The discrepancy ladder ran past its cap without reaching residual <= 4 delta.
struct NoStopError : NumericError {
    using NumericError::NumericError;
};

// ---------------------------------------------------------------------------
// Parameter choice rules
// ---------------------------------------------------------------------------

/// alpha = delta^2.
inline double simple_alpha(double delta) {
    if (!(delta > 0.0)) throw InvalidArgument("simple_alpha: delta must be positive");
    return delta * delta;
}

/// Exponent of the a-priori rule: alpha = delta^{2 - 2 gamma (u-s)/(u+a)}.
inline double apriori_alpha_exponent(const StabilityParams& sp) {
    sp.validate_basic();
    if (sp.u + sp.a == 0.0)
        throw InvalidArgument("apriori_alpha: degenerate exponent, u + a == 0");
    return 2.0 - 2.0 * sp.gamma * (sp.u - sp.s) / (sp.u + sp.a);
}

inline double apriori_alpha(double delta, const StabilityParams& sp,
                            std::vector<std::string>* warnings = nullptr) {
    if (!(delta > 0.0)) throw InvalidArgument("apriori_alpha: delta must be positive");
    if (!sp.smoothness_admissible() && warnings)
        warnings->push_back("apriori_alpha: smoothness indices violate -a <= s <= u <= 2s+a");
    return std::pow(delta, apriori_alpha_exponent(sp));
}

/// Rate exponent gamma (u - r)/(u + a) of the error in the X_r norm.
struct TheoreticalRate {
    double exponent = 0.0;
    bool covered = true;  // false when outside -a <= r <= s <= u
};

inline TheoreticalRate theoretical_rate(const StabilityParams& sp) {
    sp.validate_basic();
    if (sp.u + sp.a == 0.0)
        throw InvalidArgument("theoretical_rate: degenerate exponent, u + a == 0");
    TheoreticalRate out;
    out.exponent = sp.gamma * (sp.u - sp.r) / (sp.u + sp.a);
    out.covered = sp.smoothness_admissible() && sp.report_norm_admissible();
    return out;
}

// ---------------------------------------------------------------------------
// Linear path: smoothing problem
// ---------------------------------------------------------------------------

/// Bundles noisy data with the smoothing setup; minimization is the exact
/// spectral filter, so the slack certificate is zero.
class SmoothingTikhonov {
  public:
    using Point = PeriodicSignal;

    SmoothingTikhonov(PeriodicSignal data, double s, double delta)
        : data_(std::move(data)), s_(s), delta_(delta) {
        if (delta < 0.0) throw InvalidArgument("SmoothingTikhonov: delta must be >= 0");
    }

    const PeriodicSignal& data() const { return data_; }
    double penalty_index() const { return s_; }
    double delta() const { return delta_; }

    double functional_value(const Point& x, double alpha) const {
        double res = smoothing_y_norm(x - data_);
        double pen = scale_norm(x, s_);
        return res * res + alpha * pen * pen;
    }

    Point initial_guess() const { return PeriodicSignal::zero(data_.scale()); }

    std::pair<Point, MinimizeReport> minimize(double alpha, const Point& /*warm_start*/) const {
        Point x = tikhonov_closed_form(data_, alpha, s_);
        MinimizeReport rep;
        rep.residual_norm = smoothing_y_norm(x - data_);
        rep.penalty_norm = scale_norm(x, s_);
        rep.functional_value = rep.residual_norm * rep.residual_norm +
                               alpha * rep.penalty_norm * rep.penalty_norm;
        rep.iterations = 0;
        rep.gradient_norm = 0.0;
        rep.slack_certificate = 0.0;
        return {std::move(x), std::move(rep)};
    }

  private:
    PeriodicSignal data_;
    double s_;
    double delta_;
};

// ---------------------------------------------------------------------------
// Nonlinear path: Gauss-Newton for the coefficient problem
// ---------------------------------------------------------------------------

struct GaussNewtonOptions {
    int max_iterations = 100;
    int max_backtracks = 30;
    double gradient_tol = 1e-12;
};

/// Bundles noisy observation data with the coefficient problem.  Minimization
/// is a damped Gauss-Newton iteration on the Tikhonov functional; the step
/// solves (J^T M J + alpha S_s) dx = J^T M (y - F(c)) - alpha S_s c and a
/// backtracking line search halves the step until the functional decreases.
/// Iteration stops when the per-step decrease drops below delta^2 / 10 or the
/// gradient norm below tolerance, certifying membership in the delta^2
/// approximate-minimizer set.
class ParamIdTikhonov {
  public:
    using Point = CoefficientSpline;

    ParamIdTikhonov(const ParamIdProblem& problem, Vector data, double delta,
                    GaussNewtonOptions options = {})
        : problem_(problem),
          data_(std::move(data)),
          delta_(delta),
          options_(options),
          penalty_(problem.penalty_gram(problem.spec().s)) {
        if (delta < 0.0) throw InvalidArgument("ParamIdTikhonov: delta must be >= 0");
    }

    const ParamIdProblem& problem() const { return problem_; }
    double delta() const { return delta_; }

    double functional_value(const Point& c, double alpha) const {
        Vector r = problem_.solve_state(c).nodal - data_;
        double pen2 = c.control.dot(penalty_ * c.control);
        return problem_.obs_inner(r, r) + alpha * pen2;
    }

    /// Data-driven start: the constant coefficient consistent with the decay
    /// of the observed endpoint, c0 = -(log|U^d(T)| - log|U0|) / T.
    Point initial_guess() const {
        const double u0 = problem_.spec().u0;
        const double uT = data_[data_.size() - 1];
        double c0 = 0.0;
        if (uT * u0 > 0.0 && std::abs(uT) > 1e-12 * std::abs(u0))
            c0 = -(std::log(std::abs(uT)) - std::log(std::abs(u0))) / problem_.grid().horizon();
        Point c;
        c.control = Vector::Constant(problem_.coeff_dim(), c0);
        return c;
    }

    std::pair<Point, MinimizeReport> minimize(double alpha, const Point& start) const {
        if (!(alpha > 0.0))
            throw InvalidArgument("ParamIdTikhonov: nonlinear path requires alpha > 0");
        Point c = start;
        MinimizeReport rep;
        const double decrease_tol = delta_ * delta_ / 10.0;

        StateTrajectory u = problem_.solve_state(c);
        double fval = value_from_state(c, u, alpha);
        double last_decrease = fval;  // bound on the slack before the first step
        rep.functional_history.push_back(fval);

        for (int it = 0; it < options_.max_iterations; ++it) {
            Matrix J = problem_.assemble_jacobian(c, u);
            Vector resid = data_ - u.nodal;
            Vector rhs =
                J.transpose() * (problem_.observation_mass() * resid) - alpha * (penalty_ * c.control);
            rep.gradient_norm = 2.0 * rhs.norm();
            if (rep.gradient_norm < options_.gradient_tol) break;

            Matrix H = J.transpose() * problem_.observation_mass() * J + alpha * penalty_;
            Eigen::LLT<Matrix> llt(H);
            if (llt.info() != Eigen::Success)
                throw NumericError("ParamIdTikhonov: normal-equation solve failed");
            Vector step = llt.solve(rhs);
            if (!step.allFinite())
                throw NumericError("ParamIdTikhonov: non-finite Gauss-Newton step");

            // Backtracking: halve until the functional decreases.
            double t = 1.0;
            bool accepted = false;
            Point trial;
            StateTrajectory trial_u;
            double trial_val = fval;
            for (int k = 0; k <= options_.max_backtracks; ++k) {
                trial.control = c.control + t * step;
                try {
                    trial_u = problem_.solve_state(trial);
                    trial_val = value_from_state(trial, trial_u, alpha);
                } catch (const NumericError&) {
                    t *= 0.5;
                    continue;
                }
                if (trial_val < fval) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) {
                // No decrease found.  At an (approximate) stationary point this
                // is the normal exit; otherwise it is a genuine stagnation.
                if (last_decrease < decrease_tol || rep.gradient_norm < 1e-8) break;
                finalize(rep, c, u, alpha, last_decrease);
                throw StagnationError("ParamIdTikhonov: line search exhausted " +
                                          std::to_string(options_.max_backtracks) +
                                          " halvings without decrease",
                                      rep);
            }
            last_decrease = fval - trial_val;
            c = std::move(trial);
            u = std::move(trial_u);
            fval = trial_val;
            rep.functional_history.push_back(fval);
            rep.iterations = it + 1;
            if (last_decrease < decrease_tol) break;
        }

        finalize(rep, c, u, alpha, last_decrease);
        double cmin = pointwise_min(c);
        if (cmin < 0.0)
            rep.warnings.push_back("minimizer leaves the nonnegative cone: min c = " +
                                   std::to_string(cmin));
        return {std::move(c), std::move(rep)};
    }

  private:
    double value_from_state(const Point& c, const StateTrajectory& u, double alpha) const {
        Vector r = u.nodal - data_;
        return problem_.obs_inner(r, r) + alpha * c.control.dot(penalty_ * c.control);
    }

    void finalize(MinimizeReport& rep, const Point& c, const StateTrajectory& u,
                  double alpha, double last_decrease) const {
        Vector r = u.nodal - data_;
        rep.residual_norm = problem_.obs_norm(r);
        rep.penalty_norm = std::sqrt(std::max(0.0, c.control.dot(penalty_ * c.control)));
        rep.functional_value = rep.residual_norm * rep.residual_norm +
                               alpha * rep.penalty_norm * rep.penalty_norm;
        rep.slack_certificate = last_decrease;
    }

    double pointwise_min(const Point& c) const {
        double m = std::numeric_limits<double>::infinity();
        const int samples = 4 * problem_.spec().grid_n;
        for (int i = 0; i <= samples; ++i) {
            double t = problem_.grid().horizon() * i / samples;
            m = std::min(m, c.evaluate(problem_.grid(), t));
        }
        return m;
    }

    const ParamIdProblem& problem_;
    Vector data_;
    double delta_;
    GaussNewtonOptions options_;
    Matrix penalty_;
};

// ---------------------------------------------------------------------------
// Discrepancy principle
// ---------------------------------------------------------------------------

struct DiscrepancyStep {
    int n = 0;
    double alpha = 1.0;
    double residual = 0.0;
    MinimizeReport report;
};

template <class Problem>
struct DiscrepancyResult {
    int n_star = 0;
    double alpha_star = 1.0;
    typename Problem::Point minimizer;
    std::vector<DiscrepancyStep> history;
};

/// Runs the ladder alpha_n = 2^{-n}, warm-starting each minimization from the
/// previous one, and stops at the first residual <= tau * delta.
template <class Problem>
DiscrepancyResult<Problem> discrepancy_run(const Problem& problem, double delta,
                                           double tau = 4.0, int max_n = 60) {
    if (!(delta > 0.0)) throw InvalidArgument("discrepancy_run: delta must be positive");
    typename Problem::Point warm = problem.initial_guess();
    std::vector<DiscrepancyStep> history;
    for (int n = 0; n <= max_n; ++n) {
        const double alpha = std::ldexp(1.0, -n);
        auto [x, rep] = problem.minimize(alpha, warm);
        DiscrepancyStep step{n, alpha, rep.residual_norm, rep};
        history.push_back(step);
        if (rep.residual_norm <= tau * delta)
            return DiscrepancyResult<Problem>{n, alpha, std::move(x), std::move(history)};
        warm = std::move(x);
    }
    throw NoStopError("discrepancy_run: no n <= " + std::to_string(max_n) +
                      " reached residual <= " + std::to_string(tau) +
                      " delta; noise level inconsistent with data or model");
}

}  // namespace hscale
