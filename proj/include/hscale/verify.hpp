#pragma once

// End-to-end invariant battery: every structural identity the library relies
// on, checked on freshly generated instances.  Failures are data, not
// exceptions; each check reports its measured margin (headroom before the
// threshold; negative means failed).

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hscale/noise.hpp"
#include "hscale/regularizer.hpp"

namespace hscale {

struct VerifyCheck {
    std::string name;
    bool passed = false;
    double margin = 0.0;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

/// Max relative defect of <J h, r>_obs = <h, adjoint(r)> over random pairs.
/// Exposed so a deliberately wrong adjoint can be fed in (mutation testing).
inline double adjoint_identity_error(const ParamIdProblem& prob, const CoefficientSpline& c,
                                     const std::function<Vector(const Vector&)>& adjoint,
                                     std::uint64_t seed, int pairs) {
    double worst = 0.0;
    for (int trial = 0; trial < pairs; ++trial) {
        CoefficientSpline h;
        h.control = standard_normal_vector(mix_seed(seed, {2u * static_cast<unsigned>(trial)}),
                                           prob.coeff_dim());
        Vector r = standard_normal_vector(mix_seed(seed, {2u * static_cast<unsigned>(trial) + 1}),
                                          prob.state_dim());
        double lhs = prob.obs_inner(prob.jacobian_apply(c, h).nodal, r);
        double rhs = h.control.dot(adjoint(r));
        worst = std::max(worst,
                         std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-30}));
    }
    return worst;
}

namespace detail {

inline VerifyCheck make_check(const std::string& name, double measured, double threshold,
                              bool pass_if_below, const std::string& detail) {
    VerifyCheck c;
    c.name = name;
    c.passed = pass_if_below ? measured <= threshold : measured >= threshold;
    c.margin = pass_if_below ? threshold - measured : measured - threshold;
    c.detail = detail;
    return c;
}

/// Conjugate gradients on (I + alpha Lambda^{s+1}) x = d with iterative
/// refinement: the independent iterative route to the linear Tikhonov
/// minimizer.
inline Vector cg_tikhonov(const Vector& d, const Vector& lam, double alpha, double s) {
    Vector diag(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        diag[i] = 1.0 + alpha * std::pow(lam[i], s + 1.0);
    Vector x = Vector::Zero(d.size());
    for (int pass = 0; pass < 3; ++pass) {
        Vector r = d - diag.cwiseProduct(x);
        double rs = r.squaredNorm();
        if (rs == 0.0) break;
        Vector e = Vector::Zero(d.size());
        Vector p = r;
        for (int it = 0; it < 4 * static_cast<int>(d.size()) && rs > 1e-64; ++it) {
            Vector ap = diag.cwiseProduct(p);
            double a = rs / p.dot(ap);
            e += a * p;
            r -= a * ap;
            double rs_new = r.squaredNorm();
            p = r + (rs_new / rs) * p;
            rs = rs_new;
        }
        x += e;
    }
    return x;
}

}  // namespace detail

inline VerifyReport verify_suite(std::uint64_t seed = 20240801) {
    VerifyReport report;
    std::ostringstream oss;

    // --- scale structure -----------------------------------------------------
    {
        auto scale = build_fourier_scale(48);
        double worst = 0.0;
        const double idx[] = {-1.0, 0.0, 0.5, 1.0, 2.0};
        for (int trial = 0; trial < 200; ++trial) {
            PeriodicSignal x(scale,
                             standard_normal_vector(mix_seed(seed, {1, static_cast<std::uint64_t>(
                                                                           trial)}),
                                                    scale->dim()));
            for (double p : idx)
                for (double q : idx)
                    for (double r : idx)
                        if (p < q && q < r)
                            worst = std::max(worst, interpolation_ratio(x, p, q, r));
        }
        oss.str("");
        oss << "max ratio " << worst << " over 200 elements x index triples";
        report.checks.push_back(detail::make_check("interpolation-inequality", worst,
                                                   1.0 + 1e-10, true, oss.str()));

        // lambda >= 1 makes the scale norms monotone in the index.
        double worst_embed = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            PeriodicSignal x(scale,
                             standard_normal_vector(mix_seed(seed, {2, static_cast<std::uint64_t>(
                                                                           trial)}),
                                                    scale->dim()));
            worst_embed = std::max(worst_embed, scale_norm(x, 0.0) / scale_norm(x, 1.0));
        }
        report.checks.push_back(detail::make_check("monotone-embedding", worst_embed, 1.0 + 1e-12,
                                                   true, "max ||x||_0 / ||x||_1 over 50 draws"));

        double rt = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            Vector v = standard_normal_vector(mix_seed(seed, {3, static_cast<std::uint64_t>(
                                                                     trial)}),
                                              scale->dim());
            rt = std::max(rt, (scale->from_spectral(scale->to_spectral(v)) - v).norm() /
                                  v.norm());
        }
        report.checks.push_back(detail::make_check("transform-round-trip", rt, 1e-12, true,
                                                   "max relative defect over 20 draws"));
    }

    // --- smoothing problem ---------------------------------------------------
    {
        auto scale = build_fourier_scale(64);
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            PeriodicSignal f(scale,
                             standard_normal_vector(mix_seed(seed, {4, static_cast<std::uint64_t>(
                                                                           trial)}),
                                                    scale->dim()));
            double lhs = smoothing_y_norm(smoothing_forward(f));
            double rhs = scale_norm(f, -1.0);
            worst = std::max(worst, std::abs(lhs - rhs) / rhs);
        }
        report.checks.push_back(detail::make_check("two-sided-estimate", worst, 1e-12, true,
                                                   "||Tf||_Y vs ||f||_{-1}, 50 draws"));

        // Closed form against an independent iterative linear minimizer (a
        // moderately conditioned instance keeps CG at rounding level).
        auto scale_cg = build_fourier_scale(8);
        PeriodicSignal data(scale_cg,
                            standard_normal_vector(mix_seed(seed, {5}), scale_cg->dim()));
        const double alpha = 0.37, s = 1.0;
        Vector direct = tikhonov_closed_form(data, alpha, s).coeffs();
        Vector iterative =
            detail::cg_tikhonov(data.coeffs(), scale_cg->eigenvalues(), alpha, s);
        double diff = (direct - iterative).cwiseAbs().maxCoeff();
        report.checks.push_back(detail::make_check("closed-form-vs-iterative", diff, 1e-12, true,
                                                   "max coefficient difference"));
    }

    // --- noise calibration ---------------------------------------------------
    {
        // Calibration contract on the perturbation itself: a zero base makes
        // the drawn noise directly observable, free of cancellation in y + n.
        auto scale = build_fourier_scale(64);
        auto y_norm = [&](const Vector& v) {
            return smoothing_y_norm(PeriodicSignal(scale, v));
        };
        Vector zero = Vector::Zero(scale->dim());
        double worst = 0.0;
        for (double delta : {0.1, 1e-3, 1e-6, 1e-9}) {
            Vector noise = make_noisy_data(zero, delta, mix_seed(seed, {6}), y_norm);
            worst = std::max(worst, std::abs(y_norm(noise) - delta) / delta);
        }
        report.checks.push_back(detail::make_check("noise-calibration", worst, 1e-12, true,
                                                   "relative calibration defect over 4 levels"));
    }

    // --- simple-rule bounds (Theorem-style, exact inequalities) --------------
    {
        auto truth = smoothing_reference(SmoothingReference::hat, 256);
        const double s = 1.0;
        const double M = scale_norm(truth.signal, s);
        const double bound = std::sqrt(2.0 + M * M);
        auto y_norm = [&](const Vector& v) {
            return smoothing_y_norm(PeriodicSignal(truth.signal.scale(), v));
        };
        double worst_res = 0.0, worst_pen = 0.0;
        for (int j = 3; j <= 10; ++j) {
            double delta = std::ldexp(1.0, -j);
            Vector noisy = make_noisy_data(truth.signal.coeffs(), delta,
                                           mix_seed(seed, {7, static_cast<std::uint64_t>(j)}),
                                           y_norm);
            PeriodicSignal data(truth.signal.scale(), std::move(noisy));
            SmoothingTikhonov tik(data, s, delta);
            auto [x, rep] = tik.minimize(simple_alpha(delta), tik.initial_guess());
            worst_res = std::max(worst_res, rep.residual_norm / delta);
            worst_pen = std::max(worst_pen, rep.penalty_norm);
        }
        oss.str("");
        oss << "max residual/delta " << worst_res << " vs sqrt(2+M^2) = " << bound;
        report.checks.push_back(
            detail::make_check("simple-rule-residual-bound", worst_res, bound, true, oss.str()));
        oss.str("");
        oss << "max penalty norm " << worst_pen << " vs sqrt(2+M^2) = " << bound;
        report.checks.push_back(
            detail::make_check("simple-rule-penalty-bound", worst_pen, bound, true, oss.str()));
    }

    // --- discrepancy postconditions ------------------------------------------
    {
        auto truth = smoothing_reference(SmoothingReference::hat, 256);
        const double s = 1.0, delta = 0.002;
        const double M = scale_norm(truth.signal, s);
        auto y_norm = [&](const Vector& v) {
            return smoothing_y_norm(PeriodicSignal(truth.signal.scale(), v));
        };
        Vector noisy = make_noisy_data(truth.signal.coeffs(), delta, mix_seed(seed, {8}), y_norm);
        PeriodicSignal data(truth.signal.scale(), std::move(noisy));
        SmoothingTikhonov tik(data, s, delta);
        auto res = discrepancy_run(tik, delta);
        bool stop_ok = res.history.back().residual <= 4.0 * delta &&
                       (res.n_star == 0 ||
                        res.history[res.history.size() - 2].residual > 4.0 * delta);
        // Brute-force sweep of the ladder as the independent oracle for n*.
        int sweep = -1;
        for (int n = 0; n <= 60 && sweep < 0; ++n)
            if (smoothing_y_norm(tikhonov_closed_form(data, std::ldexp(1.0, -n), s) - data) <=
                4.0 * delta)
                sweep = n;
        oss.str("");
        oss << "n* = " << res.n_star << ", sweep oracle = " << sweep;
        report.checks.push_back(detail::make_check(
            "discrepancy-stopping-index", (stop_ok && sweep == res.n_star) ? 1.0 : 0.0, 1.0,
            false, oss.str()));
        double ratio = res.alpha_star / (7.0 * delta * delta / (M * M));
        oss.str("");
        oss << "alpha_{n*} / (7 delta^2 / M^2) = " << ratio;
        report.checks.push_back(
            detail::make_check("discrepancy-alpha-lower-bound", ratio, 1.0, false, oss.str()));
    }

    // --- parameter identification --------------------------------------------
    {
        ParamIdSpec spec;
        spec.grid_n = 40;
        ParamIdProblem prob(spec);
        auto truth = param_id_reference(ParamIdReference::parabola, prob);

        double adj = adjoint_identity_error(
            prob, truth.coefficient,
            [&](const Vector& r) { return prob.jacobian_adjoint(truth.coefficient, r); },
            mix_seed(seed, {9}), 50);
        report.checks.push_back(detail::make_check("adjoint-identity", adj, 1e-10, true,
                                                   "max relative defect over 50 random pairs"));

        CoefficientSpline h;
        h.control =
            standard_normal_vector(mix_seed(seed, {10}), prob.coeff_dim()) * 0.5;
        const double eps = 1e-5;
        CoefficientSpline plus{truth.coefficient.control + eps * h.control};
        CoefficientSpline minus{truth.coefficient.control - eps * h.control};
        Vector fd = (prob.forward(plus).nodal - prob.forward(minus).nodal) / (2.0 * eps);
        Vector w = prob.jacobian_apply(truth.coefficient, h).nodal;
        double fddiff = prob.obs_norm(fd - w);
        report.checks.push_back(detail::make_check("jacobian-finite-difference", fddiff, 1e-6,
                                                   true, "central differences, eps = 1e-5"));

        // State convergence: c(t) = t has U(1) = exp(-1/2) exactly.
        std::vector<double> errs;
        for (int n : {25, 50, 100, 200}) {
            ParamIdSpec s2;
            s2.grid_n = n;
            ParamIdProblem p2(s2);
            CoefficientSpline c;
            c.control = spline_interpolate(p2.grid(), [](double t) { return t; });
            errs.push_back(std::abs(p2.solve_state(c).nodal[n] - std::exp(-0.5)));
        }
        double worst_slope_dev = 0.0;
        for (std::size_t i = 0; i + 1 < errs.size(); ++i)
            worst_slope_dev =
                std::max(worst_slope_dev, std::abs(std::log2(errs[i] / errs[i + 1]) - 2.0));
        report.checks.push_back(detail::make_check("state-convergence-order", worst_slope_dev,
                                                   0.1, true,
                                                   "max |slope - 2| over 4 grid refinements"));
    }

    return report;
}

inline std::string verify_report_text(const VerifyReport& report) {
    std::ostringstream oss;
    for (const auto& c : report.checks) {
        oss << (c.passed ? "PASS" : "FAIL") << "  " << c.name << "  margin=" << c.margin << "  ("
            << c.detail << ")\n";
    }
    oss << (report.all_passed() ? "all checks passed" : "CHECK FAILURES PRESENT") << " ("
        << report.checks.size() << " checks)\n";
    return oss.str();
}

}  // namespace hscale
