#pragma once

// Rate studies over a geometric noise ladder delta_j = 2^{-j}: generate
// calibrated noise, pick alpha by the configured rule, minimize, record the
// X_r reconstruction errors, aggregate over repetitions by the median, and
// fit empirical exponents kappa_hat by least squares in log-log coordinates.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "hscale/noise.hpp"
#include "hscale/regularizer.hpp"

namespace hscale {

enum class Rule { simple, apriori, discrepancy };
enum class ProblemKind { smoothing, param_id };

inline std::string rule_name(Rule r) {
    switch (r) {
        case Rule::simple: return "simple";
        case Rule::apriori: return "apriori";
        case Rule::discrepancy: return "discrepancy";
    }
    return "?";
}

/// A study that cannot produce a usable result (too many failed cells,
/// inconsistent configuration discovered mid-run).
struct StudyError : Error {
    using Error::Error;
};

struct RateStudyConfig {
    ProblemKind problem = ProblemKind::smoothing;
    /// smoothing: step | sqrt_bump | hat;  param-id: hat | t_sqrt_t | parabola.
    std::string reference = "step";
    Rule rule = Rule::apriori;
    SmoothingSpec smoothing;
    ParamIdSpec param_id;
    /// Smoothness index used in the rate formulas; < 0 means "use the
    /// supremum index u_max of the reference solution".
    double u = -1.0;
    int j0 = 3;  // ladder delta_j = 2^{-j}, j = j0..j1
    int j1 = 14;
    std::vector<double> report_norms = {0.0};
    int repetitions = 5;
    std::uint64_t seed = 20240801;
    double tau = 4.0;  // discrepancy threshold

    int ladder_points() const { return j1 - j0 + 1; }

    void validate() const {
        if (ladder_points() < 4)
            throw InvalidArgument("RateStudyConfig: need at least 4 ladder points for a slope");
        if (j0 < 0) throw InvalidArgument("RateStudyConfig: j0 must be >= 0");
        if (repetitions < 1) throw InvalidArgument("RateStudyConfig: repetitions must be >= 1");
        if (report_norms.empty())
            throw InvalidArgument("RateStudyConfig: report_norms must be nonempty");
        if (problem == ProblemKind::smoothing) {
            smoothing.validate();
            if (reference != "step" && reference != "sqrt_bump" && reference != "hat")
                throw InvalidArgument("RateStudyConfig: unknown smoothing reference '" +
                                      reference + "'");
        } else {
            param_id.validate();
            if (reference != "hat" && reference != "t_sqrt_t" && reference != "parabola")
                throw InvalidArgument("RateStudyConfig: unknown param-id reference '" +
                                      reference + "'");
        }
    }

    StabilityParams stability_params(double r) const {
        if (problem == ProblemKind::smoothing) return smoothing.stability_params(u, r);
        StabilityParams sp;
        sp.a = 0.0;
        sp.gamma = param_id.s / (param_id.s + 1.0);
        sp.s = param_id.s;
        sp.u = u;
        sp.r = r;
        return sp;
    }
};

struct RateFit {
    double slope = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

/// OLS slope of log(error) against log(delta).  Non-positive errors are
/// excluded; fewer than 3 surviving pairs is an error.
inline RateFit fit_rate(const std::vector<double>& deltas, const std::vector<double>& errors) {
    if (deltas.size() != errors.size())
        throw InvalidArgument("fit_rate: deltas and errors differ in length");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0)) throw InvalidArgument("fit_rate: deltas must be positive");
        if (errors[i] > 0.0 && std::isfinite(errors[i])) {
            x.push_back(std::log(deltas[i]));
            y.push_back(std::log(errors[i]));
        }
    }
    const std::size_t n = x.size();
    if (n < 3) throw InvalidArgument("fit_rate: fewer than 3 positive pairs");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidArgument("fit_rate: degenerate ladder (all deltas equal)");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.r_squared = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    fit.points = static_cast<int>(n);
    return fit;
}

struct NormFit {
    double r = 0.0;
    double kappa_hat = 0.0;
    double r_squared = 0.0;
    int points = 0;
    bool covered = true;  // within the admissible range of the rate theorems
};

struct RateStudyResult {
    // Configuration echo used by the table emitters.
    ProblemKind problem = ProblemKind::smoothing;
    std::string reference;
    Rule rule = Rule::apriori;
    double s = 0.0;
    double u = 0.0;
    double a = 0.0;
    double gamma = 1.0;

    std::vector<double> deltas;
    std::vector<double> report_norms;
    /// errors[k][j]: median X_{r_k} error at ladder point j.
    std::vector<std::vector<double>> errors;
    /// Median chosen alpha per ladder point.
    std::vector<double> alphas;

    std::vector<NormFit> fits;
    double alpha_exponent = 0.0;
    double alpha_r_squared = 1.0;
    bool alpha_exponent_fitted = false;  // exact for simple/apriori, fitted otherwise

    int cells = 0;     // delta x repetition work items
    int failures = 0;  // failed cells (recorded, study continued)
    std::vector<std::string> warnings;
};

namespace detail {

inline double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// One work item: noisy data -> alpha -> minimizer -> per-norm errors.
struct CellOutcome {
    double alpha = 0.0;
    std::vector<double> errors;
};

}  // namespace detail

inline RateStudyResult run_study(const RateStudyConfig& config) {
    config.validate();
    RateStudyResult out;
    out.problem = config.problem;
    out.reference = config.reference;
    out.rule = config.rule;
    out.report_norms = config.report_norms;

    // Problem setup, shared across the ladder.
    std::optional<SmoothingTruth> struth;
    std::optional<ParamIdProblem> pprob;
    std::optional<ParamIdTruth> ptruth;
    Vector pdata_exact;
    if (config.problem == ProblemKind::smoothing) {
        SmoothingReference kind = config.reference == "step" ? SmoothingReference::step
                                  : config.reference == "sqrt_bump"
                                      ? SmoothingReference::sqrt_bump
                                      : SmoothingReference::hat;
        struth = smoothing_reference(kind, config.smoothing.max_wavenumber);
        out.s = config.smoothing.s;
    } else {
        ParamIdReference kind = config.reference == "hat" ? ParamIdReference::hat
                                : config.reference == "t_sqrt_t" ? ParamIdReference::t_sqrt_t
                                                                 : ParamIdReference::parabola;
        pprob.emplace(config.param_id);
        ptruth = param_id_reference(kind, *pprob);
        pdata_exact = pprob->forward(ptruth->coefficient).nodal;
        out.s = config.param_id.s;
    }
    out.u = config.u >= 0.0 ? config.u
                            : (config.problem == ProblemKind::smoothing ? struth->u_max
                                                                        : ptruth->u_max);
    {
        StabilityParams sp = config.stability_params(out.report_norms.front());
        sp.u = out.u;
        out.a = sp.a;
        out.gamma = sp.gamma;
    }

    const double delta_min = std::ldexp(1.0, -config.j1);
    if (config.problem == ProblemKind::smoothing) {
        // Resolution pre-check: the truncation tail of the reference must sit
        // at least a decade below the smallest noise level of the ladder.
        auto fine = smoothing_reference(config.reference == "step" ? SmoothingReference::step
                                        : config.reference == "sqrt_bump"
                                            ? SmoothingReference::sqrt_bump
                                            : SmoothingReference::hat,
                                        2 * config.smoothing.max_wavenumber);
        Vector tail = fine.signal.coeffs();
        tail.head(struth->signal.dim()).setZero();
        double tail_norm = smoothing_y_norm(PeriodicSignal(fine.signal.scale(), tail));
        if (tail_norm > 0.1 * delta_min)
            out.warnings.push_back("resolution pre-check: truncation tail " +
                                   std::to_string(tail_norm) + " is not a decade below delta_min " +
                                   std::to_string(delta_min));
    }

    std::vector<std::vector<std::vector<double>>> per_norm_errors(
        config.report_norms.size(),
        std::vector<std::vector<double>>(static_cast<std::size_t>(config.ladder_points())));
    std::vector<std::vector<double>> per_delta_alphas(
        static_cast<std::size_t>(config.ladder_points()));

    // FNV-1a over the reference name: stable across platforms, unlike std::hash.
    std::uint64_t ref_hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : config.reference) ref_hash = (ref_hash ^ ch) * 0x100000001b3ULL;
    const std::uint64_t cell_tag =
        mix_seed(0, {static_cast<std::uint64_t>(config.problem), ref_hash,
                     static_cast<std::uint64_t>(config.rule)});

    for (int j = config.j0; j <= config.j1; ++j) {
        const double delta = std::ldexp(1.0, -j);
        const std::size_t jj = static_cast<std::size_t>(j - config.j0);
        out.deltas.push_back(delta);
        for (int rep = 0; rep < config.repetitions; ++rep) {
            ++out.cells;
            const std::uint64_t cell_seed =
                mix_seed(config.seed, {cell_tag, static_cast<std::uint64_t>(j),
                                       static_cast<std::uint64_t>(rep)});
            try {
                detail::CellOutcome cell;
                if (config.problem == ProblemKind::smoothing) {
                    auto y_norm = [&](const Vector& v) {
                        return smoothing_y_norm(PeriodicSignal(struth->signal.scale(), v));
                    };
                    Vector noisy =
                        make_noisy_data(struth->signal.coeffs(), delta, cell_seed, y_norm);
                    PeriodicSignal data(struth->signal.scale(), std::move(noisy));
                    SmoothingTikhonov tik(data, config.smoothing.s, delta);
                    PeriodicSignal x = tik.initial_guess();
                    if (config.rule == Rule::discrepancy) {
                        auto res = discrepancy_run(tik, delta, config.tau);
                        cell.alpha = res.alpha_star;
                        x = std::move(res.minimizer);
                    } else {
                        StabilityParams sp = config.stability_params(0.0);
                        sp.u = out.u;
                        cell.alpha = config.rule == Rule::simple
                                         ? simple_alpha(delta)
                                         : apriori_alpha(delta, sp);
                        x = tik.minimize(cell.alpha, x).first;
                    }
                    for (double r : config.report_norms)
                        cell.errors.push_back(scale_norm(x - struth->signal, r));
                } else {
                    auto y_norm = [&](const Vector& v) { return pprob->obs_norm(v); };
                    Vector data = make_noisy_data(pdata_exact, delta, cell_seed, y_norm);
                    ParamIdTikhonov tik(*pprob, data, delta);
                    CoefficientSpline c;
                    if (config.rule == Rule::discrepancy) {
                        auto res = discrepancy_run(tik, delta, config.tau);
                        cell.alpha = res.alpha_star;
                        c = std::move(res.minimizer);
                    } else {
                        StabilityParams sp = config.stability_params(0.0);
                        sp.u = out.u;
                        cell.alpha = config.rule == Rule::simple
                                         ? simple_alpha(delta)
                                         : apriori_alpha(delta, sp);
                        c = tik.minimize(cell.alpha, tik.initial_guess()).first;
                    }
                    Vector diff = c.control - ptruth->coefficient.control;
                    for (double r : config.report_norms)
                        cell.errors.push_back(pprob->coeff_norm(diff, r));
                }
                per_delta_alphas[jj].push_back(cell.alpha);
                for (std::size_t k = 0; k < config.report_norms.size(); ++k)
                    per_norm_errors[k][jj].push_back(cell.errors[k]);
            } catch (const NumericError& e) {
                ++out.failures;
                out.warnings.push_back("cell j=" + std::to_string(j) + " rep=" +
                                       std::to_string(rep) + " failed: " + e.what());
            }
        }
    }

    if (out.failures * 5 > out.cells)
        throw StudyError("run_study: " + std::to_string(out.failures) + " of " +
                         std::to_string(out.cells) + " cells failed (> 20%)");

    for (std::size_t jj = 0; jj < per_delta_alphas.size(); ++jj)
        out.alphas.push_back(detail::median(per_delta_alphas[jj]));
    out.errors.resize(config.report_norms.size());
    for (std::size_t k = 0; k < config.report_norms.size(); ++k)
        for (std::size_t jj = 0; jj < per_norm_errors[k].size(); ++jj)
            out.errors[k].push_back(detail::median(per_norm_errors[k][jj]));

    for (std::size_t k = 0; k < config.report_norms.size(); ++k) {
        NormFit nf;
        nf.r = config.report_norms[k];
        StabilityParams sp = config.stability_params(nf.r);
        sp.u = out.u;
        nf.covered = sp.smoothness_admissible() && sp.report_norm_admissible();
        RateFit fit = fit_rate(out.deltas, out.errors[k]);
        nf.kappa_hat = fit.slope;
        nf.r_squared = fit.r_squared;
        nf.points = fit.points;
        out.fits.push_back(nf);
    }

    if (config.rule == Rule::discrepancy) {
        RateFit fit = fit_rate(out.deltas, out.alphas);
        out.alpha_exponent = fit.slope;
        out.alpha_r_squared = fit.r_squared;
        out.alpha_exponent_fitted = true;
    } else if (config.rule == Rule::simple) {
        out.alpha_exponent = 2.0;
    } else {
        StabilityParams sp = config.stability_params(0.0);
        sp.u = out.u;
        out.alpha_exponent = apriori_alpha_exponent(sp);
    }
    return out;
}

}  // namespace hscale
