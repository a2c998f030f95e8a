#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hscale/regularizer.hpp"

using namespace hscale;

namespace {

PeriodicSignal random_signal(const ScalePtr& scale, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Vector c(scale->dim());
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = gauss(rng);
    return PeriodicSignal(scale, c);
}

PeriodicSignal calibrated_noise(const PeriodicSignal& base, double delta, std::mt19937_64& rng) {
    auto n = random_signal(base.scale(), rng);
    return base + n * (delta / smoothing_y_norm(n));
}

}  // namespace

TEST_CASE("parameter choice rules") {
    SECTION("simple_alpha = delta^2") {
        CHECK(simple_alpha(0.1) == Catch::Approx(0.01));
        CHECK(simple_alpha(1.0) == 1.0);
        CHECK(simple_alpha(std::ldexp(1.0, -10)) == std::ldexp(1.0, -20));
        CHECK_THROWS_AS(simple_alpha(0.0), InvalidArgument);
    }
    SECTION("apriori exponent examples") {
        CHECK(apriori_alpha_exponent({1.0, 1.0, 0.0, 0.5, 0.0}) == Catch::Approx(4.0 / 3.0));
        CHECK(apriori_alpha_exponent({1.0, 1.0, 1.0, 1.0, 0.0}) == Catch::Approx(2.0));
        CHECK(apriori_alpha_exponent({0.0, 2.0 / 3.0, 2.0, 2.5, 0.0}) ==
              Catch::Approx(26.0 / 15.0));
        CHECK_THROWS_AS(apriori_alpha_exponent({0.0, 1.0, 0.0, 0.0, 0.0}), InvalidArgument);
    }
    SECTION("apriori_alpha warns outside the admissible range") {
        std::vector<std::string> warnings;
        StabilityParams sp{1.0, 1.0, 0.0, 1.5, 0.0};  // u > 2s+a
        double alpha = apriori_alpha(0.1, sp, &warnings);
        CHECK(alpha == Catch::Approx(std::pow(0.1, 0.8)));
        REQUIRE(warnings.size() == 1);
    }
    SECTION("apriori exponent is non-increasing in u") {
        for (double a : {0.0, 0.5, 1.0})
            for (double gamma : {0.5, 1.0})
                for (double s : {0.0, 1.0, 2.0}) {
                    double prev = std::numeric_limits<double>::infinity();
                    for (double u = s; u <= 2.0 * s + a + 1.0; u += 0.25) {
                        if (u + a == 0.0) continue;
                        double e = apriori_alpha_exponent({a, gamma, s, u, 0.0});
                        REQUIRE(e <= prev + 1e-12);
                        prev = e;
                    }
                }
    }
    SECTION("theoretical_rate examples") {
        auto r1 = theoretical_rate({1.0, 1.0, 1.0, 1.5, 0.0});
        CHECK(r1.exponent == Catch::Approx(0.6));
        CHECK(r1.covered);
        auto r2 = theoretical_rate({1.0, 1.0, 1.0, 1.0, 1.0});  // r = u
        CHECK(r2.exponent == Catch::Approx(0.0));
        auto r3 = theoretical_rate({0.0, 2.0 / 3.0, 2.0, 2.0, 1.0});
        CHECK(r3.exponent == Catch::Approx(1.0 / 3.0));
        auto blue = theoretical_rate({1.0, 1.0, 0.0, 1.5, 1.0});  // r > s and u > 2s+a
        CHECK_FALSE(blue.covered);
    }
}

TEST_CASE("smoothing functional value") {
    auto scale = build_fourier_scale(16);
    std::mt19937_64 rng(41);
    auto data = random_signal(scale, rng);
    SmoothingTikhonov prob(data, 1.0, 0.1);

    SECTION("alpha=0 at an exact fit gives zero") {
        CHECK(prob.functional_value(data, 0.0) == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("x=0 gives the squared data norm") {
        double expected = smoothing_y_norm(data);
        CHECK(prob.functional_value(PeriodicSignal::zero(scale), 0.5) ==
              Catch::Approx(expected * expected));
    }
    SECTION("random x equals independent recomposition") {
        auto x = random_signal(scale, rng);
        double res = smoothing_y_norm(x - data);
        double pen = scale_norm(x, 1.0);
        CHECK(prob.functional_value(x, 0.3) == Catch::Approx(res * res + 0.3 * pen * pen));
    }
}

TEST_CASE("smoothing minimize is the closed form with zero slack") {
    auto scale = build_fourier_scale(64);
    std::mt19937_64 rng(43);
    auto truth = random_signal(scale, rng);
    const double delta = 0.05, s = 1.0;
    auto data = calibrated_noise(truth, delta, rng);
    SmoothingTikhonov prob(data, s, delta);
    auto [x, rep] = prob.minimize(simple_alpha(delta), prob.initial_guess());
    auto direct = tikhonov_closed_form(data, delta * delta, s);
    CHECK((x.coeffs() - direct.coeffs()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(rep.slack_certificate == 0.0);
    CHECK(rep.functional_value ==
          Catch::Approx(rep.residual_norm * rep.residual_norm +
                        delta * delta * rep.penalty_norm * rep.penalty_norm)
              .epsilon(1e-10));
}

TEST_CASE("Lemma bounds on the linear problem") {
    auto truth = smoothing_reference(SmoothingReference::sqrt_bump, 256);
    std::mt19937_64 rng(47);
    const double s = 1.0;
    const double M = scale_norm(truth.signal, s);
    const double delta = 0.01;
    auto data = calibrated_noise(truth.signal, delta, rng);
    SmoothingTikhonov prob(data, s, delta);
    for (double tau : {1.0, 7.0}) {
        SECTION("tau = " + std::to_string(tau)) {
            // (i) alpha <= tau delta^2 / M^2 bounds the residual.
            double alpha_low = tau * delta * delta / (M * M);
            auto [x1, rep1] = prob.minimize(alpha_low, prob.initial_guess());
            CHECK(rep1.residual_norm * rep1.residual_norm <= (2.0 + tau) * delta * delta);
            // (ii) alpha >= tau delta^2 / M^2 bounds the penalty norm.
            auto [x2, rep2] = prob.minimize(alpha_low * 1.0, prob.initial_guess());
            CHECK(rep2.penalty_norm * rep2.penalty_norm <= (1.0 + 2.0 / tau) * M * M);
        }
    }
}

TEST_CASE("gauss-newton recovers the coefficient from exact data") {
    ParamIdSpec spec;
    spec.grid_n = 50;
    spec.s = 1.0;
    ParamIdProblem prob(spec);
    auto truth = param_id_reference(ParamIdReference::parabola, prob);
    Vector data = prob.forward(truth.coefficient).nodal;

    std::mt19937_64 rng(51);
    std::normal_distribution<double> gauss;
    CoefficientSpline start = truth.coefficient;
    for (Eigen::Index i = 0; i < start.control.size(); ++i)
        start.control[i] += 0.01 * gauss(rng);

    ParamIdTikhonov tik(prob, data, 0.0);
    auto [c, rep] = tik.minimize(1e-12, start);
    // The discrete observation map has n+1 equations for n+3 spline
    // coefficients, hence an exact two-dimensional null space; recovery is
    // exact in observation space and tight modulo that null space.
    CHECK(prob.obs_norm(prob.forward(c).nodal - data) <= 1e-6);
    CHECK(prob.coeff_norm(c.control - truth.coefficient.control, 0.0) <= 1e-3);
    SECTION("functional history is non-increasing") {
        REQUIRE(rep.functional_history.size() >= 2);
        for (std::size_t i = 0; i + 1 < rep.functional_history.size(); ++i)
            CHECK(rep.functional_history[i + 1] <= rep.functional_history[i]);
    }
    SECTION("report invariant") {
        CHECK(rep.functional_value ==
              Catch::Approx(rep.residual_norm * rep.residual_norm +
                            1e-12 * rep.penalty_norm * rep.penalty_norm)
                  .epsilon(1e-10));
    }
}

TEST_CASE("gauss-newton flags minimizers leaving the nonnegative cone") {
    ParamIdSpec spec;
    spec.grid_n = 30;
    spec.s = 1.0;
    ParamIdProblem prob(spec);
    auto truth = param_id_reference(ParamIdReference::hat, prob);
    Vector data = prob.forward(truth.coefficient).nodal;
    // Large noise pushes the reconstruction negative somewhere.
    std::mt19937_64 rng(53);
    std::normal_distribution<double> gauss;
    for (Eigen::Index i = 0; i < data.size(); ++i) data[i] += 0.3 * gauss(rng);
    ParamIdTikhonov tik(prob, data, 0.3);
    auto [c, rep] = tik.minimize(1e-4, tik.initial_guess());
    double cmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 200; ++j)
        cmin = std::min(cmin, c.evaluate(prob.grid(), j / 200.0));
    if (cmin < 0.0) {
        REQUIRE_FALSE(rep.warnings.empty());
    }
}

TEST_CASE("discrepancy principle on the linear problem") {
    auto truth = smoothing_reference(SmoothingReference::hat, 512);
    std::mt19937_64 rng(59);
    const double s = 1.0;
    const double M = scale_norm(truth.signal, s);
    const double delta = 0.002;
    auto data = calibrated_noise(truth.signal, delta, rng);
    SmoothingTikhonov prob(data, s, delta);
    auto result = discrepancy_run(prob, delta);

    SECTION("matches the brute-force sweep") {
        int expected = -1;  // oracle: exhaustive sweep over the ladder
        for (int n = 0; n <= 60; ++n) {
            auto f = tikhonov_closed_form(data, std::ldexp(1.0, -n), s);
            if (smoothing_y_norm(f - data) <= 4.0 * delta) {
                expected = n;
                break;
            }
        }
        REQUIRE(result.n_star == expected);
        CHECK(result.alpha_star == std::ldexp(1.0, -result.n_star));
    }
    SECTION("postconditions") {
        const auto& hist = result.history;
        REQUIRE(static_cast<int>(hist.size()) == result.n_star + 1);
        CHECK(hist.back().residual <= 4.0 * delta);
        if (result.n_star > 0) CHECK(hist[hist.size() - 2].residual > 4.0 * delta);
        CHECK(result.alpha_star >= 7.0 * delta * delta / (M * M));
    }
}

TEST_CASE("discrepancy principle immediate stop and no-stop") {
    auto scale = build_fourier_scale(8);
    std::mt19937_64 rng(61);
    auto data = random_signal(scale, rng);
    SECTION("huge delta stops at n=0 with alpha=1") {
        SmoothingTikhonov prob(data, 0.0, 0.0);
        auto result = discrepancy_run(prob, 10.0 * smoothing_y_norm(data));
        CHECK(result.n_star == 0);
        CHECK(result.alpha_star == 1.0);
    }
    SECTION("cap exceeded raises a no-stop error") {
        SmoothingTikhonov prob(data, 0.0, 0.0);
        double delta = 1e-3 * smoothing_y_norm(data);
        CHECK_THROWS_AS(discrepancy_run(prob, delta, 4.0, /*max_n=*/0), NoStopError);
    }
}
