#include <catch2/catch_amalgamated.hpp>

#include <cstring>

#include "hscale/noise.hpp"
#include "hscale/param_id.hpp"
#include "hscale/smoothing.hpp"

using namespace hscale;

TEST_CASE("mix_seed separates streams") {
    CHECK(mix_seed(1, {0}) != mix_seed(1, {1}));
    CHECK(mix_seed(1, {0}) != mix_seed(2, {0}));
    CHECK(mix_seed(7, {3, 4}) != mix_seed(7, {4, 3}));
    CHECK(mix_seed(7, {3, 4}) == mix_seed(7, {3, 4}));
}

TEST_CASE("standard_normal_vector") {
    SECTION("deterministic for a fixed seed") {
        Vector a = standard_normal_vector(42, 17);
        Vector b = standard_normal_vector(42, 17);
        CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * 17) == 0);
        Vector c = standard_normal_vector(43, 17);
        CHECK((a - c).norm() > 0.0);
    }
    SECTION("moments are approximately standard normal") {
        const Eigen::Index n = 200000;
        Vector v = standard_normal_vector(7, n);
        double mean = v.mean();
        double var = (v.array() - mean).square().sum() / static_cast<double>(n - 1);
        CHECK(std::abs(mean) < 0.01);
        CHECK(var == Catch::Approx(1.0).margin(0.02));
    }
}

TEST_CASE("make_noisy_data") {
    auto truth = smoothing_reference(SmoothingReference::hat, 8);
    auto y_norm = [&](const Vector& v) {
        return smoothing_y_norm(PeriodicSignal(truth.signal.scale(), v));
    };

    SECTION("delta = 0 returns the data unchanged") {
        Vector y = make_noisy_data(truth.signal.coeffs(), 0.0, 42, y_norm);
        CHECK((y - truth.signal.coeffs()).norm() == 0.0);
    }
    SECTION("negative delta rejected") {
        CHECK_THROWS_AS(make_noisy_data(truth.signal.coeffs(), -0.1, 42, y_norm),
                        InvalidArgument);
    }
    SECTION("calibration is exact in the H^{-1} norm") {
        // On a zero base the drawn perturbation is observed directly.
        Vector zero = Vector::Zero(truth.signal.dim());
        for (double delta : {0.5, 0.1, 1e-4, 1e-9}) {
            Vector noise = make_noisy_data(zero, delta, 42, y_norm);
            REQUIRE(std::abs(y_norm(noise) - delta) <= 1e-12 * delta);
        }
        // Recovering it from y + noise adds cancellation at the scale of y.
        for (double delta : {0.5, 1e-3}) {
            Vector y = make_noisy_data(truth.signal.coeffs(), delta, 42, y_norm);
            double n = y_norm(y - truth.signal.coeffs());
            REQUIRE(std::abs(n - delta) <=
                    1e-12 * delta + 1e-14 * y_norm(truth.signal.coeffs()));
        }
    }
    SECTION("calibration is exact in the L2 observation norm") {
        ParamIdSpec spec;
        spec.grid_n = 25;
        ParamIdProblem prob(spec);
        auto l2 = [&](const Vector& v) { return prob.obs_norm(v); };
        Vector zero = Vector::Zero(prob.state_dim());
        for (double delta : {0.1, 1e-3, 1e-8}) {
            Vector noise = make_noisy_data(zero, delta, 13, l2);
            REQUIRE(std::abs(l2(noise) - delta) <= 1e-12 * delta);
        }
    }
    SECTION("fixed seed 42 gives byte-identical output across runs") {
        Vector y1 = make_noisy_data(truth.signal.coeffs(), 0.1, 42, y_norm);
        Vector y2 = make_noisy_data(truth.signal.coeffs(), 0.1, 42, y_norm);
        REQUIRE(y1.size() == y2.size());
        CHECK(std::memcmp(y1.data(), y2.data(), sizeof(double) * y1.size()) == 0);
    }
    SECTION("different seeds give different noise") {
        Vector y1 = make_noisy_data(truth.signal.coeffs(), 0.1, 42, y_norm);
        Vector y2 = make_noisy_data(truth.signal.coeffs(), 0.1, 43, y_norm);
        CHECK((y1 - y2).norm() > 0.0);
    }
}
