#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "hscale/verify.hpp"

using namespace hscale;

TEST_CASE("verify_suite passes on a fresh build") {
    auto report = verify_suite();
    INFO(verify_report_text(report));
    for (const auto& c : report.checks) {
        INFO(c.name << ": margin " << c.margin << " (" << c.detail << ")");
        CHECK(c.passed);
    }
    CHECK(report.all_passed());
}

TEST_CASE("verify_suite lists at least 10 uniquely named checks") {
    auto report = verify_suite();
    CHECK(report.checks.size() >= 10);
    std::set<std::string> names;
    for (const auto& c : report.checks) names.insert(c.name);
    CHECK(names.size() == report.checks.size());
    for (const auto& c : report.checks) CHECK_FALSE(c.name.empty());
}

TEST_CASE("verify report text carries one line per check") {
    auto report = verify_suite();
    std::string text = verify_report_text(report);
    std::size_t lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == report.checks.size() + 1);
    CHECK(text.find("all checks passed") != std::string::npos);
}

TEST_CASE("a broken adjoint is caught by the adjoint-identity check") {
    ParamIdSpec spec;
    spec.grid_n = 40;
    ParamIdProblem prob(spec);
    auto truth = param_id_reference(ParamIdReference::parabola, prob);

    SECTION("true adjoint passes the threshold") {
        double err = adjoint_identity_error(
            prob, truth.coefficient,
            [&](const Vector& r) { return prob.jacobian_adjoint(truth.coefficient, r); }, 7, 50);
        CHECK(err <= 1e-10);
    }
    SECTION("dropping the observation mass fails it") {
        auto u = prob.solve_state(truth.coefficient);
        Matrix J = prob.assemble_jacobian(truth.coefficient, u);
        double err = adjoint_identity_error(
            prob, truth.coefficient, [&](const Vector& r) -> Vector { return J.transpose() * r; },
            7, 50);
        CHECK(err > 1e-10);
    }
    SECTION("an unrelated linear map fails it") {
        auto u = prob.solve_state(truth.coefficient);
        Matrix J = prob.assemble_jacobian(truth.coefficient, u);
        Matrix wrong = J.transpose() * prob.observation_mass() * 0.5;
        double err = adjoint_identity_error(
            prob, truth.coefficient, [&](const Vector& r) -> Vector { return wrong * r; }, 7, 50);
        CHECK(err > 1e-10);
    }
}
