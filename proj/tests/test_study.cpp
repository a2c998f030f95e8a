#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "hscale/tables.hpp"

using namespace hscale;

TEST_CASE("fit_rate") {
    SECTION("exact power laws") {
        std::vector<double> deltas, e1, e05;
        for (int j = 3; j <= 10; ++j) {
            double d = std::ldexp(1.0, -j);
            deltas.push_back(d);
            e1.push_back(3.7 * d);
            e05.push_back(0.2 * std::sqrt(d));
        }
        auto f1 = fit_rate(deltas, e1);
        CHECK(f1.slope == Catch::Approx(1.0));
        CHECK(f1.r_squared == Catch::Approx(1.0));
        CHECK(f1.points == 8);
        auto f05 = fit_rate(deltas, e05);
        CHECK(f05.slope == Catch::Approx(0.5));
    }
    SECTION("synthetic delta^0.6 with 5% multiplicative noise over 12 points") {
        std::vector<double> deltas, errs;
        Vector noise = standard_normal_vector(99, 12);
        for (int j = 0; j < 12; ++j) {
            double d = std::ldexp(1.0, -(3 + j));
            deltas.push_back(d);
            errs.push_back(std::pow(d, 0.6) * (1.0 + 0.05 * noise[j]));
        }
        auto fit = fit_rate(deltas, errs);
        CHECK(fit.slope == Catch::Approx(0.6).margin(0.03));
        CHECK(fit.r_squared > 0.99);
    }
    SECTION("non-positive errors excluded; too few pairs is an error") {
        std::vector<double> deltas{0.5, 0.25, 0.125, 0.0625};
        CHECK_NOTHROW(fit_rate(deltas, {0.5, 0.25, 0.0, 0.0625}));
        CHECK_THROWS_AS(fit_rate(deltas, {0.5, 0.25, 0.0, 0.0}), InvalidArgument);
        CHECK_THROWS_AS(fit_rate({0.5, 0.25}, {0.5, 0.25}), InvalidArgument);
        CHECK_THROWS_AS(fit_rate(deltas, {0.5, 0.25, 0.125}), InvalidArgument);
    }
}

namespace {

RateStudyConfig mini_smoothing_config() {
    RateStudyConfig cfg;
    cfg.problem = ProblemKind::smoothing;
    cfg.reference = "hat";
    cfg.rule = Rule::simple;
    cfg.smoothing.max_wavenumber = 256;
    cfg.smoothing.s = 1.0;
    cfg.j0 = 3;
    cfg.j1 = 8;
    cfg.report_norms = {-1.0, 0.0};
    cfg.repetitions = 2;
    cfg.seed = 42;
    return cfg;
}

}  // namespace

TEST_CASE("run_study on the smoothing mini-ladder") {
    auto cfg = mini_smoothing_config();
    auto res = run_study(cfg);

    SECTION("shape and bookkeeping") {
        CHECK(res.deltas.size() == 6);
        CHECK(res.alphas.size() == 6);
        REQUIRE(res.errors.size() == 2);
        CHECK(res.errors[0].size() == 6);
        CHECK(res.cells == 12);
        CHECK(res.failures == 0);
        CHECK(res.u == 1.5);
        REQUIRE(res.fits.size() == 2);
        CHECK(res.fits[0].points == 6);
    }
    SECTION("simple rule echoes alpha exponent 2 and alpha = delta^2") {
        CHECK(res.alpha_exponent == 2.0);
        CHECK_FALSE(res.alpha_exponent_fitted);
        for (std::size_t j = 0; j < res.deltas.size(); ++j)
            CHECK(res.alphas[j] == Catch::Approx(res.deltas[j] * res.deltas[j]));
    }
    SECTION("rate at r = -a is at least gamma - 0.1") {
        CHECK(res.fits[0].r == -1.0);
        CHECK(res.fits[0].kappa_hat >= res.gamma - 0.1);
    }
    SECTION("errors decrease along the ladder") {
        for (std::size_t j = 0; j + 1 < res.errors[1].size(); ++j)
            CHECK(res.errors[1][j + 1] <= res.errors[1][j] * 1.05);
    }
}

TEST_CASE("run_study apriori echoes the exact alpha exponent") {
    auto cfg = mini_smoothing_config();
    cfg.rule = Rule::apriori;
    cfg.smoothing.s = 0.0;
    cfg.reference = "step";  // u = 1/2
    cfg.report_norms = {0.0};
    auto res = run_study(cfg);
    CHECK(res.alpha_exponent == Catch::Approx(4.0 / 3.0));
    CHECK_FALSE(res.alpha_exponent_fitted);
    CHECK(res.fits[0].covered);
}

TEST_CASE("run_study flags report norms outside the theory") {
    auto cfg = mini_smoothing_config();
    cfg.report_norms = {0.0, 1.5};  // r > s is outside the admissible range
    auto res = run_study(cfg);
    CHECK(res.fits[0].covered);
    CHECK_FALSE(res.fits[1].covered);
}

TEST_CASE("run_study rejects invalid configurations") {
    auto cfg = mini_smoothing_config();
    SECTION("too few ladder points") {
        cfg.j1 = cfg.j0 + 2;
        CHECK_THROWS_AS(run_study(cfg), InvalidArgument);
    }
    SECTION("unknown reference") {
        cfg.reference = "sawtooth";
        CHECK_THROWS_AS(run_study(cfg), InvalidArgument);
    }
    SECTION("no report norms") {
        cfg.report_norms.clear();
        CHECK_THROWS_AS(run_study(cfg), InvalidArgument);
    }
}

TEST_CASE("run_study on the param-id problem") {
    RateStudyConfig cfg;
    cfg.problem = ProblemKind::param_id;
    cfg.reference = "parabola";
    cfg.rule = Rule::discrepancy;
    cfg.param_id.grid_n = 40;
    cfg.param_id.s = 1.0;
    cfg.j0 = 3;
    cfg.j1 = 6;
    cfg.report_norms = {0.0};
    cfg.repetitions = 2;
    cfg.seed = 42;
    auto res = run_study(cfg);
    CHECK(res.failures == 0);
    CHECK(res.u == 2.5);
    CHECK(res.gamma == Catch::Approx(0.5));
    CHECK(res.alpha_exponent_fitted);
    CHECK(res.alpha_exponent > 0.0);
    // Errors should shrink from the noisiest to the cleanest ladder point.
    CHECK(res.errors[0].back() < res.errors[0].front());
}

TEST_CASE("emit_tables") {
    SECTION("empty result list gives a header-only CSV") {
        CHECK(emit_tables(std::vector<RateStudyResult>{}, TableFormat::csv) ==
              "s,u,rule,r,kappa_hat,r_squared,alpha_exponent,flag\r\n");
    }
    SECTION("one-cell result populates every column") {
        RateStudyResult res;
        res.reference = "hat";
        res.rule = Rule::apriori;
        res.s = 1.0;
        res.u = 1.5;
        res.deltas = {0.125};
        res.alphas = {0.25};
        res.report_norms = {0.0};
        res.errors = {{0.5}};
        NormFit nf;
        nf.r = 0.0;
        nf.kappa_hat = 0.64;
        nf.r_squared = 0.999;
        nf.points = 1;
        res.fits.push_back(nf);
        res.alpha_exponent = 1.6;

        std::string csv = emit_tables(res, TableFormat::csv);
        std::istringstream lines(csv);
        std::string header, row;
        std::getline(lines, header);
        std::getline(lines, row);
        CHECK(row.find("1,1.5,apriori,0,") == 0);
        CHECK(row.find(",ok") != std::string::npos);
        int commas = 0;
        for (char c : row)
            if (c == ',') ++commas;
        CHECK(commas == 7);

        std::string md = emit_tables(res, TableFormat::markdown);
        CHECK(md.find("| kappa_hat |") != std::string::npos);
        CHECK(md.find("apriori") != std::string::npos);

        std::string js = emit_tables(res, TableFormat::json);
        CHECK(js.find("\"schema_version\":1") == 1);
        CHECK(js.find("\"kappa_hat\":0.64") != std::string::npos);
    }
}

TEST_CASE("study serialization is deterministic and matches the snapshot") {
    auto cfg = mini_smoothing_config();
    auto res1 = run_study(cfg);
    auto res2 = run_study(cfg);
    std::string json1 = emit_tables(res1, TableFormat::json);
    std::string json2 = emit_tables(res2, TableFormat::json);
    CHECK(json1 == json2);
    std::string csv = emit_tables(res1, TableFormat::csv);
    CHECK(csv == emit_tables(res2, TableFormat::csv));

    SECTION("golden file") {
        std::ifstream golden(std::string(HSCALE_TEST_DATA) + "/mini_study.csv",
                             std::ios::binary);
        REQUIRE(golden.good());
        std::stringstream buf;
        buf << golden.rdbuf();
        CHECK(csv == buf.str());
    }
}
