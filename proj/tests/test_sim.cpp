// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "labline/errors.hpp"
#include "labline/model.hpp"
#include "labline/sim.hpp"

using namespace labline;

namespace {

model::Design paper_design() {
    std::vector<double> x;
    for (double v : {-0.75, -0.25, 0.25, 0.75}) {
        for (int r = 0; r < 5; ++r) x.push_back(v);
    }
    return model::design_stats(std::move(x), 5);
}

sim::SimConfig base_config() {
    sim::SimConfig cfg;
    cfg.design = paper_design();
    cfg.params = {0.0, 1.0, 0.5, 0.3, 0.2};
    cfg.replications = 5000;
    cfg.seed = 20240501;
    return cfg;
}

}  // namespace

TEST_CASE("zero variances reproduce the true line exactly") {
    sim::SimConfig cfg;
    cfg.design = paper_design();
    cfg.params = {2.0, 3.0, 0.0, 0.0, 0.0};
    cfg.seed = 7;
    const auto data = sim::simulate_dataset(cfg, 0);
    REQUIRE(data.lab_count() == 5);
    REQUIRE(data.obs_per_lab() == 20);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 20; ++j) {
            CHECK(data.y(i, j) == 2.0 + 3.0 * data.x[j]);
        }
    }
}

TEST_CASE("same (seed, replicate) is bit-identical; different replicates differ") {
    auto cfg = base_config();
    const auto a = sim::simulate_dataset(cfg, 5);
    const auto b = sim::simulate_dataset(cfg, 5);
    CHECK(a.y == b.y);
    CHECK(a.labs == b.labs);

    const auto c = sim::simulate_dataset(cfg, 6);
    CHECK(!(a.y == c.y));

    cfg.seed += 1;
    const auto d = sim::simulate_dataset(cfg, 5);
    CHECK(!(a.y == d.y));
}

TEST_CASE("negative standard deviations are rejected") {
    auto cfg = base_config();
    cfg.params.sigma_B = -0.1;
    CHECK_THROWS_AS(sim::simulate_dataset(cfg, 0), std::invalid_argument);
}

TEST_CASE("mean squares collapse to sigma_E^2 under the null model") {
    sim::SimConfig cfg;
    cfg.design = paper_design();
    cfg.params = {0.3, 0.0, 0.0, 0.0, 0.7};
    cfg.replications = 2000;
    cfg.seed = 99;

    const auto s = sim::monte_carlo_mean_squares(cfg);
    const double var_e = 0.7 * 0.7;
    for (const auto* stat : {&s.V_A, &s.V_B, &s.V_L, &s.V_R, &s.V_E}) {
        CHECK(stat->expected == var_e);
        CHECK(std::abs(stat->empirical_mean - var_e) <= 3.0 * stat->std_error);
    }
}

TEST_CASE("empirical mean squares match the closed-form expectations") {
    const auto s = sim::monte_carlo_mean_squares(base_config());
    const double var_a = 0.5 * 0.5;
    const double var_b = 0.3 * 0.3;
    const double var_e = 0.2 * 0.2;
    // n sigma_A^2 + sigma_E^2 and S_xxL sigma_B^2 + sigma_E^2 at these params
    CHECK(s.V_A.expected == 20.0 * var_a + var_e);
    CHECK(s.V_B.expected == 6.25 * var_b + var_e);
    CHECK(s.V_R.expected == 1.0 * 1.0 * 31.25 + 6.25 * var_b + var_e);
    CHECK(s.V_E.expected == var_e);
    for (const auto* stat : {&s.V_A, &s.V_B, &s.V_L, &s.V_R, &s.V_E}) {
        CHECK(std::abs(stat->empirical_mean - stat->expected) <= 3.0 * stat->std_error);
        CHECK(stat->std_error > 0.0);
    }
}

TEST_CASE("aggregates do not depend on the thread count") {
    auto cfg = base_config();
    cfg.replications = 3000;
    const auto serial = sim::monte_carlo_mean_squares(cfg, 1);
    const auto parallel = sim::monte_carlo_mean_squares(cfg, 4);
    CHECK(serial.V_A.empirical_mean == parallel.V_A.empirical_mean);
    CHECK(serial.V_B.empirical_mean == parallel.V_B.empirical_mean);
    CHECK(serial.V_L.empirical_mean == parallel.V_L.empirical_mean);
    CHECK(serial.V_R.empirical_mean == parallel.V_R.empirical_mean);
    CHECK(serial.V_E.empirical_mean == parallel.V_E.empirical_mean);
    CHECK(serial.V_A.std_error == parallel.V_A.std_error);

    const auto r1 = sim::rejection_rate(cfg, sim::FTestKind::Slopes, 0.05, 1);
    const auto r4 = sim::rejection_rate(cfg, sim::FTestKind::Slopes, 0.05, 4);
    CHECK(r1.rate == r4.rate);
}

TEST_CASE("monte_carlo_mean_squares requires at least 100 replications") {
    auto cfg = base_config();
    cfg.replications = 99;
    CHECK_THROWS_AS(sim::monte_carlo_mean_squares(cfg), std::invalid_argument);
}

TEST_CASE("noise-free models make the tests undefined, not crashing") {
    auto cfg = base_config();
    cfg.replications = 2000;  // large enough to engage the thread pool
    cfg.params = {0.0, 1.0, 0.5, 0.3, 0.0};
    CHECK_THROWS_AS(sim::rejection_rate(cfg, sim::FTestKind::Slopes, 0.05), UndefinedTestError);
    CHECK_THROWS_AS(sim::rejection_rate(cfg, sim::FTestKind::Intercepts, 0.05),
                    UndefinedTestError);
    cfg.params = {0.0, 1.0, 0.5, 0.0, 0.0};
    CHECK_THROWS_AS(sim::rejection_rate(cfg, sim::FTestKind::Regression, 0.05),
                    UndefinedTestError);
    cfg.params = {0.0, 1.0, 0.5, 0.3, 0.0};  // sigma_B > 0 keeps V_B positive
    CHECK(sim::rejection_rate(cfg, sim::FTestKind::Regression, 0.05).rate >= 0.0);
}

TEST_CASE("null validation: params must satisfy the requested null") {
    auto cfg = base_config();  // sigma_B = 0.3 violates the slopes null
    cfg.replications = 100;
    CHECK_THROWS_AS(sim::null_rejection_rate(cfg, sim::FTestKind::Slopes, 0.05),
                    std::invalid_argument);

    cfg.params.sigma_B = 0.0;  // sigma_A still 0.5: intercepts null violated
    CHECK_THROWS_AS(sim::null_rejection_rate(cfg, sim::FTestKind::Intercepts, 0.05),
                    std::invalid_argument);

    cfg.params.b0 = 1.0;
    CHECK_THROWS_AS(sim::null_rejection_rate(cfg, sim::FTestKind::Regression, 0.05),
                    std::invalid_argument);
}

TEST_CASE("size calibration smoke test for the three F tests") {
    sim::SimConfig cfg;
    cfg.design = paper_design();
    cfg.replications = 2000;
    cfg.seed = 314;

    SUBCASE("slopes") {
        cfg.params = {0.0, 1.0, 0.5, 0.0, 1.0};
        const auto r = sim::null_rejection_rate(cfg, sim::FTestKind::Slopes, 0.05);
        CHECK(std::abs(r.rate - 0.05) <= 3.0 * r.std_error);
        CHECK(r.std_error == std::sqrt(0.05 * 0.95 / 2000.0));
    }
    SUBCASE("intercepts") {
        cfg.params = {0.0, 1.0, 0.0, 0.4, 1.0};
        const auto r = sim::null_rejection_rate(cfg, sim::FTestKind::Intercepts, 0.05);
        CHECK(std::abs(r.rate - 0.05) <= 3.0 * r.std_error);
    }
    SUBCASE("regression") {
        cfg.params = {0.5, 0.0, 0.3, 0.4, 1.0};
        const auto r = sim::null_rejection_rate(cfg, sim::FTestKind::Regression, 0.05);
        CHECK(std::abs(r.rate - 0.05) <= 3.0 * r.std_error);
    }
}

TEST_CASE("a0_hat is unbiased across replicates") {
    sim::SimConfig cfg;
    cfg.design = paper_design();
    cfg.params = {1.0, 0.5, 0.4, 0.2, 0.6};
    cfg.seed = 2718;
    const std::uint64_t reps = 10000;

    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t r = 0; r < reps; ++r) {
        const auto data = sim::simulate_dataset(cfg, r);
        const auto fit = model::fit_overall(data, cfg.design);
        sum += fit.a0_hat;
        sum_sq += fit.a0_hat * fit.a0_hat;
    }
    const double mean = sum / reps;
    const double var = (sum_sq - reps * mean * mean) / (reps - 1.0);
    const double se = std::sqrt(var / reps);
    CHECK(std::abs(mean - 1.0) <= 3.0 * se);
}

TEST_CASE("slopes-test power is non-decreasing in sigma_B") {
    sim::SimConfig cfg;
    cfg.design = paper_design();
    cfg.replications = 2000;
    cfg.seed = 1618;

    std::vector<double> rates;
    std::vector<double> ses;
    for (double sigma_b : {0.0, 0.2, 0.4, 0.8}) {
        cfg.params = {0.0, 1.0, 0.3, sigma_b, 1.0};
        const auto r = sim::rejection_rate(cfg, sim::FTestKind::Slopes, 0.05);
        rates.push_back(r.rate);
        ses.push_back(std::sqrt(r.rate * (1.0 - r.rate) / 2000.0));
    }
    for (std::size_t i = 1; i < rates.size(); ++i) {
        const double slack = std::sqrt(ses[i - 1] * ses[i - 1] + ses[i] * ses[i]);
        CHECK(rates[i] >= rates[i - 1] - slack);
    }
    CHECK(rates.back() > 0.5);  // strong effect must reject most of the time
}
