#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "relaysim/analytics.hpp"
#include "relaysim/harness.hpp"

using namespace relaysim;

namespace {

SimConfig small_config() {
    SimConfig config;
    config.n = 50;
    config.m = 3;
    config.trials = 200;
    config.master_seed = 9001;
    return config;
}

}  // namespace

TEST_CASE("validate_config rejects out-of-range fields") {
    CHECK_NOTHROW(validate_config(SimConfig{}));
    SimConfig bad;
    bad.n = 0;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = SimConfig{};
    bad.m = 0;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = SimConfig{};
    bad.beta = 0.0;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = SimConfig{};
    bad.trials = 0;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = SimConfig{};
    bad.s = -0.5;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = SimConfig{};
    bad.snr1_db = std::nan("");
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = SimConfig{};
    bad.n = 2;
    bad.mode = Phase1Mode::threshold;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad.s = 1.0;
    CHECK_NOTHROW(validate_config(bad));
}

TEST_CASE("effective_threshold defaults to log n - log log n") {
    SimConfig config;
    config.n = 100;
    CHECK(effective_threshold(config) ==
          doctest::Approx(std::log(100.0) - std::log(std::log(100.0)))
              .epsilon(1e-13));
    config.s = 2.5;
    CHECK(effective_threshold(config) == 2.5);
}

TEST_CASE("run_trial is deterministic and respects structural invariants") {
    const SimConfig config = small_config();
    const auto first = run_trial(config, 7);
    const auto again = run_trial(config, 7);
    CHECK(first.hop1.bits_delivered == again.hop1.bits_delivered);
    CHECK(first.hop2.bits_delivered == again.hop2.bits_delivered);
    CHECK(first.hop1.sinr_values == again.hop1.sinr_values);
    CHECK(first.hop2.sinr_values == again.hop2.sinr_values);
    CHECK(first.max_feedback_candidates == again.max_feedback_candidates);

    const auto other = run_trial(config, 8);
    CHECK((first.hop1.sinr_values != other.hop1.sinr_values));

    for (std::uint64_t t = 0; t < 50; ++t) {
        const auto outcome = run_trial(config, t);
        CHECK(outcome.hop1.bits_delivered <= config.m);
        CHECK(outcome.hop2.bits_delivered <= config.m);
        CHECK(outcome.max_feedback_candidates <= 1);
        if (outcome.hop2.feedback_count > 0) {
            CHECK(outcome.min_scheduled_sinr >= config.beta);
            CHECK(outcome.min_realized_margin >= -1e-9);
        } else {
            CHECK(std::isinf(outcome.min_scheduled_sinr));
        }
    }
}

TEST_CASE("a lone pair at huge SNR delivers on both hops") {
    SimConfig config;
    config.n = 1;
    config.m = 1;
    config.snr1_db = 120.0;
    config.snr2_db = 120.0;
    config.trials = 1;
    for (std::uint64_t t = 0; t < 20; ++t) {
        const auto outcome = run_trial(config, t);
        CHECK(outcome.hop1.bits_delivered == 1);
        CHECK(outcome.hop2.bits_delivered == 1);
    }
}

TEST_CASE("starved hop-2 SNR silences the second hop") {
    SimConfig config = small_config();
    config.snr2_db = -100.0;
    const auto outcome = run_trial(config, 0);
    CHECK(outcome.hop2.bits_delivered == 0);
    CHECK(outcome.hop2.feedback_count == 0);
    CHECK(std::isinf(outcome.min_scheduled_sinr));
    CHECK(std::isinf(outcome.min_realized_margin));
}

TEST_CASE("golden trial regression pin") {
    SimConfig config;
    config.n = 100;
    config.m = 3;
    config.master_seed = 42;
    const auto outcome = run_trial(config, 0);
    // Frozen from the first run at this seed; drift means the seeded channel,
    // the schedulers, or the SINR arithmetic changed behavior.
    CHECK(outcome.hop1.bits_delivered == 3);
    CHECK(outcome.hop2.bits_delivered == 3);
    CHECK(outcome.hop1.feedback_count == 3);
    CHECK(outcome.hop2.feedback_count == 67);
    CHECK(outcome.max_feedback_candidates == 1);
    CHECK(outcome.min_realized_margin == 0.0);
    CHECK(outcome.min_scheduled_sinr == doctest::Approx(2.0112577246407182).epsilon(1e-15));
    REQUIRE(outcome.hop1.sinr_values.size() == 3);
    CHECK(outcome.hop1.sinr_values.at({87, 0}) ==
          doctest::Approx(4.3149711219549971).epsilon(1e-15));
    CHECK(outcome.hop1.sinr_values.at({31, 1}) ==
          doctest::Approx(1.7137188692770797).epsilon(1e-15));
    REQUIRE(outcome.hop2.sinr_values.size() == 3);
    CHECK(outcome.hop2.sinr_values.at({1, 24}) ==
          doctest::Approx(2.0112577246407182).epsilon(1e-15));
}

TEST_CASE("experiment means track the hop-2 closed form") {
    SimConfig config;
    config.n = 100;
    config.m = 3;
    config.trials = 10000;
    config.master_seed = 1234;
    const auto record = run_experiment(config, 0);
    CHECK(record.trials == 10000);
    const double closed = analytics::r2_closed_form(100, 3, 10.0);
    CHECK(record.r2_closed == doctest::Approx(closed).epsilon(1e-12));
    CHECK(std::fabs(record.r2_mean - record.r2_closed) <=
          3.0 * std::max(record.r2_stderr, 1e-4));
    CHECK(record.r_mean ==
          std::min(record.r1_mean, record.r2_mean) / 2.0);
    CHECK(record.max_feedback_candidates <= 1);
    CHECK(record.min_realized_margin >= -1e-9);
}

TEST_CASE("hop-1 mean clears the analytic lower bound") {
    for (Phase1Mode mode : {Phase1Mode::argmax, Phase1Mode::threshold}) {
        SimConfig config;
        config.n = 200;
        config.m = 4;
        config.trials = 10000;
        config.mode = mode;
        config.master_seed = 777;
        const auto record = run_experiment(config, 0);
        CHECK(std::isfinite(record.r1_lower_half));
        CHECK(record.r1_mean >=
              2.0 * record.r1_lower_half - 3.0 * record.r1_stderr);
        CHECK(record.r1_mean <= 2.0 * record.genie_upper_half);
    }
}

TEST_CASE("single-trial experiments have undefined stderr") {
    SimConfig config = small_config();
    config.trials = 1;
    const auto record = run_experiment(config);
    CHECK(std::isnan(record.r1_stderr));
    CHECK(std::isnan(record.r2_stderr));
    CHECK(std::isfinite(record.r_mean));
}

TEST_CASE("feedback bit accounting multiplies counts by index widths") {
    SimConfig config;
    config.n = 64;
    config.m = 3;
    config.trials = 400;
    const auto record = run_experiment(config);
    // Argmax mode: every relay schedules in every trial.
    CHECK(record.fb_bits_hop1 == doctest::Approx(3.0 * 6.0).epsilon(1e-13));
    // Hop 2: every feeding-back destination sends one relay index.
    CHECK(record.fb_bits_hop2 > 0.0);
    CHECK(record.fb_bits_hop2 <= 64.0 * analytics::ceil_log2(3));
}

TEST_CASE("worker count never changes the record") {
    const SimConfig config = small_config();
    const auto lone = run_experiment(config, 1);
    const auto pooled = run_experiment(config, 4);
    const auto hardware = run_experiment(config, 0);
    CHECK(to_csv_row(lone) == to_csv_row(pooled));
    CHECK(to_csv_row(lone) == to_csv_row(hardware));
    CHECK(lone.min_scheduled_sinr == pooled.min_scheduled_sinr);
    CHECK(lone.min_realized_margin == pooled.min_realized_margin);
    CHECK(lone.max_feedback_candidates == pooled.max_feedback_candidates);
}

TEST_CASE("default_m_grid spans 1 to ceil(3 log n)") {
    const auto grid = default_m_grid(100);
    REQUIRE_FALSE(grid.empty());
    CHECK(grid.front() == 1);
    CHECK(grid.back() ==
          static_cast<int>(std::ceil(3.0 * std::log(100.0))));
    CHECK(default_m_grid(1) == std::vector<int>{1});
}

TEST_CASE("optimize_m scans the grid and keeps the best cell") {
    SimConfig base = small_config();
    base.trials = 300;
    const auto lone = optimize_m(base, {3});
    CHECK(lone.m_star == 3);
    CHECK(lone.best.m == 3);
    CHECK(lone.cells.size() == 1);

    const auto scan = optimize_m(base, {1, 2, 4, 8}, 0);
    REQUIRE(scan.cells.size() == 4);
    for (const auto& cell : scan.cells) {
        CHECK(scan.best.r_mean >= cell.r_mean);
        CHECK(cell.n == base.n);
    }
    CHECK(scan.best.m == scan.m_star);
}

TEST_CASE("optimize_m lands near the analytic relay count") {
    SimConfig base;
    base.n = 500;
    base.trials = 400;
    base.master_seed = 31337;
    std::vector<int> grid;
    for (int m = 1; m <= 14; ++m) grid.push_back(m);
    const auto result = optimize_m(base, grid, 0);
    // optimal_m_phase2(500, 10) is about 7.2; Monte Carlo noise wobbles the
    // argmax by a couple of grid steps.
    CHECK(result.m_star >= 3);
    CHECK(result.m_star <= 12);
}

TEST_CASE("sweep_n of one n equals optimize_m") {
    SimConfig base = small_config();
    base.trials = 300;
    const auto swept = sweep_n(base, {50}, 0);
    REQUIRE(swept.size() == 1);
    SimConfig direct = base;
    direct.n = 50;
    const auto optimized = optimize_m(direct, {}, 0);
    CHECK(to_csv_row(swept[0]) == to_csv_row(optimized.best));
    CHECK_THROWS_AS(sweep_n(base, {2}, 0), std::invalid_argument);
}

TEST_CASE("CSV schema is frozen") {
    CHECK(csv_header() ==
          "n,m_star,r1_mean,r1_stderr,r2_mean,r2_stderr,r_mean,r1_lower_half,"
          "genie_upper_half,r2_closed,coop_upper_half,fb_bits_hop1,fb_bits_hop2,"
          "trials,seed");
    SimConfig config = small_config();
    config.trials = 50;
    const auto record = run_experiment(config);
    const std::string row = to_csv_row(record);
    CHECK(std::count(row.begin(), row.end(), ',') == 14);
    std::ostringstream out;
    write_csv(out, {record, record});
    const std::string text = out.str();
    CHECK(text.find(csv_header() + "\n") == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}

TEST_CASE("JSON emission round-trips the record fields") {
    SimConfig config = small_config();
    config.trials = 50;
    const auto record = run_experiment(config);
    const auto parsed = nlohmann::json::parse(to_json_string({record}));
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0]["n"] == 50);
    CHECK(parsed[0]["m_star"] == 3);
    CHECK(parsed[0]["trials"] == 50);
    CHECK(parsed[0]["mode"] == "argmax");
    CHECK(parsed[0]["hop1_counting"] == "distinct-source");
    CHECK(parsed[0]["r_mean"].get<double>() ==
          doctest::Approx(record.r_mean).epsilon(1e-12));
}
