#include <doctest.h>

#include <cmath>

#include "freightcast/selection.hpp"
#include "helpers.hpp"

using namespace freightcast;

TEST_CASE("error metrics follow the mape/mad formulas") {
  const std::vector<double> actual{100.0, 200.0};
  const std::vector<double> predicted{110.0, 180.0};
  const auto m = error_metrics(actual, predicted);
  CHECK(m.mape == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(m.mad == doctest::Approx(15.0).epsilon(1e-12));

  const auto perfect = error_metrics(actual, actual);
  CHECK(perfect.mape == doctest::Approx(0.0));
  CHECK(perfect.mad == doctest::Approx(0.0));

  CHECK_THROWS_AS(error_metrics(std::vector<double>{0.0}, std::vector<double>{1.0}), DomainError);
  CHECK_THROWS_AS(error_metrics(actual, std::vector<double>{1.0}), LengthError);
}

TEST_CASE("grid enumeration") {
  CandidateGrid grid;
  grid.p = {0, 1};
  grid.q = {0, 1};
  grid.d = {1};
  grid.D = {1};
  grid.S = 12;
  grid.transforms = {Transform{}, Transform{TransformKind::Log}};
  const auto orders = grid.enumerate();
  CHECK(orders.size() == 8);
  for (const auto& o : orders) {
    CHECK_FALSE(o.with_intercept);  // rule default: differenced models drop it
  }

  CandidateGrid big;
  big.p = {0, 7};
  big.q = {0, 7};
  big.P = {0, 3};
  big.Q = {0, 3};
  CHECK_THROWS_AS(big.enumerate(), ConfigError);
}

TEST_CASE("random-walk backtest degrades with horizon") {
  int worse = 0;
  const int seeds = 25;
  for (int s = 0; s < seeds; ++s) {
    // random walk around a positive level so MAPE stays defined
    auto steps = helpers::gaussian_draws(3000 + static_cast<std::uint64_t>(s), 140);
    std::vector<double> level(steps.size());
    double acc = 400.0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      acc += steps[i];
      level[i] = acc;
    }
    const auto series = helpers::monthly_series(std::move(level));
    const auto metrics = backtest_metrics(ModelOrder{.d = 1}, series);
    if (metrics.mape_h >= metrics.mape_1) ++worse;
  }
  CHECK(worse >= seeds * 8 / 10);
}

TEST_CASE("white-noise candidate passes the whiteness gate") {
  int pass = 0;
  const int seeds = 30;
  for (int s = 0; s < seeds; ++s) {
    std::vector<double> vals = helpers::gaussian_draws(4000 + static_cast<std::uint64_t>(s), 200);
    for (auto& v : vals) v += 50.0;
    const auto series = helpers::monthly_series(std::move(vals));
    const ModelOrder order{.with_intercept = true};
    const auto res = evaluate_candidate(order, series);
    if (res.ljung_box_p > 0.05) ++pass;
    CHECK(res.failure.empty());
  }
  CHECK(pass >= seeds * 9 / 10);
}

TEST_CASE("seasonal order recovery by aic") {
  // data from (0,1,1)(0,1,0,12): the true order should beat the no-MA variant
  const ModelOrder truth{.p = 0, .d = 1, .q = 1, .P = 0, .D = 1, .Q = 0, .S = 12};
  ParamVector params;
  params.ma = {-0.6};
  params.sigma2 = 1.0;
  int wins = 0;
  const int seeds = 25;
  for (int s = 0; s < seeds; ++s) {
    const auto data = simulate(truth, params, 192, 7000 + static_cast<std::uint64_t>(s));
    const auto right = evaluate_candidate(truth, data);
    const auto wrong =
        evaluate_candidate(ModelOrder{.p = 0, .d = 1, .q = 0, .P = 0, .D = 1, .Q = 0, .S = 12}, data);
    if (right.aic < wrong.aic) ++wins;
  }
  CHECK(wins >= seeds * 8 / 10);
}

TEST_CASE("select_model basics") {
  SUBCASE("single-candidate grid wins trivially") {
    CandidateGrid grid;
    grid.p = {1, 1};
    grid.q = {0, 0};
    grid.d = {0};
    grid.D = {0};
    grid.S = 1;
    grid.with_intercept = false;
    const auto data = helpers::monthly_series(helpers::ar1_path(5001, 300, 0.5));
    const auto report = select_model(grid, data);
    CHECK(report.ranked.size() == 1);
    CHECK(report.winner().order.p == 1);
    CHECK(report.winner().converged);
  }
  SUBCASE("ar data prefers the ar candidate and every candidate appears once") {
    CandidateGrid grid;
    grid.p = {0, 1};
    grid.q = {0, 1};
    grid.d = {0};
    grid.D = {0};
    grid.S = 1;
    grid.with_intercept = false;
    const auto data = helpers::monthly_series(helpers::ar1_path(5002, 1000, 0.6));
    const auto report = select_model(grid, data, {}, {}, 2);
    CHECK(report.ranked.size() == 4);
    CHECK(report.winner().order.p == 1);
    CHECK(report.winner().order.q == 0);
    CHECK(report.recommended_d == 0);
    // gate-passing candidates strictly precede failing ones
    bool seen_failed = false;
    for (const auto& c : report.ranked) {
      if (!c.gate_passed) seen_failed = true;
      if (seen_failed) CHECK_FALSE(c.gate_passed);
    }
  }
  SUBCASE("unit-root series recommends differencing") {
    auto steps = helpers::gaussian_draws(5003, 400);
    std::vector<double> level(steps.size());
    double acc = 100.0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      acc += steps[i];
      level[i] = acc;
    }
    CandidateGrid grid;
    grid.p = {0, 0};
    grid.q = {0, 0};
    grid.d = {1};
    grid.D = {0};
    grid.S = 1;
    const auto report = select_model(grid, helpers::monthly_series(std::move(level)));
    CHECK(report.recommended_d == 1);
  }
  SUBCASE("infeasible candidates are flagged and ranked last, never dropped") {
    CandidateGrid grid;
    grid.p = {0, 6};  // p=6 needs more data than provided
    grid.q = {0, 0};
    grid.d = {0};
    grid.D = {0};
    grid.S = 1;
    grid.with_intercept = false;
    const auto data = helpers::monthly_series(helpers::ar1_path(5004, 30, 0.4));
    const auto report = select_model(grid, data);
    CHECK(report.ranked.size() == 7);
    CHECK(report.ranked.back().failure != "");
    CHECK_FALSE(report.ranked.back().converged);
    CHECK(report.winner().failure == "");
  }
}

TEST_CASE("log transform wins on a multiplicative process") {
  int wins = 0;
  const int seeds = 25;
  for (int s = 0; s < seeds; ++s) {
    const auto logs = helpers::ar1_path(8000 + static_cast<std::uint64_t>(s), 300, 0.7, 0.5);
    std::vector<double> level(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) level[i] = std::exp(3.0 + logs[i]);
    const auto series = helpers::monthly_series(std::move(level));

    CandidateGrid grid;
    grid.p = {1, 1};
    grid.q = {0, 0};
    grid.d = {0};
    grid.D = {0};
    grid.S = 1;
    grid.with_intercept = true;
    grid.transforms = {Transform{}, Transform{TransformKind::Log}};
    const auto report = select_model(grid, series);
    if (report.winner().order.transform.kind == TransformKind::Log) ++wins;
  }
  CHECK(wins >= seeds * 8 / 10);
}
