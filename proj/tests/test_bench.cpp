#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hetrob/bench.hpp"
#include "hetrob/errors.hpp"
#include "hetrob/numeric.hpp"
#include "test_support.hpp"

using namespace hetrob;

namespace {

ExperimentConfig bounded_config(double q, std::size_t n, std::size_t trials) {
  ExperimentConfig config;
  config.scenario.clean.kind = DistributionSpec::Kind::kPointMass;
  config.scenario.clean.mean = {0.0};
  config.scenario.adversary.kind = AdversarySpec::Kind::kFixedOutlier;
  config.scenario.adversary.value = {1.0};
  config.scenario.truth = {0.0};
  config.scenario.profile_source.kind = ProfileSource::Kind::kPowerLaw;
  config.scenario.profile_source.q = q;
  config.scenario.profile_source.n = n;
  config.trials = trials;
  config.root_seed = 20240815;
  return config;
}

}  // namespace

TEST_CASE("empirical quantile conventions") {
  CHECK(empirical_quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(empirical_quantile({1.0, 2.0, 3.0, 4.0}, 0.25) == 1.0);
  CHECK(empirical_quantile({1.0, 2.0, 3.0, 4.0}, 0.26) == 2.0);
  CHECK(empirical_quantile({5.0}, 0.99) == 5.0);
  // non-decreasing in p
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0, 9.0};
  double prev = -1.0;
  for (double p = 0.05; p < 1.0; p += 0.05) {
    const double q = empirical_quantile(v, p);
    REQUIRE(q >= prev);
    prev = q;
  }
}

TEST_CASE("zero corruption gives exactly zero MSE") {
  auto config = bounded_config(1.0, 50, 20);
  config.scenario.adversary.kind = AdversarySpec::Kind::kNone;
  config.scenario.profile_source.kind = ProfileSource::Kind::kExplicit;
  config.scenario.profile_source.lambdas = std::vector<double>(50, 0.0);
  config.estimators = {{EstimatorSpec::Kind::kOptimalLinear, kDefaultPenalty, {}, {}}};
  const auto report = run_experiment(config);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].value == 0.0);
  CHECK(report.rows[0].failures == 0);
}

TEST_CASE("determinism: identical config gives bit-identical report") {
  auto config = bounded_config(3.0, 200, 50);
  config.estimators = {{EstimatorSpec::Kind::kBaselineMean, kDefaultPenalty, {}, {}},
                       {EstimatorSpec::Kind::kThreshold, kDefaultPenalty, {}, {}}};
  config.metrics = {{MetricSpec::Kind::kMse, 0.8},
                    {MetricSpec::Kind::kQuantile, 0.8},
                    {MetricSpec::Kind::kBias, 0.8}};
  const auto a = run_experiment(config);
  const auto b = run_experiment(config);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    REQUIRE(a.rows[i].value == b.rows[i].value);
    REQUIRE(a.rows[i].stderr_value == b.rows[i].stderr_value);
  }
  CHECK(a.config_hash == b.config_hash);
}

TEST_CASE("sample-mean MSE matches the closed-form bias at q = 3") {
  auto config = bounded_config(3.0, 1000, 1000);
  config.estimators = {{EstimatorSpec::Kind::kBaselineMean, kDefaultPenalty, {}, {}}};
  const auto report = run_experiment(config);
  // bias^2 = (E[lambda])^2 = 1/16 under fixed-outlier-at-1, point-mass-at-0
  CHECK(report.rows[0].value == doctest::Approx(1.0 / 16).epsilon(0.2));
}

TEST_CASE("threshold trial-mean error respects the variance bound") {
  auto config = bounded_config(3.0, 1000, 200);
  config.estimators = {{EstimatorSpec::Kind::kThreshold, kDefaultPenalty, {}, {}}};
  const auto profile =
      config.scenario.profile_source.realize(mix_seed(config.root_seed ^ 0x50524f46ULL, 0));
  const auto errors = run_trials(config, profile, 3.0);
  const auto w = threshold_weights(
      profile, rate_functional(profile, 1.0).argmin_threshold);
  const double bound =
      7.0 * (w.squared_norm() + 3.0 * [&] {
        double dot = 0.0;
        for (std::size_t i = 0; i < profile.size(); ++i)
          dot += w.sorted_at(i) * profile.sorted_at(i);
        return dot * dot;
      }());
  double mean = 0.0;
  for (double v : errors[0].squared_errors) mean += v;
  mean /= static_cast<double>(errors[0].squared_errors.size());
  CHECK(mean <= bound);
}

TEST_CASE("sweep emits one row per grid point, estimator, and metric") {
  auto config = bounded_config(1.0, 100, 20);
  config.estimators = {{EstimatorSpec::Kind::kBaselineMean, kDefaultPenalty, {}, {}},
                       {EstimatorSpec::Kind::kOptimalLinear, kDefaultPenalty, {}, {}}};
  config.metrics = {{MetricSpec::Kind::kMse, 0.8}, {MetricSpec::Kind::kQuantile, 0.8}};
  const auto report = sweep_q(config, {0.5, 1.0, 2.0});
  REQUIRE(report.rows.size() == 3 * 2 * 2);
  for (const auto& row : report.rows) REQUIRE(row.trials == 20);
  CHECK(report.rows.front().q == 0.5);
  CHECK(report.rows.back().q == 2.0);
}

TEST_CASE("estimator failures are counted, not fatal") {
  ExperimentConfig config;
  config.scenario.clean.kind = DistributionSpec::Kind::kRegression;
  config.scenario.clean.beta = {2.0};
  config.scenario.truth = {2.0};
  config.scenario.adversary.kind = AdversarySpec::Kind::kFixedOutlier;
  config.scenario.adversary.value = {0.0};
  config.scenario.adversary.response = 5.0;
  config.scenario.profile_source.kind = ProfileSource::Kind::kExplicit;
  // every sample corrupted to the same (covariate, response) point: singular design
  config.scenario.profile_source.lambdas = std::vector<double>(20, 1.0);
  config.trials = 10;
  config.root_seed = 3;
  config.estimators = {{EstimatorSpec::Kind::kBaselineOls, kDefaultPenalty, {}, {}}};
  const auto report = run_experiment(config);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].failures == 10);
  CHECK(std::isnan(report.rows[0].value));
}

TEST_CASE("mode mismatch is rejected at validation") {
  auto config = bounded_config(1.0, 10, 5);
  config.estimators = {{EstimatorSpec::Kind::kBaselineOls, kDefaultPenalty, {}, {}}};
  CHECK_THROWS_AS(config.validate(), InputError);
  config.estimators = {{EstimatorSpec::Kind::kBaselineMean, kDefaultPenalty, {}, {}}};
  config.trials = 0;
  CHECK_THROWS_AS(config.validate(), InputError);
}

TEST_CASE("doubling trials shrinks the standard error") {
  auto small = bounded_config(2.0, 300, 250);
  small.estimators = {{EstimatorSpec::Kind::kBaselineMean, kDefaultPenalty, {}, {}}};
  auto large = small;
  large.trials = 1000;
  const double se_small = run_experiment(small).rows[0].stderr_value;
  const double se_large = run_experiment(large).rows[0].stderr_value;
  // quadrupling trials should halve the SE, within Monte-Carlo slack
  CHECK(se_large <= 0.75 * se_small);
}

TEST_CASE("rate overlay") {
  const CorruptionProfile clean(std::vector<double>(100, 0.0));
  const auto rows = rate_overlay(clean, 1.0, 1.0);
  REQUIRE(rows.front().quantity == "f");
  CHECK(rows.front().value == doctest::Approx(0.01));

  // homogeneous profile: overlay value d/n + eps^2
  const CorruptionProfile hom(std::vector<double>(50, 0.125));
  const auto hrows = rate_overlay(hom, 2.0, 1.0);
  CHECK(hrows.front().value == 2.0 / 50 + 0.125 * 0.125);

  // sandwich sanity: max lower bound <= upper-bound expression on the same profile
  const CorruptionProfile random(test::random_lambdas(200, 71));
  const auto rrows = rate_overlay(random, 1.0, 1.0);
  double max_lb = 0.0, f1 = 0.0;
  for (const auto& row : rrows) {
    if (row.quantity == "lecam_lb_max") max_lb = row.value;
    if (row.quantity == "r2_f1") f1 = row.value;
  }
  CHECK(max_lb <= f1);
}

TEST_CASE("metric sanity: MSE dominates squared bias") {
  auto config = bounded_config(2.0, 300, 400);
  config.estimators = {{EstimatorSpec::Kind::kBaselineMean, kDefaultPenalty, {}, {}},
                       {EstimatorSpec::Kind::kThreshold, kDefaultPenalty, {}, {}}};
  config.metrics = {{MetricSpec::Kind::kMse, 0.8}, {MetricSpec::Kind::kBias, 0.8}};
  const auto report = run_experiment(config);
  for (const auto& est : config.estimators) {
    double mse = -1.0, mse_se = 0.0, bias = -1.0;
    for (const auto& row : report.rows) {
      if (row.estimator != est.name()) continue;
      if (row.metric == "mse") {
        mse = row.value;
        mse_se = row.stderr_value;
      }
      if (row.metric == "bias") bias = row.value;
    }
    REQUIRE(mse >= 0.0);
    REQUIRE(bias >= 0.0);
    REQUIRE(mse >= bias * bias - 3.0 * mse_se);
  }
}
