#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hetrob/errors.hpp"
#include "hetrob/estimators.hpp"
#include "hetrob/numeric.hpp"
#include "hetrob/weights.hpp"
#include "test_support.hpp"

using namespace hetrob;

namespace {

Dataset mean_dataset(std::vector<std::vector<double>> points, std::vector<double> lambdas) {
  Dataset d;
  d.mode = Dataset::Mode::kMean;
  d.dim = points.front().size();
  d.points = std::move(points);
  d.profile = CorruptionProfile(std::move(lambdas));
  d.validate();
  return d;
}

Dataset reg_dataset(std::vector<std::vector<double>> covariates, std::vector<double> responses,
                    std::vector<double> lambdas) {
  Dataset d;
  d.mode = Dataset::Mode::kRegression;
  d.dim = covariates.front().size();
  d.points = std::move(covariates);
  d.responses = std::move(responses);
  d.profile = CorruptionProfile(std::move(lambdas));
  d.validate();
  return d;
}

WeightVector uniform_weights(const Dataset& d) {
  return WeightVector(std::vector<double>(d.size(), 1.0 / static_cast<double>(d.size())),
                      d.profile);
}

}  // namespace

TEST_CASE("weighted mean hand cases") {
  auto d = mean_dataset({{1.0}, {3.0}}, {0.0, 0.0});
  CHECK(weighted_mean(d, uniform_weights(d)).estimate[0] == 2.0);

  const WeightVector degenerate({1.0, 0.0}, d.profile);
  CHECK(weighted_mean(d, degenerate).estimate[0] == 1.0);

  auto z = mean_dataset({{0.0}, {1.0}}, {0.0, 1.0});
  const auto w = solve_optimal_weights(z.profile, 3.0);
  CHECK(weighted_mean(z, w).estimate[0] == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("univariate tukey depth enumeration") {
  auto d = mean_dataset({{1.0}, {2.0}, {3.0}}, {0.0, 0.0, 0.0});
  const auto q = DepthQuery::make(1, 0, 0);
  CHECK(weighted_tukey_depth(d, uniform_weights(d), {2.0}, q) == doctest::Approx(2.0 / 3));
  CHECK(weighted_tukey_depth(d, uniform_weights(d), {0.0}, q) == 0.0);

  const WeightVector w({0.5, 0.25, 0.25}, d.profile);
  CHECK(weighted_tukey_depth(d, w, {2.0}, q) == doctest::Approx(0.5));
}

TEST_CASE("univariate depth matches direct two-direction enumeration") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 2 + rng() % 20;
    std::vector<std::vector<double>> pts(n);
    std::vector<double> lambdas(n);
    for (std::size_t i = 0; i < n; ++i) {
      pts[i] = {gauss(rng)};
      lambdas[i] = unif(rng);
    }
    auto d = mean_dataset(pts, lambdas);
    auto w = uniform_weights(d);
    const double eta = gauss(rng);
    double up = 0.0, down = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (d.points[i][0] - eta >= 0.0) up += w.original_at(i);
      if (eta - d.points[i][0] >= 0.0) down += w.original_at(i);
    }
    const double expected = std::min(up, down);
    REQUIRE(weighted_tukey_depth(d, w, {eta}, DepthQuery::make(1, 0, 0)) ==
            doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("weighted median rules") {
  auto d = mean_dataset({{1.0}, {2.0}, {3.0}}, {0.0, 0.0, 0.0});
  CHECK(weighted_tukey_median(d, uniform_weights(d)).estimate[0] == 2.0);

  auto skew = mean_dataset({{1.0}, {2.0}, {3.0}, {100.0}}, {0.0, 0.0, 0.0, 0.0});
  const WeightVector w({0.3, 0.3, 0.3, 0.1}, skew.profile);
  CHECK(weighted_tukey_median(skew, w).estimate[0] == 2.0);

  // cumulative weight hits exactly 1/2: midpoint rule
  auto even = mean_dataset({{1.0}, {3.0}}, {0.0, 0.0});
  CHECK(weighted_tukey_median(even, uniform_weights(even)).estimate[0] == 2.0);
}

TEST_CASE("median depth floor in one dimension") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 3 + rng() % 30;
    std::vector<std::vector<double>> pts(n);
    for (auto& p : pts) p = {gauss(rng)};
    auto d = mean_dataset(pts, std::vector<double>(n, 0.0));
    auto w = uniform_weights(d);
    const auto med = weighted_tukey_median(d, w);
    const double depth =
        weighted_tukey_depth(d, w, med.estimate, DepthQuery::make(1, 0, 0));
    REQUIRE(depth >= 0.5 - 1.0 / static_cast<double>(n) - 1e-12);
  }
}

TEST_CASE("two-dimensional tukey median finds a symmetric center") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss;
  std::vector<std::vector<double>> pts(500);
  for (auto& p : pts) p = {gauss(rng), gauss(rng)};
  auto d = mean_dataset(pts, std::vector<double>(500, 0.0));
  const auto est = weighted_tukey_median(d, uniform_weights(d));
  CHECK(std::sqrt(squared_norm(est.estimate)) <= 0.2);
  CHECK(est.achieved_depth.has_value());
  CHECK(*est.achieved_depth <= 0.5 + 1e-12);
}

TEST_CASE("depth upper bound is monotone in direction count") {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> gauss;
  std::vector<std::vector<double>> pts(60);
  for (auto& p : pts) p = {gauss(rng), gauss(rng)};
  auto d = mean_dataset(pts, std::vector<double>(60, 0.0));
  auto w = uniform_weights(d);
  const std::vector<double> eta{0.1, -0.2};
  double prev = 1.0;
  for (std::size_t count : {8, 16, 32, 64, 128}) {
    const double depth = weighted_tukey_depth(d, w, eta, DepthQuery::make(2, count, 7));
    REQUIRE(depth <= prev + 1e-15);  // nested seeded prefixes only add directions
    prev = depth;
  }
}

TEST_CASE("translation equivariance") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> gauss;

  // exact in one dimension
  std::vector<std::vector<double>> pts1(25);
  for (auto& p : pts1) p = {gauss(rng)};
  auto d1 = mean_dataset(pts1, std::vector<double>(25, 0.0));
  const double base1 = weighted_tukey_median(d1, uniform_weights(d1)).estimate[0];
  auto shifted1 = pts1;
  for (auto& p : shifted1) p[0] += 17.5;
  auto d1s = mean_dataset(shifted1, std::vector<double>(25, 0.0));
  CHECK(weighted_tukey_median(d1s, uniform_weights(d1s)).estimate[0] == base1 + 17.5);

  // within search tolerance in two dimensions with identical seeds
  std::vector<std::vector<double>> pts2(80);
  for (auto& p : pts2) p = {gauss(rng), gauss(rng)};
  auto d2 = mean_dataset(pts2, std::vector<double>(80, 0.0));
  SearchBudget budget;
  budget.seed = 1234;
  const auto base2 = weighted_tukey_median(d2, uniform_weights(d2), budget).estimate;
  auto shifted2 = pts2;
  for (auto& p : shifted2) {
    p[0] += 3.0;
    p[1] -= 2.0;
  }
  auto d2s = mean_dataset(shifted2, std::vector<double>(80, 0.0));
  const auto moved = weighted_tukey_median(d2s, uniform_weights(d2s), budget).estimate;
  CHECK(std::abs(moved[0] - (base2[0] + 3.0)) <= 1e-6);
  CHECK(std::abs(moved[1] - (base2[1] - 2.0)) <= 1e-6);
}

TEST_CASE("regression depth hand cases") {
  const auto q = DepthQuery::make(1, 0, 0);
  auto fit = reg_dataset({{1.0}, {2.0}, {3.0}}, {2.0, 4.0, 6.0}, {0.0, 0.0, 0.0});
  CHECK(weighted_regression_depth(fit, uniform_weights(fit), {2.0}, q) == 1.0);

  auto sym = reg_dataset({{1.0}, {-1.0}}, {0.0, 0.0}, {0.0, 0.0});
  CHECK(weighted_regression_depth(sym, uniform_weights(sym), {0.0}, q) == 1.0);

  auto mixed = reg_dataset({{1.0}, {2.0}, {3.0}}, {1.0, 2.0, 30.0}, {0.0, 0.0, 0.0});
  CHECK(weighted_regression_depth(mixed, uniform_weights(mixed), {1.0}, q) ==
        doctest::Approx(2.0 / 3));
}

TEST_CASE("noiseless regression recovers the slope") {
  auto fit = reg_dataset({{1.0}, {2.0}, {3.0}, {-1.0}}, {2.0, 4.0, 6.0, -2.0},
                         {0.0, 0.1, 0.2, 0.0});
  for (const auto& w : {uniform_weights(fit), solve_optimal_weights(fit.profile, 3.0)}) {
    const auto est = weighted_regression_coefficient(fit, w);
    REQUIRE(std::abs(est.estimate[0] - 2.0) <= 1e-6);
    REQUIRE(*est.achieved_depth == doctest::Approx(1.0));
  }
}

TEST_CASE("contaminated univariate regression with threshold weights") {
  std::mt19937_64 rng(53);
  std::normal_distribution<double> gauss;
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<std::vector<double>> x;
  std::vector<double> y, lambdas;
  for (int i = 0; i < 200; ++i) {
    const double xi = gauss(rng);
    x.push_back({xi});
    y.push_back(3.0 * xi + noise(rng));
    lambdas.push_back(0.05);
  }
  for (int i = 0; i < 20; ++i) {
    x.push_back({gauss(rng)});
    y.push_back(500.0);
    lambdas.push_back(0.95);
  }
  auto d = reg_dataset(x, y, lambdas);
  const auto w = threshold_weights(d.profile, 0.5);
  const auto est = weighted_regression_coefficient(d, w);
  CHECK(std::abs(est.estimate[0] - 3.0) <= 0.05);
}

TEST_CASE("two-dimensional clean regression") {
  std::mt19937_64 rng(59);
  std::normal_distribution<double> gauss;
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<std::vector<double>> x(500);
  std::vector<double> y(500);
  for (int i = 0; i < 500; ++i) {
    x[i] = {gauss(rng), gauss(rng)};
    y[i] = x[i][0] - x[i][1] + noise(rng);
  }
  auto d = reg_dataset(x, y, std::vector<double>(500, 0.0));
  const auto est = weighted_regression_coefficient(d, uniform_weights(d));
  const double err = std::sqrt((est.estimate[0] - 1.0) * (est.estimate[0] - 1.0) +
                               (est.estimate[1] + 1.0) * (est.estimate[1] + 1.0));
  CHECK(err <= 0.1);
}

TEST_CASE("baselines") {
  auto d = mean_dataset({{1.0}, {2.0}, {3.0}}, {0.0, 0.0, 0.0});
  auto b = baselines(d);
  CHECK(b.at("mean").estimate[0] == 2.0);
  CHECK(b.at("median").estimate[0] == 2.0);

  auto skew = mean_dataset({{1.0}, {2.0}, {100.0}}, {0.0, 0.0, 0.0});
  auto bs = baselines(skew);
  CHECK(bs.at("mean").estimate[0] == doctest::Approx(103.0 / 3));
  CHECK(bs.at("median").estimate[0] == 2.0);

  auto r = reg_dataset({{1.0}, {2.0}}, {1.0, 2.0}, {0.0, 0.0});
  CHECK(baselines(r).at("ols").estimate[0] == doctest::Approx(1.0));

  auto singular = reg_dataset({{0.0}, {0.0}}, {1.0, 2.0}, {0.0, 0.0});
  CHECK(baselines(singular).at("ols").failed);
}

TEST_CASE("dataset validation") {
  Dataset d;
  d.mode = Dataset::Mode::kMean;
  d.dim = 1;
  d.points = {{1.0}, {2.0}};
  d.profile = CorruptionProfile({0.5});
  CHECK_THROWS_AS(d.validate(), InputError);
}
