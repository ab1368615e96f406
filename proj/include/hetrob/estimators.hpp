#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hetrob/profile.hpp"
#include "hetrob/weights.hpp"

namespace hetrob {

/// Observations paired with their corruption profile. Mean mode stores points in R^d;
/// regression mode stores covariate/response pairs. Everything is indexed in the
/// caller's original order, aligned with the profile.
struct Dataset {
  enum class Mode { kMean, kRegression };

  Mode mode = Mode::kMean;
  std::size_t dim = 0;
  std::vector<std::vector<double>> points;  ///< mean: observations; regression: covariates
  std::vector<double> responses;            ///< regression only
  CorruptionProfile profile{std::vector<double>{}};
  /// Realized Bernoulli corruption flags, retained for diagnostics only; estimators never read them.
  std::vector<bool> corrupted;

  std::size_t size() const { return points.size(); }
  void validate() const;
};

/// Direction set used to approximate the inner minimum of the depth. For d = 1 the set is
/// exactly {+1, -1} and the depth is exact.
struct DepthQuery {
  std::vector<std::vector<double>> directions;
  bool exact = false;

  /// d = 1: {+1, -1}. d >= 2: `count` seeded random unit vectors; prefixes of a fixed seed
  /// are nested, so growing `count` only ever adds directions.
  static DepthQuery make(std::size_t dim, std::size_t count, std::uint64_t seed);
};

struct SearchBudget {
  std::size_t directions = 64;
  std::size_t starts = 16;
  std::size_t rounds = 40;
  std::uint64_t seed = 0;
};

struct EstimateResult {
  std::vector<double> estimate;
  std::string method;
  std::optional<double> achieved_depth;
  std::vector<double> weights_used;  ///< original order; empty for unweighted baselines
  bool failed = false;
  std::string error;
};

/// Compensated weighted sum of the observations.
EstimateResult weighted_mean(const Dataset& data, const WeightVector& w);

/// min over the query's directions (augmented with all normalized differences Z_i - eta)
/// of sum_i w_i 1{v^T (Z_i - eta) >= 0}. Exact for d = 1; an upper bound on the true
/// depth otherwise.
double weighted_tukey_depth(const Dataset& data, const WeightVector& w,
                            const std::vector<double>& eta, const DepthQuery& q);

/// argmax of the weighted depth. d = 1: exact weighted median (midpoint rule when the
/// cumulative weight hits 1/2 exactly). d >= 2: multi-start shrinking-step search with
/// data-relative candidates.
EstimateResult weighted_tukey_median(const Dataset& data, const WeightVector& w,
                                     const SearchBudget& search = {});

/// min over directions of sum_i w_i 1{(y_i - eta^T W_i)(v^T W_i) >= 0}, directions
/// augmented with the normalized covariates.
double weighted_regression_depth(const Dataset& data, const WeightVector& w,
                                 const std::vector<double>& eta, const DepthQuery& q);

/// argmax of the weighted regression depth; starts include the weighted least-squares
/// solution and (d = 1) per-sample exact-fit slopes.
EstimateResult weighted_regression_coefficient(const Dataset& data, const WeightVector& w,
                                               const SearchBudget& search = {});

/// Classical comparison estimators: sample mean + coordinate-wise median (mean mode),
/// ordinary least squares (regression mode; singular designs yield a failed entry).
std::map<std::string, EstimateResult> baselines(const Dataset& data);

/// Weighted least squares solve (X^T diag(w) X) beta = X^T diag(w) y.
/// Throws EstimationError on a singular design.
std::vector<double> weighted_least_squares(const Dataset& data, const std::vector<double>& w);

}  // namespace hetrob
