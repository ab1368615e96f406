#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetrob/adversary.hpp"
#include "hetrob/estimators.hpp"

namespace hetrob {

/// Which estimator a benchmark run applies. `threshold` resolves its base estimator from
/// the scenario: weighted mean for bounded families, Tukey median for Gaussian mean
/// estimation, regression-depth coefficient for regression.
struct EstimatorSpec {
  enum class Kind {
    kOptimalLinear,    ///< Algorithm-1 weights + weighted mean
    kThreshold,        ///< threshold weights at t (or auto t*) + mode-dependent base
    kTukey,            ///< weighted Tukey median with a chosen weighting
    kRegressionDepth,  ///< weighted regression coefficient with a chosen weighting
    kBaselineMean,
    kBaselineMedian,
    kBaselineOls,
  };
  enum class Weighting { kUniform, kOptimal, kThreshold };

  Kind kind = Kind::kBaselineMean;
  double c = kDefaultPenalty;     ///< penalty for optimal weights
  std::optional<double> t;        ///< fixed threshold; empty = auto t*
  Weighting weighting = Weighting::kUniform;  ///< for tukey / regression-depth

  std::string name() const;
};

struct MetricSpec {
  enum class Kind { kMse, kQuantile, kBias };
  Kind kind = Kind::kMse;
  double p = 0.8;  ///< quantile level

  std::string name() const;
};

struct ExperimentConfig {
  Scenario scenario;
  std::size_t trials = 1;
  std::vector<EstimatorSpec> estimators;
  std::vector<MetricSpec> metrics{MetricSpec{}};
  std::uint64_t root_seed = 0;
  std::optional<std::vector<std::vector<double>>> sigma_norm;  ///< regression error norm
  std::vector<double> q_grid;  ///< sweep grid; empty = single run at scenario's q
  SearchBudget search;

  void validate() const;
};

struct ReportRow {
  double q = 0.0;
  std::string estimator;
  std::string metric;
  double value = 0.0;
  double stderr_value = 0.0;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t failures = 0;
};

struct TrialReport {
  std::vector<ReportRow> rows;
  std::uint64_t root_seed = 0;
  std::uint64_t config_hash = 0;
};

/// Per-estimator squared errors across trials; exposed so tests can reach the raw draws.
struct TrialErrors {
  std::string estimator;
  std::vector<double> squared_errors;          ///< NaN where the estimator failed
  std::vector<std::vector<double>> deviations; ///< estimate - truth; empty where failed
  std::size_t failures = 0;
};

/// Samples the profile once (matching the experiment protocol: the profile is fixed,
/// datasets are redrawn per trial), runs all trials, and aggregates the metrics.
TrialReport run_experiment(const ExperimentConfig& config);

/// Raw per-trial squared errors of a single-q run; building block of run_experiment.
std::vector<TrialErrors> run_trials(const ExperimentConfig& config,
                                    const CorruptionProfile& profile, double q_label);

/// One run_experiment per q value; one row per (q, estimator, metric).
TrialReport sweep_q(const ExperimentConfig& config, const std::vector<double>& q_grid);

struct OverlayRow {
  std::string quantity;
  double x = 0.0;
  double value = 0.0;
};

/// Plot-ready rate curves: f(lambda,k), r^2 f(lambda,1), the Le Cam lower-bound curve
/// over delta (clamped at 0), and the delta* certificate.
std::vector<OverlayRow> rate_overlay(const CorruptionProfile& profile, double k, double r);

/// FNV-1a hash of a canonical config serialization; stored in reports for provenance.
std::uint64_t config_hash(const ExperimentConfig& config);

/// Empirical quantile (higher order statistic convention, deterministic).
double empirical_quantile(std::vector<double> values, double p);

}  // namespace hetrob
