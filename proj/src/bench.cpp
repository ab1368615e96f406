#include "hetrob/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hetrob/errors.hpp"
#include "hetrob/numeric.hpp"

namespace hetrob {

std::string EstimatorSpec::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kOptimalLinear:
      os << "optimal-linear(c=" << c << ")";
      break;
    case Kind::kThreshold:
      os << "threshold(" << (t ? std::to_string(*t) : std::string("auto")) << ")";
      break;
    case Kind::kTukey:
      os << "tukey("
         << (weighting == Weighting::kUniform ? "uniform"
             : weighting == Weighting::kOptimal ? "optimal" : "threshold")
         << ")";
      break;
    case Kind::kRegressionDepth:
      os << "regression-depth("
         << (weighting == Weighting::kUniform ? "uniform"
             : weighting == Weighting::kOptimal ? "optimal" : "threshold")
         << ")";
      break;
    case Kind::kBaselineMean:
      os << "mean";
      break;
    case Kind::kBaselineMedian:
      os << "median";
      break;
    case Kind::kBaselineOls:
      os << "ols";
      break;
  }
  return os.str();
}

std::string MetricSpec::name() const {
  switch (kind) {
    case Kind::kMse:
      return "mse";
    case Kind::kQuantile: {
      std::ostringstream os;
      os << "quantile(" << p << ")";
      return os.str();
    }
    case Kind::kBias:
      return "bias";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  scenario.validate();
  if (trials < 1) throw InputError("config: trials must be >= 1");
  if (estimators.empty()) throw InputError("config: at least one estimator required");
  for (const auto& m : metrics)
    if (m.kind == MetricSpec::Kind::kQuantile && !(m.p > 0.0 && m.p < 1.0))
      throw InputError("config: quantile p must lie in (0,1)");
  const bool regression = scenario.clean.kind == DistributionSpec::Kind::kRegression;
  for (const auto& e : estimators) {
    const bool reg_est = e.kind == EstimatorSpec::Kind::kRegressionDepth ||
                         e.kind == EstimatorSpec::Kind::kBaselineOls;
    const bool mean_est = e.kind == EstimatorSpec::Kind::kOptimalLinear ||
                          e.kind == EstimatorSpec::Kind::kTukey ||
                          e.kind == EstimatorSpec::Kind::kBaselineMean ||
                          e.kind == EstimatorSpec::Kind::kBaselineMedian;
    if (regression && mean_est)
      throw InputError("config: estimator " + e.name() + " requires a mean-mode scenario");
    if (!regression && reg_est)
      throw InputError("config: estimator " + e.name() + " requires a regression scenario");
  }
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double idx = std::ceil(p * static_cast<double>(values.size())) - 1.0;
  const std::size_t i =
      static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(values.size() - 1)));
  return values[i];
}

namespace {

std::size_t auto_rate_k(const Scenario& scenario) {
  // bounded families use f(lambda, 1); Gaussian mean estimation and regression use
  // f(lambda, d)
  switch (scenario.clean.kind) {
    case DistributionSpec::Kind::kGaussian:
    case DistributionSpec::Kind::kRegression:
      return scenario.clean.dim();
    default:
      return 1;
  }
}

WeightVector resolve_weighting(const CorruptionProfile& profile, const Scenario& scenario,
                               EstimatorSpec::Weighting weighting, double c,
                               std::optional<double> t) {
  switch (weighting) {
    case EstimatorSpec::Weighting::kUniform: {
      std::vector<double> w(profile.size(), 1.0 / static_cast<double>(profile.size()));
      return WeightVector(std::move(w), profile);
    }
    case EstimatorSpec::Weighting::kOptimal:
      return solve_optimal_weights(profile, c);
    case EstimatorSpec::Weighting::kThreshold: {
      const double tt =
          t ? *t
            : rate_functional(profile, static_cast<double>(auto_rate_k(scenario))).argmin_threshold;
      return threshold_weights(profile, tt);
    }
  }
  throw std::logic_error("unreachable");
}

struct PreparedEstimator {
  EstimatorSpec spec;
  std::string name;
  WeightVector weights;  // empty for plain baselines
  bool uses_weights = false;
  enum class ThresholdBase { kMean, kTukey, kRegression };
  ThresholdBase base = ThresholdBase::kMean;
};

std::vector<PreparedEstimator> prepare(const ExperimentConfig& config,
                                       const CorruptionProfile& profile) {
  std::vector<PreparedEstimator> out;
  for (const auto& e : config.estimators) {
    PreparedEstimator p;
    p.spec = e;
    p.name = e.name();
    switch (e.kind) {
      case EstimatorSpec::Kind::kOptimalLinear:
        p.weights = solve_optimal_weights(profile, e.c);
        p.uses_weights = true;
        break;
      case EstimatorSpec::Kind::kThreshold:
        p.weights = resolve_weighting(profile, config.scenario,
                                      EstimatorSpec::Weighting::kThreshold, e.c, e.t);
        p.uses_weights = true;
        switch (config.scenario.clean.kind) {
          case DistributionSpec::Kind::kGaussian:
            p.base = PreparedEstimator::ThresholdBase::kTukey;
            break;
          case DistributionSpec::Kind::kRegression:
            p.base = PreparedEstimator::ThresholdBase::kRegression;
            break;
          default:
            p.base = PreparedEstimator::ThresholdBase::kMean;
            break;
        }
        break;
      case EstimatorSpec::Kind::kTukey:
      case EstimatorSpec::Kind::kRegressionDepth:
        p.weights = resolve_weighting(profile, config.scenario, e.weighting, e.c, e.t);
        p.uses_weights = true;
        break;
      default:
        break;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<double> apply_estimator(const PreparedEstimator& est, const Dataset& data,
                                    const SearchBudget& search) {
  switch (est.spec.kind) {
    case EstimatorSpec::Kind::kOptimalLinear:
      return weighted_mean(data, est.weights).estimate;
    case EstimatorSpec::Kind::kThreshold:
      switch (est.base) {
        case PreparedEstimator::ThresholdBase::kMean:
          return weighted_mean(data, est.weights).estimate;
        case PreparedEstimator::ThresholdBase::kTukey:
          return weighted_tukey_median(data, est.weights, search).estimate;
        case PreparedEstimator::ThresholdBase::kRegression:
          return weighted_regression_coefficient(data, est.weights, search).estimate;
      }
      break;
    case EstimatorSpec::Kind::kTukey:
      return weighted_tukey_median(data, est.weights, search).estimate;
    case EstimatorSpec::Kind::kRegressionDepth:
      return weighted_regression_coefficient(data, est.weights, search).estimate;
    case EstimatorSpec::Kind::kBaselineMean:
      return baselines(data).at("mean").estimate;
    case EstimatorSpec::Kind::kBaselineMedian:
      return baselines(data).at("median").estimate;
    case EstimatorSpec::Kind::kBaselineOls: {
      auto b = baselines(data).at("ols");
      if (b.failed) throw EstimationError(b.error);
      return b.estimate;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

std::vector<TrialErrors> run_trials(const ExperimentConfig& config,
                                    const CorruptionProfile& profile, double /*q_label*/) {
  const auto prepared = prepare(config, profile);
  const bool regression = config.scenario.clean.kind == DistributionSpec::Kind::kRegression;
  const auto& truth = config.scenario.truth;

  // error norm: ||.||_Sigma^2 for regression (Sigma from config or the scenario), squared
  // l2 otherwise
  std::vector<std::vector<double>> sigma;
  if (regression) {
    if (config.sigma_norm) {
      sigma = *config.sigma_norm;
    } else if (!config.scenario.clean.sigma.empty()) {
      sigma = config.scenario.clean.sigma;
    }
  }

  std::vector<TrialErrors> errors(prepared.size());
  for (std::size_t e = 0; e < prepared.size(); ++e) {
    errors[e].estimator = prepared[e].name;
    errors[e].squared_errors.resize(config.trials,
                                    std::numeric_limits<double>::quiet_NaN());
    errors[e].deviations.resize(config.trials);
  }

  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    const std::uint64_t trial_seed = mix_seed(config.root_seed, trial);
    const Dataset data = contaminate(config.scenario, profile, trial_seed);
    SearchBudget search = config.search;
    search.seed = mix_seed(trial_seed, 0xD1CE);

    for (std::size_t e = 0; e < prepared.size(); ++e) {
      try {
        const auto est = apply_estimator(prepared[e], data, search);
        std::vector<double> dev(est.size());
        for (std::size_t j = 0; j < est.size(); ++j) dev[j] = est[j] - truth[j];
        double sq;
        if (!sigma.empty()) {
          // x^T Sigma x
          KahanSum s;
          for (std::size_t r = 0; r < dev.size(); ++r)
            for (std::size_t c = 0; c < dev.size(); ++c) s.add(dev[r] * sigma[r][c] * dev[c]);
          sq = s.value();
        } else {
          sq = squared_norm(dev);
        }
        errors[e].squared_errors[trial] = sq;
        errors[e].deviations[trial] = std::move(dev);
      } catch (const std::exception&) {
        ++errors[e].failures;  // NaN row already in place; the sweep continues
      }
    }
  }
  return errors;
}

namespace {

struct Aggregate {
  double value;
  double se;
};

Aggregate aggregate_metric(const MetricSpec& metric, const TrialErrors& errors) {
  std::vector<double> clean;
  clean.reserve(errors.squared_errors.size());
  for (double v : errors.squared_errors)
    if (!std::isnan(v)) clean.push_back(v);
  if (clean.empty()) return {std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::quiet_NaN()};

  const double m = static_cast<double>(clean.size());
  switch (metric.kind) {
    case MetricSpec::Kind::kMse: {
      const double mean = compensated_sum(clean) / m;
      KahanSum var;
      for (double v : clean) var.add((v - mean) * (v - mean));
      const double sd = clean.size() > 1 ? std::sqrt(var.value() / (m - 1.0)) : 0.0;
      return {mean, sd / std::sqrt(m)};
    }
    case MetricSpec::Kind::kBias: {
      // ||mean(estimate - truth)||, batched standard error
      std::vector<std::vector<double>> devs;
      for (const auto& d : errors.deviations)
        if (!d.empty()) devs.push_back(d);
      if (devs.empty()) return {std::numeric_limits<double>::quiet_NaN(),
                                std::numeric_limits<double>::quiet_NaN()};
      const std::size_t dim = devs.front().size();
      const auto norm_of_mean = [dim](const std::vector<std::vector<double>>& chunk) {
        KahanSum total;
        for (std::size_t j = 0; j < dim; ++j) {
          KahanSum coord;
          for (const auto& d : chunk) coord.add(d[j]);
          const double mj = coord.value() / static_cast<double>(chunk.size());
          total.add(mj * mj);
        }
        return std::sqrt(total.value());
      };
      const double bias = norm_of_mean(devs);
      const std::size_t batches = std::min<std::size_t>(10, devs.size());
      const std::size_t per = devs.size() / batches;
      double se = 0.0;
      if (per >= 2 && batches >= 2) {
        std::vector<double> bb;
        for (std::size_t b = 0; b < batches; ++b)
          bb.push_back(norm_of_mean({devs.begin() + b * per, devs.begin() + (b + 1) * per}));
        const double bm = compensated_sum(bb) / static_cast<double>(bb.size());
        KahanSum var;
        for (double v : bb) var.add((v - bm) * (v - bm));
        se = std::sqrt(var.value() / static_cast<double>(bb.size() - 1)) /
             std::sqrt(static_cast<double>(bb.size()));
      }
      return {bias, se};
    }
    case MetricSpec::Kind::kQuantile: {
      const double q = empirical_quantile(clean, metric.p);
      // batch standard error
      const std::size_t batches = std::min<std::size_t>(10, clean.size());
      std::vector<double> bq;
      const std::size_t per = clean.size() / batches;
      if (per >= 2) {
        for (std::size_t b = 0; b < batches; ++b) {
          std::vector<double> chunk(clean.begin() + b * per, clean.begin() + (b + 1) * per);
          bq.push_back(empirical_quantile(std::move(chunk), metric.p));
        }
        const double bm = compensated_sum(bq) / static_cast<double>(bq.size());
        KahanSum var;
        for (double v : bq) var.add((v - bm) * (v - bm));
        const double sd = bq.size() > 1
                              ? std::sqrt(var.value() / static_cast<double>(bq.size() - 1))
                              : 0.0;
        return {q, sd / std::sqrt(static_cast<double>(bq.size()))};
      }
      return {q, 0.0};
    }
  }
  return {0.0, 0.0};
}

}  // namespace

TrialReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (!config.q_grid.empty()) return sweep_q(config, config.q_grid);

  const std::uint64_t profile_seed = mix_seed(config.root_seed ^ 0x50524f46ULL, 0);
  const CorruptionProfile profile = config.scenario.profile_source.realize(profile_seed);
  const double q_label = config.scenario.profile_source.kind == ProfileSource::Kind::kPowerLaw
                             ? config.scenario.profile_source.q
                             : 0.0;

  const auto errors = run_trials(config, profile, q_label);

  TrialReport report;
  report.root_seed = config.root_seed;
  report.config_hash = config_hash(config);
  for (const auto& est : errors) {
    for (const auto& metric : config.metrics) {
      const auto agg = aggregate_metric(metric, est);
      ReportRow row;
      row.q = q_label;
      row.estimator = est.estimator;
      row.metric = metric.name();
      row.value = agg.value;
      row.stderr_value = agg.se;
      row.n = profile.size();
      row.trials = config.trials;
      row.seed = config.root_seed;
      row.failures = est.failures;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

TrialReport sweep_q(const ExperimentConfig& config, const std::vector<double>& q_grid) {
  if (q_grid.empty()) throw InputError("sweep_q: empty grid");
  TrialReport report;
  report.root_seed = config.root_seed;
  report.config_hash = config_hash(config);
  for (std::size_t qi = 0; qi < q_grid.size(); ++qi) {
    ExperimentConfig point = config;
    point.q_grid.clear();
    point.scenario.profile_source.kind = ProfileSource::Kind::kPowerLaw;
    point.scenario.profile_source.q = q_grid[qi];
    point.root_seed = mix_seed(config.root_seed, 0xABCD0000ULL + qi);
    const TrialReport sub = run_experiment(point);
    for (auto row : sub.rows) {
      row.q = q_grid[qi];
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

std::vector<OverlayRow> rate_overlay(const CorruptionProfile& profile, double k, double r) {
  std::vector<OverlayRow> rows;
  const RateValue fk = rate_functional(profile, k);
  rows.push_back({"f", fk.argmin_threshold, fk.value});
  const RateValue f1 = rate_functional(profile, 1.0);
  rows.push_back({"r2_f1", f1.argmin_threshold, r * r * f1.value});

  const auto cert = delta_star(profile);
  rows.push_back({"delta_star", cert.delta_star, cert.degenerate ? -1.0 : cert.delta_star});

  double max_lb = 0.0;
  const int grid = 100;
  for (int i = 0; i <= grid; ++i) {
    const double delta = 0.25 * static_cast<double>(i) / grid;
    const double lb = std::max(lecam_lower_bound(profile, r, delta), 0.0);
    rows.push_back({"lecam_lb", delta, lb});
    max_lb = std::max(max_lb, lb);
  }
  rows.push_back({"lecam_lb_max", 0.0, max_lb});
  return rows;
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  std::ostringstream os;
  os << to_string(config.scenario.clean.kind) << '|' << to_string(config.scenario.adversary.kind)
     << '|' << config.trials << '|' << config.root_seed << '|'
     << config.scenario.profile_source.n << '|' << config.scenario.profile_source.q;
  for (const auto& e : config.estimators) os << '|' << e.name();
  for (const auto& m : config.metrics) os << '|' << m.name();
  for (double q : config.q_grid) os << '|' << q;
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace hetrob
