#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hetrob/estimators.hpp"
#include "hetrob/profile.hpp"

namespace hetrob {

/// Clean-data family of a scenario.
struct DistributionSpec {
  enum class Kind { kPointMass, kBoundedTwoPoint, kGaussian, kRegression };
  Kind kind = Kind::kPointMass;

  std::vector<double> mean{0.0};  ///< point mass value / Gaussian mean
  double radius = 1.0;            ///< two-point: r e1 (2 Ber(p) - 1)
  double success = 0.5;
  std::vector<double> beta;                 ///< regression coefficients
  std::vector<std::vector<double>> sigma;   ///< covariate covariance
  double noise_sd = 1.0;

  std::size_t dim() const;
};

/// Corruption strategy. All shipped strategies draw the outlier independently of the
/// clean sample; the channel interface would admit adaptive strategies but the
/// constructions here are the independent ones.
struct AdversarySpec {
  enum class Kind { kNone, kFixedOutlier, kOutlierDistribution, kBoundedLecam, kGaussianMax };
  Kind kind = Kind::kNone;

  std::vector<double> value{1.0};  ///< fixed outlier observation (or covariate)
  double response = 0.0;           ///< fixed outlier response (regression)
  DistributionSpec outlier;        ///< outlier-distribution strategy

  double delta = 0.1;   ///< bounded-lecam / gaussian-max parameter
  double radius = 1.0;  ///< bounded-lecam support radius
  int hypothesis = 1;   ///< bounded-lecam hypothesis (+1 / -1)
  std::vector<int> tau; ///< gaussian-max hypothesis, length sqrt(d)
};

struct ProfileSource {
  enum class Kind { kExplicit, kPowerLaw };
  Kind kind = Kind::kPowerLaw;
  std::vector<double> lambdas;
  double q = 1.0;
  std::size_t n = 0;

  CorruptionProfile realize(std::uint64_t seed) const;
};

/// Generative description of one experiment: clean family, adversary, ground truth.
struct Scenario {
  DistributionSpec clean;
  AdversarySpec adversary;
  std::vector<double> truth;
  ProfileSource profile_source;

  void validate() const;
};

/// n i.i.d. rates with cdf F(t) = 1 - (1-t)^q, via inverse transform.
CorruptionProfile sample_profile_powerlaw(std::size_t n, double q, std::uint64_t seed);

/// Runs the contamination channel: clean draws, independent Bernoulli(lambda_i) flags,
/// flagged samples replaced by the adversary's draw. Profile rates are consumed in the
/// caller's original order.
Dataset contaminate(const Scenario& scenario, const CorruptionProfile& profile,
                    std::uint64_t seed);

/// Le Cam two-point adversary for the bounded construction: for lambda >= 2d/(1+2d)
/// draws r(2 Ber(gamma) - 1) with gamma = 1/2 - h d + h d/lambda; below the threshold the
/// sample is left clean (draws the hypothesis distribution).
double bounded_lecam_outlier(double lambda, double delta, double r, int hypothesis,
                             std::mt19937_64& rng);

/// Normalizer T = (2 Phi(delta))^sqrt(d) of the max-density construction.
double gaussian_max_normalizer(double delta, std::size_t d);

/// Feasibility threshold 1 - 1/T (tighter than the relaxation 1 - e^{-delta sqrt(d)}).
double gaussian_max_feasible_lambda(double delta, std::size_t d);

/// Max-density adversary draw for Gaussian mean estimation: with probability
/// beta = (T-1)(1-lambda)/lambda from (max_{tau' != tau} P - P(tau))_+ / (T-1), else from
/// max P / T, so the marginal of the corrupted sample is max_{tau'} P(tau') / T.
/// d must be a perfect square; tau has length sqrt(d).
std::vector<double> gaussian_max_outlier(double lambda, double delta, std::size_t d,
                                         const std::vector<int>& tau, std::mt19937_64& rng);

/// cdf of the univariate max density phi(|x| - delta) / (2 Phi(delta)); test oracle helper.
double gaussian_max_cdf_1d(double x, double delta);

std::string to_string(DistributionSpec::Kind k);
std::string to_string(AdversarySpec::Kind k);

}  // namespace hetrob
