#include "hetrob/adversary.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hetrob/errors.hpp"
#include "hetrob/numeric.hpp"

namespace hetrob {

std::size_t DistributionSpec::dim() const {
  switch (kind) {
    case Kind::kPointMass:
    case Kind::kGaussian:
      return mean.size();
    case Kind::kBoundedTwoPoint:
      return 1;
    case Kind::kRegression:
      return beta.size();
  }
  return 0;
}

CorruptionProfile ProfileSource::realize(std::uint64_t seed) const {
  if (kind == Kind::kExplicit) return CorruptionProfile(lambdas);
  return sample_profile_powerlaw(n, q, seed);
}

void Scenario::validate() const {
  const std::size_t d = clean.dim();
  if (truth.size() != d) throw InputError("Scenario: truth dimension mismatch");
  if (adversary.kind == AdversarySpec::Kind::kBoundedLecam &&
      !(adversary.delta >= 0.0 && adversary.delta <= 0.25))
    throw InputError("Scenario: bounded-lecam requires delta in [0, 1/4]");
  if (adversary.kind == AdversarySpec::Kind::kFixedOutlier &&
      clean.kind != DistributionSpec::Kind::kRegression && adversary.value.size() != d)
    throw InputError("Scenario: fixed outlier dimension mismatch");
}

CorruptionProfile sample_profile_powerlaw(std::size_t n, double q, std::uint64_t seed) {
  if (n < 1) throw InputError("sample_profile_powerlaw: n must be >= 1");
  if (!(q > 0.0)) throw InputError("sample_profile_powerlaw: q must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> l(n);
  for (double& x : l) x = 1.0 - std::pow(1.0 - unif(rng), 1.0 / q);
  return CorruptionProfile(std::move(l));
}

namespace {

/// Cholesky factor (lower) of a symmetric positive-definite matrix.
std::vector<std::vector<double>> cholesky(const std::vector<std::vector<double>>& a) {
  const std::size_t d = a.size();
  std::vector<std::vector<double>> c(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= c[i][k] * c[j][k];
      if (i == j) {
        if (s <= 0.0) throw InputError("covariance matrix is not positive definite");
        c[i][i] = std::sqrt(s);
      } else {
        c[i][j] = s / c[j][j];
      }
    }
  }
  return c;
}

struct CleanSampler {
  const DistributionSpec& spec;
  std::vector<std::vector<double>> chol;  // regression covariance factor

  explicit CleanSampler(const DistributionSpec& s) : spec(s) {
    if (spec.kind == DistributionSpec::Kind::kRegression) {
      if (spec.sigma.empty()) {
        chol.assign(spec.dim(), std::vector<double>(spec.dim(), 0.0));
        for (std::size_t i = 0; i < spec.dim(); ++i) chol[i][i] = 1.0;
      } else {
        chol = cholesky(spec.sigma);
      }
    }
  }

  /// mean-mode observation
  std::vector<double> draw(std::mt19937_64& rng) const {
    std::normal_distribution<double> gauss(0.0, 1.0);
    switch (spec.kind) {
      case DistributionSpec::Kind::kPointMass:
        return spec.mean;
      case DistributionSpec::Kind::kBoundedTwoPoint: {
        std::bernoulli_distribution ber(spec.success);
        return {spec.radius * (ber(rng) ? 1.0 : -1.0)};
      }
      case DistributionSpec::Kind::kGaussian: {
        std::vector<double> x(spec.mean);
        for (double& v : x) v += gauss(rng);
        return x;
      }
      case DistributionSpec::Kind::kRegression:
        throw std::logic_error("CleanSampler::draw called in regression mode");
    }
    return {};
  }

  /// regression-mode covariate/response pair
  std::pair<std::vector<double>, double> draw_regression(std::mt19937_64& rng) const {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t d = spec.dim();
    std::vector<double> z(d);
    for (double& v : z) v = gauss(rng);
    std::vector<double> w(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k <= i; ++k) w[i] += chol[i][k] * z[k];
    const double y = dot(spec.beta, w) + spec.noise_sd * gauss(rng);
    return {std::move(w), y};
  }
};

}  // namespace

double bounded_lecam_outlier(double lambda, double delta, double r, int hypothesis,
                             std::mt19937_64& rng) {
  if (!(delta >= 0.0 && delta <= 0.25))
    throw InputError("bounded_lecam_outlier: delta outside [0, 1/4]");
  const double h = hypothesis >= 0 ? 1.0 : -1.0;
  const double feasible = 2.0 * delta / (1.0 + 2.0 * delta);
  double gamma;
  if (lambda >= feasible && lambda > 0.0) {
    gamma = 0.5 - h * delta + h * delta / lambda;
  } else {
    gamma = 0.5 - h * delta;  // no perturbation: draw the clean hypothesis distribution
  }
  assert(gamma >= 0.0 && gamma <= 1.0);
  std::bernoulli_distribution ber(gamma);
  return r * (ber(rng) ? 1.0 : -1.0);
}

double gaussian_max_normalizer(double delta, std::size_t d) {
  const double s = std::sqrt(static_cast<double>(d));
  return std::pow(2.0 * normal_cdf(delta), s);
}

double gaussian_max_feasible_lambda(double delta, std::size_t d) {
  return 1.0 - 1.0 / gaussian_max_normalizer(delta, d);
}

namespace {

/// One coordinate of the max density: max{phi(x-delta), phi(x+delta)} / (2 Phi(delta)),
/// i.e. phi(|x|-delta) / (2 Phi(delta)). Proposal: sign-symmetrized |N(delta,1)| with
/// density (phi(|x|-delta) + phi(|x|+delta)) / 2; envelope constant 1/Phi(delta), so the
/// acceptance ratio is phi(|x|-delta) / (phi(|x|-delta) + phi(|x|+delta)) in [1/2, 1].
double sample_max_coordinate(double delta, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (;;) {
    const double y = std::abs(delta + gauss(rng));
    const double a = normal_pdf(y - delta);
    const double b = normal_pdf(y + delta);
    if (unif(rng) * (a + b) <= a) return unif(rng) < 0.5 ? y : -y;
  }
}

/// log unnormalized density of P_delta(tau) restricted to the first sqrt(d) coordinates.
double log_density(const std::vector<double>& x, const std::vector<int>& tau, double delta) {
  double s = 0.0;
  for (std::size_t j = 0; j < tau.size(); ++j) {
    const double r = x[j] - delta * tau[j];
    s -= 0.5 * r * r;
  }
  return s;
}

/// log of max_{tau'} and max_{tau' != tau} of the unnormalized density at x.
std::pair<double, double> log_max_densities(const std::vector<double>& x,
                                            const std::vector<int>& tau, double delta) {
  double log_max = 0.0;
  bool argmax_is_tau = true;
  double cheapest_flip = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < tau.size(); ++j) {
    const double with = -0.5 * (x[j] - delta) * (x[j] - delta);
    const double against = -0.5 * (x[j] + delta) * (x[j] + delta);
    log_max += std::max(with, against);
    const double keep = tau[j] > 0 ? with : against;
    const double flip = tau[j] > 0 ? against : with;
    if (flip > keep) argmax_is_tau = false;
    cheapest_flip = std::max(cheapest_flip, flip - keep);
  }
  // If the overall argmax already differs from tau in some coordinate, the constrained
  // max equals the global one; otherwise flip the single cheapest coordinate.
  const double log_max_excl = argmax_is_tau ? log_max + cheapest_flip : log_max;
  return {log_max, log_max_excl};
}

}  // namespace

std::vector<double> gaussian_max_outlier(double lambda, double delta, std::size_t d,
                                         const std::vector<int>& tau, std::mt19937_64& rng) {
  const std::size_t s = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(d))));
  if (s * s != d) throw InputError("gaussian_max_outlier: d must be a perfect square");
  if (tau.size() != s) throw InputError("gaussian_max_outlier: tau length must be sqrt(d)");

  const double T = gaussian_max_normalizer(delta, d);
  if (lambda < gaussian_max_feasible_lambda(delta, d))
    throw InputError("infeasible corruption rate for the max-density adversary");

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const double beta = lambda > 0.0 ? (T - 1.0) * (1.0 - lambda) / lambda : 0.0;
  assert(beta >= 0.0 && beta <= 1.0 + 1e-12);
  const bool residual_branch = T > 1.0 && unif(rng) < beta;

  std::vector<double> x(d);
  for (;;) {
    // propose the first sqrt(d) coordinates from the factorized max density
    for (std::size_t j = 0; j < s; ++j) x[j] = sample_max_coordinate(delta, rng);
    if (!residual_branch) break;
    // residual density (max_{tau' != tau} P - P(tau))_+ / (T-1): accept against the
    // max-density proposal with ratio (max_excl - p_tau)_+ / max.
    const auto [log_max, log_max_excl] = log_max_densities(x, tau, delta);
    const double p_tau = std::exp(log_density(x, tau, delta) - log_max);
    const double excl = std::exp(log_max_excl - log_max);
    const double accept = std::max(excl - p_tau, 0.0);
    if (unif(rng) <= accept) break;
  }
  for (std::size_t j = s; j < d; ++j) x[j] = gauss(rng);  // remaining coordinates are clean
  return x;
}

double gaussian_max_cdf_1d(double x, double delta) {
  const double z = 2.0 * normal_cdf(delta);
  if (x <= 0.0) return normal_cdf(x + delta) / z;
  return (normal_cdf(delta) + normal_cdf(x - delta) - normal_cdf(-delta)) / z;
}

Dataset contaminate(const Scenario& scenario, const CorruptionProfile& profile,
                    std::uint64_t seed) {
  scenario.validate();
  const std::size_t d = scenario.clean.dim();
  const std::size_t n = profile.size();
  const bool regression = scenario.clean.kind == DistributionSpec::Kind::kRegression;
  if (!regression && scenario.adversary.kind == AdversarySpec::Kind::kOutlierDistribution &&
      scenario.adversary.outlier.dim() != d)
    throw InputError("contaminate: outlier distribution dimension mismatch");

  std::mt19937_64 rng(seed);
  CleanSampler clean(scenario.clean);
  CleanSampler outlier_sampler(scenario.adversary.outlier);

  Dataset data;
  data.mode = regression ? Dataset::Mode::kRegression : Dataset::Mode::kMean;
  data.dim = d;
  data.profile = profile;
  data.points.resize(n);
  data.corrupted.resize(n);
  if (regression) data.responses.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const double li = profile.original_at(i);
    std::vector<double> x;
    double y = 0.0;
    if (regression) {
      auto [w, yy] = clean.draw_regression(rng);
      x = std::move(w);
      y = yy;
    } else {
      x = clean.draw(rng);
    }
    std::bernoulli_distribution flag(li);
    const bool corrupted = flag(rng);
    data.corrupted[i] = corrupted;
    if (corrupted) {
      switch (scenario.adversary.kind) {
        case AdversarySpec::Kind::kNone:
          if (regression) {
            auto [w, yy] = clean.draw_regression(rng);
            x = std::move(w);
            y = yy;
          } else {
            x = clean.draw(rng);
          }
          break;
        case AdversarySpec::Kind::kFixedOutlier:
          x = scenario.adversary.value;
          y = scenario.adversary.response;
          break;
        case AdversarySpec::Kind::kOutlierDistribution:
          if (regression) {
            auto [w, yy] = outlier_sampler.draw_regression(rng);
            x = std::move(w);
            y = yy;
          } else {
            x = outlier_sampler.draw(rng);
          }
          break;
        case AdversarySpec::Kind::kBoundedLecam:
          x = {bounded_lecam_outlier(li, scenario.adversary.delta, scenario.adversary.radius,
                                     scenario.adversary.hypothesis, rng)};
          break;
        case AdversarySpec::Kind::kGaussianMax:
          x = gaussian_max_outlier(li, scenario.adversary.delta, d, scenario.adversary.tau,
                                   rng);
          break;
      }
    }
    data.points[i] = std::move(x);
    if (regression) data.responses[i] = y;
  }
  data.validate();
  return data;
}

std::string to_string(DistributionSpec::Kind k) {
  switch (k) {
    case DistributionSpec::Kind::kPointMass: return "point_mass";
    case DistributionSpec::Kind::kBoundedTwoPoint: return "bounded_two_point";
    case DistributionSpec::Kind::kGaussian: return "gaussian";
    case DistributionSpec::Kind::kRegression: return "regression";
  }
  return "?";
}

std::string to_string(AdversarySpec::Kind k) {
  switch (k) {
    case AdversarySpec::Kind::kNone: return "none";
    case AdversarySpec::Kind::kFixedOutlier: return "fixed_outlier";
    case AdversarySpec::Kind::kOutlierDistribution: return "outlier_distribution";
    case AdversarySpec::Kind::kBoundedLecam: return "bounded_lecam";
    case AdversarySpec::Kind::kGaussianMax: return "gaussian_max";
  }
  return "?";
}

}  // namespace hetrob
