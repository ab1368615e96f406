#pragma once

#include <cstddef>
#include <vector>

namespace hetrob {

/// Per-sample corruption probabilities, stored sorted ascending together with the
/// permutation back to the caller's ordering.
class CorruptionProfile {
public:
  /// `inflation >= 1` multiplies every rate (clamped at 1) before use, for callers
  /// that only know the rates up to a constant factor.
  explicit CorruptionProfile(std::vector<double> lambdas, double inflation = 1.0);

  std::size_t size() const { return sorted_.size(); }
  bool empty() const { return sorted_.empty(); }

  /// Rates in ascending order.
  const std::vector<double>& sorted() const { return sorted_; }
  double sorted_at(std::size_t i) const { return sorted_[i]; }

  /// Rate of the i-th sample in the caller's original ordering.
  double original_at(std::size_t input_index) const { return sorted_[rank_[input_index]]; }

  /// Maps sorted index -> original input index.
  const std::vector<std::size_t>& original_order() const { return order_; }
  /// Maps original input index -> sorted index.
  const std::vector<std::size_t>& rank() const { return rank_; }

  /// N(t) = |{i : lambda_i <= t}|. t < 0 gives 0, t >= 1 gives n.
  std::size_t count_at_most(double t) const;
  /// n(t) = |{i : lambda_i < t}|.
  std::size_t count_strictly_below(double t) const;

private:
  std::vector<double> sorted_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> rank_;
};

/// Value of the rate functional f(lambda, k) = min_t k/N(t) + t^2 together with its minimizer.
struct RateValue {
  double value = 0.0;
  double argmin_threshold = 0.0;
  std::size_t included_count = 0;
};

/// Exact minimization over the candidate set of distinct rate values. N(t) is a step
/// function jumping only at rates present in the profile and t^2 is increasing, so the
/// minimum over [0,1] is attained at one of those values; ties go to the smallest t.
RateValue rate_functional(const CorruptionProfile& profile, double k);

/// Maps the lower-bound parameter delta to a corruption threshold. The bounded
/// construction uses t = 2*delta with constant 12; the Gaussian construction uses
/// t = 1 - exp(-delta*sqrt(d)) with constant 64.
struct ThresholdMap {
  enum class Kind { kBounded, kGaussian };
  Kind kind = Kind::kBounded;
  double sqrt_d = 1.0;
  double constant = 12.0;

  double to_threshold(double delta) const;
  double to_delta(double threshold) const;

  static ThresholdMap bounded();
  static ThresholdMap gaussian(std::size_t dim);
};

/// Crossing point of h(x) = N(map(x)) - 1/(C x^2) over (0, 1/4], certifying that the
/// Le Cam lower bound matches the threshold upper bound.
struct DeltaStarCertificate {
  double delta_star = 0.25;
  std::size_t n_below = 0;  ///< n(map(delta_star)), counted on the mapped rates
  std::size_t N_below = 0;  ///< N(map(delta_star)), counted on the mapped rates
  bool degenerate = false;  ///< h(1/4) < 0: extreme corruption, no crossing in range
};

DeltaStarCertificate delta_star(const CorruptionProfile& profile,
                                const ThresholdMap& map = ThresholdMap::bounded());

/// Tolerance-free check of the certificate inequalities
///   N(map(d*)) >= 1/(C d*^2)  and  n(map(d*)) <= 1/(C d*^2),
/// evaluated through the monotone transform d* >= 1/sqrt(C N) and d* <= 1/sqrt(C n)
/// so that equality cases are decided without a tolerance parameter.
bool certificate_holds(const CorruptionProfile& profile, const ThresholdMap& map,
                       const DeltaStarCertificate& cert);

/// Le Cam two-point bound r^2 d^2 (1 - sqrt(6 d^2 n(2d))). May be negative; callers
/// clamp at zero for reporting.
double lecam_lower_bound(const CorruptionProfile& profile, double r, double delta);

}  // namespace hetrob
