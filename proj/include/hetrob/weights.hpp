#pragma once

#include <cstddef>
#include <vector>

#include "hetrob/profile.hpp"

namespace hetrob {

/// A point on the probability simplex, aligned to a profile's sorted order.
class WeightVector {
public:
  WeightVector() = default;
  WeightVector(std::vector<double> sorted_weights, const CorruptionProfile& profile);

  std::size_t size() const { return sorted_w_.size(); }
  /// Weights aligned to the profile's ascending-rate order.
  const std::vector<double>& sorted() const { return sorted_w_; }
  double sorted_at(std::size_t i) const { return sorted_w_[i]; }
  /// Weight of sample i in the caller's original ordering.
  double original_at(std::size_t input_index) const { return sorted_w_[rank_[input_index]]; }
  std::vector<double> in_original_order() const;

  double sum() const;
  double squared_norm() const;
  /// Effective sample size 1 / ||w||^2.
  double effective_sample_size() const;
  std::size_t support_size() const;

private:
  std::vector<double> sorted_w_;
  std::vector<std::size_t> rank_;  // input index -> sorted index
};

/// ||w||^2 + c (w^T lambda)^2 for w aligned to the profile's sorted order.
double weight_objective(const CorruptionProfile& profile, const std::vector<double>& sorted_w,
                        double c);
double weight_objective(const CorruptionProfile& profile, const WeightVector& w, double c);

/// Default penalty coefficient from the bounded-distribution error bound.
inline constexpr double kDefaultPenalty = 3.0;

/// Exact minimizer of ||w||^2 + c (w^T lambda)^2 over the simplex via the KKT
/// active-prefix structure: advance k while lambda_{k+1} stays below
/// (1 + c ||l_1^k||^2) / (c ||l_1^k||_1), then w_i = beta - alpha lambda_i on the prefix.
/// The fixed point w_i = (beta - c (w^T lambda) lambda_i)_+ is asserted before returning.
WeightVector solve_optimal_weights(const CorruptionProfile& profile, double c = kDefaultPenalty);

/// Largest per-coordinate residual of the KKT fixed point; exposed for verification.
double kkt_residual(const CorruptionProfile& profile, const WeightVector& w, double c);

/// Plain projected-gradient descent on the same objective with Euclidean projection onto
/// the simplex. Test/verification oracle only; deterministic given its inputs.
/// `step <= 0` selects 1/L with L = 2 + 2 c ||lambda||^2.
WeightVector oracle_solve(const CorruptionProfile& profile, double c, std::size_t iters,
                          double step = 0.0);

/// Nesterov-accelerated projected gradient with objective-increase restarts; converges to
/// tight tolerances on ill-conditioned instances where plain PGD is too slow. Independent
/// of the KKT route above.
WeightVector oracle_solve_accelerated(const CorruptionProfile& profile, double c,
                                      std::size_t max_iters, double tol);

/// Uniform weights on {i : lambda_i <= t}; throws EstimationError when the selection is empty.
WeightVector threshold_weights(const CorruptionProfile& profile, double t);

/// Euclidean projection onto the probability simplex (sort-based).
std::vector<double> project_to_simplex(std::vector<double> v);

}  // namespace hetrob
