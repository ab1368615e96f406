#include "hetrob/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hetrob/errors.hpp"
#include "hetrob/numeric.hpp"

namespace hetrob {

WeightVector::WeightVector(std::vector<double> sorted_weights, const CorruptionProfile& profile)
    : sorted_w_(std::move(sorted_weights)), rank_(profile.rank()) {
  if (sorted_w_.size() != profile.size())
    throw InputError("WeightVector: length mismatch with profile");
}

std::vector<double> WeightVector::in_original_order() const {
  std::vector<double> out(sorted_w_.size());
  for (std::size_t i = 0; i < sorted_w_.size(); ++i) out[i] = sorted_w_[rank_[i]];
  return out;
}

double WeightVector::sum() const { return compensated_sum(sorted_w_); }

double WeightVector::squared_norm() const { return hetrob::squared_norm(sorted_w_); }

double WeightVector::effective_sample_size() const { return 1.0 / squared_norm(); }

std::size_t WeightVector::support_size() const {
  std::size_t k = 0;
  for (double w : sorted_w_)
    if (w > 0.0) ++k;
  return k;
}

double weight_objective(const CorruptionProfile& profile, const std::vector<double>& sorted_w,
                        double c) {
  const double wl = dot(sorted_w, profile.sorted());
  return squared_norm(sorted_w) + c * wl * wl;
}

double weight_objective(const CorruptionProfile& profile, const WeightVector& w, double c) {
  return weight_objective(profile, w.sorted(), c);
}

WeightVector solve_optimal_weights(const CorruptionProfile& profile, double c) {
  if (profile.empty()) throw InputError("solve_optimal_weights: empty profile");
  if (c < 0.0) throw InputError("solve_optimal_weights: c must be nonnegative");

  const auto& l = profile.sorted();
  const std::size_t n = l.size();

  // Advance the active prefix. Sentinel lambda_{n+1} = +inf terminates at k = n; a zero
  // denominator (prefix of all-zero rates) counts as threshold +inf so those samples are
  // always included.
  KahanSum s1;  // ||lambda_1^k||_1
  KahanSum s2;  // ||lambda_1^k||^2
  std::size_t k = 1;
  s1.add(l[0]);
  s2.add(l[0] * l[0]);
  while (k < n) {
    const double denom = c * s1.value();
    const double rhs = denom > 0.0 ? (1.0 + c * s2.value()) / denom
                                   : std::numeric_limits<double>::infinity();
    if (l[k] < rhs) {  // strict: a tie stops the loop, the tied weight is zero either way
      s1.add(l[k]);
      s2.add(l[k] * l[k]);
      ++k;
    } else {
      break;
    }
  }

  const double one_cs2 = 1.0 + c * s2.value();
  const double beta = one_cs2 / (static_cast<double>(k) * one_cs2 - c * s1.value() * s1.value());
  const double alpha = c * s1.value() * beta / one_cs2;

  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < k; ++i) w[i] = beta - alpha * l[i];

  WeightVector result(std::move(w), profile);
  if (kkt_residual(profile, result, c) > 1e-10)
    throw std::logic_error("solve_optimal_weights: KKT residual check failed");
  return result;
}

double kkt_residual(const CorruptionProfile& profile, const WeightVector& w, double c) {
  const auto& l = profile.sorted();
  const auto& wv = w.sorted();
  const double wl = dot(wv, l);
  // Recover beta from the largest weight (smallest rate): w_1 = beta - c wl lambda_1.
  const double beta = wv[0] + c * wl * l[0];
  double worst = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    const double fixed_point = std::max(beta - c * wl * l[i], 0.0);
    worst = std::max(worst, std::abs(wv[i] - fixed_point));
  }
  return worst;
}

std::vector<double> project_to_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double tau = 0.0;
  std::size_t rho = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double candidate = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - candidate > 0.0) {
      rho = i + 1;
      tau = candidate;
    }
  }
  (void)rho;
  for (double& x : v) x = std::max(x - tau, 0.0);
  return v;
}

namespace {

void gradient(const std::vector<double>& l, const std::vector<double>& w, double c,
              std::vector<double>& g) {
  const double wl = dot(w, l);
  for (std::size_t i = 0; i < w.size(); ++i) g[i] = 2.0 * w[i] + 2.0 * c * wl * l[i];
}

}  // namespace

WeightVector oracle_solve(const CorruptionProfile& profile, double c, std::size_t iters,
                          double step) {
  if (profile.empty()) throw InputError("oracle_solve: empty profile");
  if (iters < 1) throw InputError("oracle_solve: iters must be >= 1");
  const auto& l = profile.sorted();
  const std::size_t n = l.size();
  if (step <= 0.0) step = 1.0 / (2.0 + 2.0 * c * squared_norm(l));

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> g(n);
  for (std::size_t it = 0; it < iters; ++it) {
    gradient(l, w, c, g);
    for (std::size_t i = 0; i < n; ++i) w[i] -= step * g[i];
    w = project_to_simplex(std::move(w));
  }
  return WeightVector(std::move(w), profile);
}

WeightVector oracle_solve_accelerated(const CorruptionProfile& profile, double c,
                                      std::size_t max_iters, double tol) {
  if (profile.empty()) throw InputError("oracle_solve_accelerated: empty profile");
  const auto& l = profile.sorted();
  const std::size_t n = l.size();
  const double lips = 2.0 + 2.0 * c * squared_norm(l);
  const double step = 1.0 / lips;

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> y = w;
  std::vector<double> w_prev = w;
  std::vector<double> g(n);
  double theta = 1.0;
  double f_prev = weight_objective(profile, w, c);

  for (std::size_t it = 0; it < max_iters; ++it) {
    gradient(l, y, c, g);
    w_prev.swap(w);
    w = y;
    for (std::size_t i = 0; i < n; ++i) w[i] -= step * g[i];
    w = project_to_simplex(std::move(w));

    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    const double momentum = (theta - 1.0) / theta_next;
    for (std::size_t i = 0; i < n; ++i) y[i] = w[i] + momentum * (w[i] - w_prev[i]);
    theta = theta_next;

    if ((it & 63u) == 63u) {
      const double f = weight_objective(profile, w, c);
      if (f > f_prev) {  // restart momentum on objective increase
        y = w;
        theta = 1.0;
      } else if (f_prev - f < tol * std::max(f, 1e-300)) {
        // stall check on the fixed-point residual before declaring convergence
        gradient(l, w, c, g);
        std::vector<double> z = w;
        for (std::size_t i = 0; i < n; ++i) z[i] -= step * g[i];
        z = project_to_simplex(std::move(z));
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(z[i] - w[i]));
        if (res * lips < tol * std::max(f, 1e-300)) {
          f_prev = f;
          break;
        }
      }
      f_prev = std::min(f_prev, f);
    }
  }
  return WeightVector(std::move(w), profile);
}

WeightVector threshold_weights(const CorruptionProfile& profile, double t) {
  if (profile.empty()) throw InputError("threshold_weights: empty profile");
  const std::size_t count = profile.count_at_most(t);
  if (count == 0) throw EstimationError("threshold_weights: empty selection at t=" + std::to_string(t));
  std::vector<double> w(profile.size(), 0.0);
  const double u = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) w[i] = u;
  return WeightVector(std::move(w), profile);
}

}  // namespace hetrob
