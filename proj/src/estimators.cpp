#include "hetrob/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "hetrob/errors.hpp"
#include "hetrob/numeric.hpp"

namespace hetrob {

void Dataset::validate() const {
  if (points.size() != profile.size())
    throw InputError("Dataset: point count does not match profile length");
  for (const auto& p : points)
    if (p.size() != dim) throw InputError("Dataset: inconsistent dimension");
  if (mode == Mode::kRegression && responses.size() != points.size())
    throw InputError("Dataset: response count does not match covariates");
}

DepthQuery DepthQuery::make(std::size_t dim, std::size_t count, std::uint64_t seed) {
  DepthQuery q;
  if (dim == 1) {
    q.directions = {{1.0}, {-1.0}};
    q.exact = true;
    return q;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  q.directions.reserve(count);
  while (q.directions.size() < count) {
    std::vector<double> v(dim);
    for (double& x : v) x = gauss(rng);
    const double norm = std::sqrt(squared_norm(v));
    if (norm < 1e-12) continue;
    for (double& x : v) x /= norm;
    q.directions.push_back(std::move(v));
  }
  return q;
}

EstimateResult weighted_mean(const Dataset& data, const WeightVector& w) {
  data.validate();
  if (data.mode != Dataset::Mode::kMean)
    throw InputError("weighted_mean: dataset not in mean mode");
  if (w.size() != data.size()) throw InputError("weighted_mean: length mismatch");

  std::vector<KahanSum> acc(data.dim);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double wi = w.original_at(i);
    if (wi == 0.0) continue;
    for (std::size_t j = 0; j < data.dim; ++j) acc[j].add(wi * data.points[i][j]);
  }
  EstimateResult res;
  res.method = "weighted-mean";
  res.estimate.resize(data.dim);
  for (std::size_t j = 0; j < data.dim; ++j) res.estimate[j] = acc[j].value();
  res.weights_used = w.in_original_order();
  return res;
}

namespace {

double directional_mass(const Dataset& data, const WeightVector& w,
                        const std::vector<double>& eta, const std::vector<double>& v) {
  KahanSum s;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double proj = 0.0;
    for (std::size_t j = 0; j < data.dim; ++j) proj += v[j] * (data.points[i][j] - eta[j]);
    if (proj >= 0.0) s.add(w.original_at(i));
  }
  return s.value();
}

double regression_directional_mass(const Dataset& data, const WeightVector& w,
                                   const std::vector<double>& eta,
                                   const std::vector<double>& v) {
  KahanSum s;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double fit = 0.0;
    double proj = 0.0;
    for (std::size_t j = 0; j < data.dim; ++j) {
      fit += eta[j] * data.points[i][j];
      proj += v[j] * data.points[i][j];
    }
    const double resid = data.responses[i] - fit;
    if (resid * proj >= 0.0) s.add(w.original_at(i));
  }
  return s.value();
}

}  // namespace

double weighted_tukey_depth(const Dataset& data, const WeightVector& w,
                            const std::vector<double>& eta, const DepthQuery& q) {
  data.validate();
  if (data.mode != Dataset::Mode::kMean)
    throw InputError("weighted_tukey_depth: dataset not in mean mode");

  double depth = std::numeric_limits<double>::infinity();
  for (const auto& v : q.directions) depth = std::min(depth, directional_mass(data, w, eta, v));
  if (data.dim >= 2) {
    // sharpen with the data-difference directions Z_i - eta
    std::vector<double> v(data.dim);
    for (std::size_t i = 0; i < data.size(); ++i) {
      double norm2 = 0.0;
      for (std::size_t j = 0; j < data.dim; ++j) {
        v[j] = data.points[i][j] - eta[j];
        norm2 += v[j] * v[j];
      }
      if (norm2 < 1e-24) continue;
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& x : v) x *= inv;
      depth = std::min(depth, directional_mass(data, w, eta, v));
      for (double& x : v) x = -x;
      depth = std::min(depth, directional_mass(data, w, eta, v));
    }
  }
  return std::isfinite(depth) ? depth : 0.0;
}

double weighted_regression_depth(const Dataset& data, const WeightVector& w,
                                 const std::vector<double>& eta, const DepthQuery& q) {
  data.validate();
  if (data.mode != Dataset::Mode::kRegression)
    throw InputError("weighted_regression_depth: dataset not in regression mode");

  double depth = std::numeric_limits<double>::infinity();
  for (const auto& v : q.directions)
    depth = std::min(depth, regression_directional_mass(data, w, eta, v));
  if (data.dim >= 2) {
    std::vector<double> v(data.dim);
    for (std::size_t i = 0; i < data.size(); ++i) {
      double norm2 = squared_norm(data.points[i]);
      if (norm2 < 1e-24) continue;
      const double inv = 1.0 / std::sqrt(norm2);
      for (std::size_t j = 0; j < data.dim; ++j) v[j] = data.points[i][j] * inv;
      depth = std::min(depth, regression_directional_mass(data, w, eta, v));
      for (double& x : v) x = -x;
      depth = std::min(depth, regression_directional_mass(data, w, eta, v));
    }
  }
  return std::isfinite(depth) ? depth : 0.0;
}

namespace {

/// Exact weighted median of (value, weight) pairs: smallest value whose cumulative weight
/// reaches 1/2; midpoint of the straddling samples when it hits 1/2 exactly.
double weighted_median_1d(std::vector<std::pair<double, double>> vw) {
  std::sort(vw.begin(), vw.end());
  const double total = [&] {
    KahanSum s;
    for (auto& [v, w] : vw) s.add(w);
    return s.value();
  }();
  if (total <= 0.0) throw InputError("weighted median: all weights zero");
  const double half = total / 2.0;
  KahanSum cum;
  for (std::size_t i = 0; i < vw.size(); ++i) {
    cum.add(vw[i].second);
    if (cum.value() > half) return vw[i].first;
    if (cum.value() == half) {
      for (std::size_t j = i + 1; j < vw.size(); ++j)
        if (vw[j].second > 0.0) return 0.5 * (vw[i].first + vw[j].first);
      return vw[i].first;
    }
  }
  return vw.back().first;
}

struct DepthObjective {
  const Dataset& data;
  const WeightVector& w;
  const DepthQuery& dirs;
  bool regression;

  double operator()(const std::vector<double>& eta) const {
    return regression ? weighted_regression_depth(data, w, eta, dirs)
                      : weighted_tukey_depth(data, w, eta, dirs);
  }
};

/// Shrinking-step axis pattern search; deterministic given its inputs.
std::pair<std::vector<double>, double> pattern_search(const DepthObjective& f,
                                                      std::vector<double> eta,
                                                      std::vector<double> step,
                                                      std::size_t rounds) {
  double best = f(eta);
  const std::size_t d = eta.size();
  for (std::size_t r = 0; r < rounds; ++r) {
    bool improved = false;
    for (std::size_t j = 0; j < d; ++j) {
      for (double sign : {1.0, -1.0}) {
        std::vector<double> cand = eta;
        cand[j] += sign * step[j];
        const double depth = f(cand);
        if (depth > best) {
          best = depth;
          eta = std::move(cand);
          improved = true;
        }
      }
    }
    if (!improved)
      for (double& s : step) s *= 0.5;
  }
  return {std::move(eta), best};
}

std::vector<std::size_t> top_weight_indices(const WeightVector& w, std::size_t count) {
  std::vector<std::size_t> idx(w.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return w.original_at(a) > w.original_at(b);
  });
  idx.resize(std::min(count, idx.size()));
  return idx;
}

}  // namespace

EstimateResult weighted_tukey_median(const Dataset& data, const WeightVector& w,
                                     const SearchBudget& search) {
  data.validate();
  if (data.mode != Dataset::Mode::kMean)
    throw InputError("weighted_tukey_median: dataset not in mean mode");
  if (w.size() != data.size()) throw InputError("weighted_tukey_median: length mismatch");
  if (w.sum() <= 0.0) throw InputError("weighted_tukey_median: all weights zero");

  EstimateResult res;
  res.method = "tukey-median";
  res.weights_used = w.in_original_order();

  if (data.dim == 1) {
    std::vector<std::pair<double, double>> vw(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
      vw[i] = {data.points[i][0], w.original_at(i)};
    res.estimate = {weighted_median_1d(std::move(vw))};
    res.achieved_depth =
        weighted_tukey_depth(data, w, res.estimate, DepthQuery::make(1, 0, 0));
    return res;
  }

  const DepthQuery dirs = DepthQuery::make(data.dim, search.directions, search.seed);
  DepthObjective f{data, w, dirs, false};

  // data-relative starts: coordinate-wise weighted median + heaviest samples
  std::vector<std::vector<double>> starts;
  std::vector<double> coord_median(data.dim);
  for (std::size_t j = 0; j < data.dim; ++j) {
    std::vector<std::pair<double, double>> vw(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) vw[i] = {data.points[i][j], w.original_at(i)};
    coord_median[j] = weighted_median_1d(std::move(vw));
  }
  starts.push_back(coord_median);
  for (std::size_t i : top_weight_indices(w, search.starts > 0 ? search.starts - 1 : 0))
    starts.push_back(data.points[i]);

  // step scale from the data's bounding box
  std::vector<double> step(data.dim, 0.0);
  for (std::size_t j = 0; j < data.dim; ++j) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : data.points) {
      lo = std::min(lo, p[j]);
      hi = std::max(hi, p[j]);
    }
    step[j] = std::max((hi - lo) / 8.0, 1e-12);
  }

  std::vector<double> best_eta = starts.front();
  double best_depth = -1.0;
  for (const auto& s : starts) {
    auto [eta, depth] = pattern_search(f, s, step, search.rounds);
    if (depth > best_depth) {
      best_depth = depth;
      best_eta = std::move(eta);
    }
  }
  res.estimate = std::move(best_eta);
  res.achieved_depth = best_depth;
  return res;
}

std::vector<double> weighted_least_squares(const Dataset& data, const std::vector<double>& w) {
  const std::size_t d = data.dim;
  std::vector<std::vector<double>> a(d, std::vector<double>(d + 1, 0.0));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    if (wi == 0.0) continue;
    const auto& x = data.points[i];
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) a[r][c] += wi * x[r] * x[c];
      a[r][d] += wi * x[r] * data.responses[i];
    }
  }
  // Gaussian elimination with partial pivoting
  double scale = 0.0;
  for (std::size_t r = 0; r < d; ++r) scale = std::max(scale, std::abs(a[r][r]));
  if (scale == 0.0) throw EstimationError("singular design");
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-12 * scale) throw EstimationError("singular design");
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const double factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= d; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  std::vector<double> beta(d);
  for (std::size_t r = 0; r < d; ++r) beta[r] = a[r][d] / a[r][r];
  return beta;
}

EstimateResult weighted_regression_coefficient(const Dataset& data, const WeightVector& w,
                                               const SearchBudget& search) {
  data.validate();
  if (data.mode != Dataset::Mode::kRegression)
    throw InputError("weighted_regression_coefficient: dataset not in regression mode");

  EstimateResult res;
  res.method = "regression-depth";
  res.weights_used = w.in_original_order();

  const DepthQuery dirs = DepthQuery::make(data.dim, search.directions, search.seed);
  DepthObjective f{data, w, dirs, true};

  std::vector<std::vector<double>> starts;
  starts.push_back(weighted_least_squares(data, res.weights_used));  // throws if singular
  if (data.dim == 1) {
    // exact-fit slopes through individual samples, heaviest first
    for (std::size_t i : top_weight_indices(w, search.starts)) {
      if (std::abs(data.points[i][0]) > 1e-12)
        starts.push_back({data.responses[i] / data.points[i][0]});
    }
  } else {
    for (std::size_t i : top_weight_indices(w, std::min<std::size_t>(search.starts, 4))) {
      std::vector<double> nudged = starts.front();
      const double r0 = data.responses[i] - dot(nudged, data.points[i]);
      const double n2 = squared_norm(data.points[i]);
      if (n2 > 1e-12) {
        for (std::size_t j = 0; j < data.dim; ++j) nudged[j] += r0 * data.points[i][j] / n2;
        starts.push_back(std::move(nudged));
      }
    }
  }

  std::vector<double> step(data.dim);
  double spread = 0.0;
  for (const auto& s : starts)
    for (double v : s) spread = std::max(spread, std::abs(v));
  for (double& s : step) s = std::max(spread / 4.0, 0.25);

  std::vector<double> best_eta = starts.front();
  double best_depth = -1.0;
  for (const auto& s : starts) {
    auto [eta, depth] = pattern_search(f, s, step, search.rounds);
    if (depth > best_depth) {
      best_depth = depth;
      best_eta = std::move(eta);
    }
  }
  res.estimate = std::move(best_eta);
  res.achieved_depth = best_depth;
  return res;
}

std::map<std::string, EstimateResult> baselines(const Dataset& data) {
  data.validate();
  if (data.size() == 0) throw InputError("baselines: empty dataset");
  std::map<std::string, EstimateResult> out;

  if (data.mode == Dataset::Mode::kMean) {
    EstimateResult mean;
    mean.method = "mean";
    mean.estimate.resize(data.dim);
    for (std::size_t j = 0; j < data.dim; ++j) {
      KahanSum s;
      for (const auto& p : data.points) s.add(p[j]);
      mean.estimate[j] = s.value() / static_cast<double>(data.size());
    }
    out.emplace("mean", std::move(mean));

    EstimateResult median;
    median.method = "median";
    median.estimate.resize(data.dim);
    for (std::size_t j = 0; j < data.dim; ++j) {
      std::vector<double> col(data.size());
      for (std::size_t i = 0; i < data.size(); ++i) col[i] = data.points[i][j];
      std::sort(col.begin(), col.end());
      const std::size_t n = col.size();
      median.estimate[j] = (n % 2 == 1) ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
    }
    out.emplace("median", std::move(median));
  } else {
    EstimateResult ols;
    ols.method = "ols";
    try {
      ols.estimate = weighted_least_squares(data, {});
    } catch (const EstimationError& e) {
      ols.failed = true;
      ols.error = e.what();
    }
    out.emplace("ols", std::move(ols));
  }
  return out;
}

}  // namespace hetrob
