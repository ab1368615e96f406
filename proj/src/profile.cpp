#include "hetrob/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hetrob/errors.hpp"

namespace hetrob {

CorruptionProfile::CorruptionProfile(std::vector<double> lambdas, double inflation) {
  if (inflation < 1.0) throw InputError("CorruptionProfile: inflation factor must be >= 1");
  for (double& l : lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) throw InputError("CorruptionProfile: rate outside [0,1]");
    l = std::min(1.0, l * inflation);
  }
  const std::size_t n = lambdas.size();
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return lambdas[a] < lambdas[b]; });
  sorted_.resize(n);
  rank_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sorted_[i] = lambdas[order_[i]];
    rank_[order_[i]] = i;
  }
}

std::size_t CorruptionProfile::count_at_most(double t) const {
  return static_cast<std::size_t>(
      std::upper_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin());
}

std::size_t CorruptionProfile::count_strictly_below(double t) const {
  return static_cast<std::size_t>(
      std::lower_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin());
}

RateValue rate_functional(const CorruptionProfile& profile, double k) {
  if (profile.empty()) throw InputError("rate_functional: empty profile");
  if (!(k > 0.0)) throw InputError("rate_functional: k must be positive");

  const auto& l = profile.sorted();
  RateValue best;
  best.value = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < l.size()) {
    const double t = l[i];
    // advance to the last sample sharing this rate; N(t) = that index + 1
    std::size_t j = i;
    while (j + 1 < l.size() && l[j + 1] == t) ++j;
    const std::size_t count = j + 1;
    const double value = k / static_cast<double>(count) + t * t;
    if (value < best.value) {  // strict: ties keep the smaller threshold
      best.value = value;
      best.argmin_threshold = t;
      best.included_count = count;
    }
    i = j + 1;
  }
  return best;
}

double ThresholdMap::to_threshold(double delta) const {
  switch (kind) {
    case Kind::kBounded:
      return 2.0 * delta;
    case Kind::kGaussian:
      return 1.0 - std::exp(-delta * sqrt_d);
  }
  return 0.0;
}

double ThresholdMap::to_delta(double threshold) const {
  switch (kind) {
    case Kind::kBounded:
      return threshold / 2.0;
    case Kind::kGaussian:
      if (threshold >= 1.0) return std::numeric_limits<double>::infinity();
      return -std::log1p(-threshold) / sqrt_d;
  }
  return 0.0;
}

ThresholdMap ThresholdMap::bounded() { return ThresholdMap{Kind::kBounded, 1.0, 12.0}; }

ThresholdMap ThresholdMap::gaussian(std::size_t dim) {
  return ThresholdMap{Kind::kGaussian, std::sqrt(static_cast<double>(dim)), 64.0};
}

namespace {

// Critical delta of a piece with constant count m: the unique root of m = 1/(C x^2).
double piece_root(double constant, std::size_t count) {
  return 1.0 / std::sqrt(constant * static_cast<double>(count));
}

bool fp_certificate_holds(const ThresholdMap& map, double ds, std::size_t N_below,
                          std::size_t n_below) {
  if (!(ds > 0.0) || ds > 0.25) return false;
  if (N_below == 0) return false;
  if (ds < piece_root(map.constant, N_below)) return false;   // need N >= 1/(C ds^2)
  if (n_below > 0 && ds > piece_root(map.constant, n_below)) return false;  // n <= 1/(C ds^2)
  return true;
}

}  // namespace

namespace {

// Per-sample rates mapped into delta space, sorted (to_delta is monotone). All
// counting for the certificate happens on these values, so solver and checker face
// identical floating-point comparisons and the breakpoint crossings land exactly on
// stored doubles instead of requiring an exact exp/log round trip.
std::vector<double> mapped_deltas(const CorruptionProfile& profile, const ThresholdMap& map) {
  std::vector<double> out;
  out.reserve(profile.size());
  for (double l : profile.sorted()) out.push_back(map.to_delta(l));
  return out;
}

std::size_t count_at_most(const std::vector<double>& sorted, double x) {
  return static_cast<std::size_t>(
      std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

std::size_t count_below(const std::vector<double>& sorted, double x) {
  return static_cast<std::size_t>(
      std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

}  // namespace

DeltaStarCertificate delta_star(const CorruptionProfile& profile, const ThresholdMap& map) {
  if (profile.empty()) throw InputError("delta_star: empty profile");

  const auto deltas = mapped_deltas(profile, map);
  const double h_quarter =
      static_cast<double>(count_at_most(deltas, 0.25)) - 16.0 / map.constant;
  if (h_quarter < 0.0) {
    DeltaStarCertificate cert;
    cert.degenerate = true;
    cert.delta_star = 0.25;
    cert.N_below = count_at_most(deltas, 0.25);
    cert.n_below = count_below(deltas, 0.25);
    return cert;
  }

  // Pieces of constant N over delta: piece j starts at the j-th distinct mapped rate.
  // h is nondecreasing, so the first qualifying delta is either the interior root of a
  // piece or the piece's left breakpoint.
  std::vector<double> distinct;
  distinct.reserve(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i)
    if (i == 0 || deltas[i] != deltas[i - 1]) distinct.push_back(deltas[i]);

  for (std::size_t j = 0; j < distinct.size(); ++j) {
    const double lo = distinct[j];
    if (lo > 0.25) break;
    const double hi = (j + 1 < distinct.size()) ? distinct[j + 1]
                                                : std::numeric_limits<double>::infinity();
    const std::size_t count = count_at_most(deltas, distinct[j]);
    double candidate = std::max(lo, piece_root(map.constant, count));
    if (candidate > std::min(hi, 0.25)) continue;
    if (candidate <= 0.0) candidate = std::min(hi, 0.25);  // all rates map to delta 0

    // Nudge within the piece until both floating-point inequalities hold.
    for (int step = 0; step < 8 && candidate <= std::min(hi, 0.25); ++step) {
      DeltaStarCertificate cert;
      cert.delta_star = candidate;
      cert.N_below = count_at_most(deltas, candidate);
      cert.n_below = count_below(deltas, candidate);
      if (fp_certificate_holds(map, candidate, cert.N_below, cert.n_below)) return cert;
      candidate = std::nextafter(candidate, 1.0);
    }
  }
  // h(1/4) >= 0 guarantees a crossing; fall back to the endpoint.
  DeltaStarCertificate cert;
  cert.delta_star = 0.25;
  cert.N_below = count_at_most(deltas, 0.25);
  cert.n_below = count_below(deltas, 0.25);
  return cert;
}

bool certificate_holds(const CorruptionProfile& profile, const ThresholdMap& map,
                       const DeltaStarCertificate& cert) {
  const auto deltas = mapped_deltas(profile, map);
  if (cert.degenerate) return count_at_most(deltas, 0.25) < 16.0 / map.constant;
  const std::size_t N = count_at_most(deltas, cert.delta_star);
  const std::size_t n = count_below(deltas, cert.delta_star);
  if (N != cert.N_below || n != cert.n_below) return false;
  return fp_certificate_holds(map, cert.delta_star, N, n);
}

double lecam_lower_bound(const CorruptionProfile& profile, double r, double delta) {
  if (!(r > 0.0)) throw InputError("lecam_lower_bound: r must be positive");
  if (!(delta >= 0.0 && delta <= 0.25))
    throw InputError("lecam_lower_bound: delta outside [0, 1/4]");
  const double n_2d = static_cast<double>(profile.count_strictly_below(2.0 * delta));
  return r * r * delta * delta * (1.0 - std::sqrt(6.0 * delta * delta * n_2d));
}

}  // namespace hetrob
