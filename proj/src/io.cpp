#include "hetrob/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "hetrob/errors.hpp"

namespace hetrob::io {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), is_space));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), is_space).base(), s.end());
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& token, const std::string& origin, std::size_t line) {
  const std::string t = trim(token);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size())
    throw InputError(origin + ": malformed number '" + token + "' at line " +
                     std::to_string(line));
  return v;
}

void check_lambda(double v, const std::string& origin, std::size_t line) {
  if (!(v >= 0.0 && v <= 1.0))
    throw InputError(origin + ": lambda out of range at line " + std::to_string(line));
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path);
  out << contents;
  if (!out) throw InputError("write failed: " + path);
}

CorruptionProfile parse_profile_csv(std::istream& in, const std::string& origin) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> lambdas;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!header_seen) {
      const auto fields = split_csv_line(line);
      if (fields.size() != 1 || fields[0] != "lambda")
        throw InputError(origin + ": expected header 'lambda' at line " +
                         std::to_string(lineno));
      header_seen = true;
      continue;
    }
    const double v = parse_number(line, origin, lineno);
    check_lambda(v, origin, lineno);
    lambdas.push_back(v);
  }
  if (lambdas.empty()) throw InputError(origin + ": no rates found");
  return CorruptionProfile(std::move(lambdas));
}

CorruptionProfile load_profile(const std::string& path) {
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    json j;
    try {
      j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
      throw InputError(path + ": " + e.what());
    }
    if (!j.is_array()) throw InputError(path + ": expected a JSON array of rates");
    std::vector<double> lambdas;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number())
        throw InputError(path + ": /" + std::to_string(i) + " is not a number");
      const double v = j[i].get<double>();
      if (!(v >= 0.0 && v <= 1.0))
        throw InputError(path + ": /" + std::to_string(i) + " lambda out of range");
      lambdas.push_back(v);
    }
    if (lambdas.empty()) throw InputError(path + ": no rates found");
    return CorruptionProfile(std::move(lambdas));
  }
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  return parse_profile_csv(in, path);
}

Dataset parse_dataset_csv(std::istream& in, const std::string& origin) {
  std::string line;
  std::size_t lineno = 0;
  Dataset data;
  std::size_t columns = 0;
  bool header_seen = false;
  std::vector<double> lambdas;

  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (!header_seen) {
      header_seen = true;
      columns = fields.size();
      if (columns < 2 || fields.back() != "lambda")
        throw InputError(origin + ": last header column must be 'lambda' (line " +
                         std::to_string(lineno) + ")");
      const bool mean_mode = fields[0].size() >= 1 && fields[0][0] == 'x';
      const bool reg_mode = fields[0].size() >= 1 && fields[0][0] == 'w';
      if (!mean_mode && !reg_mode)
        throw InputError(origin + ": header must start with x1.. (mean) or w1.. (regression)");
      if (reg_mode) {
        if (columns < 3 || fields[columns - 2] != "y")
          throw InputError(origin + ": regression header needs a 'y' column before 'lambda'");
        data.mode = Dataset::Mode::kRegression;
        data.dim = columns - 2;
      } else {
        data.mode = Dataset::Mode::kMean;
        data.dim = columns - 1;
      }
      for (std::size_t i = 0; i < data.dim; ++i) {
        const std::string want = (mean_mode ? "x" : "w") + std::to_string(i + 1);
        if (fields[i] != want)
          throw InputError(origin + ": expected header column '" + want + "', found '" +
                           fields[i] + "'");
      }
      continue;
    }
    if (fields.size() != columns)
      throw InputError(origin + ": expected " + std::to_string(columns) +
                       " fields, found " + std::to_string(fields.size()) + " at line " +
                       std::to_string(lineno));
    std::vector<double> x(data.dim);
    for (std::size_t i = 0; i < data.dim; ++i) x[i] = parse_number(fields[i], origin, lineno);
    data.points.push_back(std::move(x));
    if (data.mode == Dataset::Mode::kRegression)
      data.responses.push_back(parse_number(fields[columns - 2], origin, lineno));
    const double l = parse_number(fields[columns - 1], origin, lineno);
    check_lambda(l, origin, lineno);
    lambdas.push_back(l);
  }
  if (data.points.empty()) throw InputError(origin + ": no data rows");
  data.profile = CorruptionProfile(std::move(lambdas));
  data.validate();
  return data;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  return parse_dataset_csv(in, path);
}

std::string dataset_to_csv(const Dataset& data) {
  std::ostringstream out;
  const bool regression = data.mode == Dataset::Mode::kRegression;
  const char prefix = regression ? 'w' : 'x';
  for (std::size_t i = 0; i < data.dim; ++i) out << prefix << (i + 1) << ',';
  if (regression) out << "y,";
  out << "lambda\n";
  for (std::size_t r = 0; r < data.points.size(); ++r) {
    for (double v : data.points[r]) out << format_double(v) << ',';
    if (regression) out << format_double(data.responses[r]) << ',';
    out << format_double(data.profile.original_at(r)) << '\n';
  }
  return out.str();
}

void save_dataset(const std::string& path, const Dataset& data) {
  write_file(path, dataset_to_csv(data));
}

std::string weights_to_csv(const CorruptionProfile& profile, const WeightVector& w) {
  std::ostringstream out;
  out << "index,lambda,weight\n";
  for (std::size_t i = 0; i < profile.size(); ++i)
    out << i << ',' << format_double(profile.original_at(i)) << ','
        << format_double(w.original_at(i)) << '\n';
  return out.str();
}

std::string report_to_csv(const TrialReport& report) {
  std::ostringstream out;
  out << "q,estimator,metric,value,stderr,n,trials,seed\n";
  for (const auto& row : report.rows)
    out << format_double(row.q) << ',' << row.estimator << ',' << row.metric << ','
        << format_double(row.value) << ',' << format_double(row.stderr_value) << ','
        << row.n << ',' << row.trials << ',' << row.seed << '\n';
  return out.str();
}

std::string report_to_json(const TrialReport& report) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["root_seed"] = report.root_seed;
  j["config_hash"] = report.config_hash;
  j["rows"] = json::array();
  for (const auto& row : report.rows) {
    json r;
    r["q"] = row.q;
    r["estimator"] = row.estimator;
    r["metric"] = row.metric;
    r["value"] = row.value;
    r["stderr"] = row.stderr_value;
    r["n"] = row.n;
    r["trials"] = row.trials;
    r["seed"] = row.seed;
    r["failures"] = row.failures;
    j["rows"].push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
  throw InputError("schema violation at " + (path.empty() ? "/" : path) + ": " + message);
}

const json& require(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) schema_error(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) schema_error(path + "/" + key, "missing required field");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  return j.get<double>();
}

std::uint64_t as_uint(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) schema_error(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_number(j[i], path + "/" + std::to_string(i)));
  return out;
}

std::vector<std::vector<double>> as_matrix(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of rows");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_vector(j[i], path + "/" + std::to_string(i)));
  return out;
}

DistributionSpec::Kind parse_distribution_kind(const std::string& s, const std::string& path) {
  if (s == "point_mass") return DistributionSpec::Kind::kPointMass;
  if (s == "bounded_two_point") return DistributionSpec::Kind::kBoundedTwoPoint;
  if (s == "gaussian") return DistributionSpec::Kind::kGaussian;
  if (s == "regression") return DistributionSpec::Kind::kRegression;
  schema_error(path, "unknown distribution kind '" + s +
                         "' (valid: point_mass, bounded_two_point, gaussian, regression)");
}

AdversarySpec::Kind parse_adversary_kind(const std::string& s, const std::string& path) {
  if (s == "none") return AdversarySpec::Kind::kNone;
  if (s == "fixed_outlier") return AdversarySpec::Kind::kFixedOutlier;
  if (s == "outlier_distribution") return AdversarySpec::Kind::kOutlierDistribution;
  if (s == "bounded_lecam") return AdversarySpec::Kind::kBoundedLecam;
  if (s == "gaussian_max") return AdversarySpec::Kind::kGaussianMax;
  schema_error(path, "unknown adversary kind '" + s +
                         "' (valid: none, fixed_outlier, outlier_distribution, "
                         "bounded_lecam, gaussian_max)");
}

DistributionSpec distribution_from(const json& j, const std::string& path) {
  DistributionSpec spec;
  spec.kind = parse_distribution_kind(as_string(require(j, path, "kind"), path + "/kind"),
                                      path + "/kind");
  switch (spec.kind) {
    case DistributionSpec::Kind::kPointMass:
      spec.mean = as_vector(require(j, path, "mean"), path + "/mean");
      break;
    case DistributionSpec::Kind::kBoundedTwoPoint:
      spec.radius = as_number(require(j, path, "radius"), path + "/radius");
      spec.success = as_number(require(j, path, "success"), path + "/success");
      if (!(spec.success >= 0.0 && spec.success <= 1.0))
        schema_error(path + "/success", "must lie in [0,1]");
      break;
    case DistributionSpec::Kind::kGaussian:
      spec.mean = as_vector(require(j, path, "mean"), path + "/mean");
      break;
    case DistributionSpec::Kind::kRegression:
      spec.beta = as_vector(require(j, path, "beta"), path + "/beta");
      if (j.contains("sigma")) spec.sigma = as_matrix(j["sigma"], path + "/sigma");
      if (j.contains("noise_sd"))
        spec.noise_sd = as_number(j["noise_sd"], path + "/noise_sd");
      break;
  }
  return spec;
}

json distribution_to(const DistributionSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  switch (spec.kind) {
    case DistributionSpec::Kind::kPointMass:
    case DistributionSpec::Kind::kGaussian:
      j["mean"] = spec.mean;
      break;
    case DistributionSpec::Kind::kBoundedTwoPoint:
      j["radius"] = spec.radius;
      j["success"] = spec.success;
      break;
    case DistributionSpec::Kind::kRegression:
      j["beta"] = spec.beta;
      if (!spec.sigma.empty()) j["sigma"] = spec.sigma;
      if (spec.noise_sd != 1.0) j["noise_sd"] = spec.noise_sd;
      break;
  }
  return j;
}

AdversarySpec adversary_from(const json& j, const std::string& path) {
  AdversarySpec spec;
  spec.kind = parse_adversary_kind(as_string(require(j, path, "kind"), path + "/kind"),
                                   path + "/kind");
  switch (spec.kind) {
    case AdversarySpec::Kind::kNone:
      break;
    case AdversarySpec::Kind::kFixedOutlier:
      spec.value = as_vector(require(j, path, "value"), path + "/value");
      if (j.contains("response")) spec.response = as_number(j["response"], path + "/response");
      break;
    case AdversarySpec::Kind::kOutlierDistribution:
      spec.outlier = distribution_from(require(j, path, "outlier"), path + "/outlier");
      break;
    case AdversarySpec::Kind::kBoundedLecam:
      spec.delta = as_number(require(j, path, "delta"), path + "/delta");
      spec.radius = as_number(require(j, path, "radius"), path + "/radius");
      if (j.contains("hypothesis")) {
        const double h = as_number(j["hypothesis"], path + "/hypothesis");
        if (h != 1.0 && h != -1.0) schema_error(path + "/hypothesis", "must be +1 or -1");
        spec.hypothesis = static_cast<int>(h);
      }
      break;
    case AdversarySpec::Kind::kGaussianMax:
      spec.delta = as_number(require(j, path, "delta"), path + "/delta");
      if (j.contains("tau")) {
        const auto tau = as_vector(j["tau"], path + "/tau");
        spec.tau.clear();
        for (std::size_t i = 0; i < tau.size(); ++i) {
          if (tau[i] != 1.0 && tau[i] != -1.0)
            schema_error(path + "/tau/" + std::to_string(i), "entries must be +1 or -1");
          spec.tau.push_back(static_cast<int>(tau[i]));
        }
      }
      break;
  }
  return spec;
}

json adversary_to(const AdversarySpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  switch (spec.kind) {
    case AdversarySpec::Kind::kNone:
      break;
    case AdversarySpec::Kind::kFixedOutlier:
      j["value"] = spec.value;
      if (spec.response != 0.0) j["response"] = spec.response;
      break;
    case AdversarySpec::Kind::kOutlierDistribution:
      j["outlier"] = distribution_to(spec.outlier);
      break;
    case AdversarySpec::Kind::kBoundedLecam:
      j["delta"] = spec.delta;
      j["radius"] = spec.radius;
      if (spec.hypothesis != 1) j["hypothesis"] = spec.hypothesis;
      break;
    case AdversarySpec::Kind::kGaussianMax:
      j["delta"] = spec.delta;
      if (!spec.tau.empty()) j["tau"] = spec.tau;
      break;
  }
  return j;
}

ProfileSource profile_source_from(const json& j, const std::string& path) {
  ProfileSource src;
  const std::string kind = as_string(require(j, path, "kind"), path + "/kind");
  if (kind == "power_law") {
    src.kind = ProfileSource::Kind::kPowerLaw;
    src.q = as_number(require(j, path, "q"), path + "/q");
    src.n = static_cast<std::size_t>(as_uint(require(j, path, "n"), path + "/n"));
    if (src.q <= 0.0) schema_error(path + "/q", "must be positive");
    if (src.n == 0) schema_error(path + "/n", "must be positive");
  } else if (kind == "explicit") {
    src.kind = ProfileSource::Kind::kExplicit;
    src.lambdas = as_vector(require(j, path, "lambdas"), path + "/lambdas");
    for (std::size_t i = 0; i < src.lambdas.size(); ++i)
      if (!(src.lambdas[i] >= 0.0 && src.lambdas[i] <= 1.0))
        schema_error(path + "/lambdas/" + std::to_string(i), "lambda out of range");
    if (src.lambdas.empty()) schema_error(path + "/lambdas", "must be non-empty");
    src.n = src.lambdas.size();
  } else {
    schema_error(path + "/kind", "unknown profile kind '" + kind +
                                     "' (valid: power_law, explicit)");
  }
  return src;
}

json profile_source_to(const ProfileSource& src) {
  json j;
  if (src.kind == ProfileSource::Kind::kPowerLaw) {
    j["kind"] = "power_law";
    j["q"] = src.q;
    j["n"] = src.n;
  } else {
    j["kind"] = "explicit";
    j["lambdas"] = src.lambdas;
  }
  return j;
}

Scenario scenario_from(const json& j, const std::string& path) {
  Scenario s;
  s.clean = distribution_from(require(j, path, "clean"), path + "/clean");
  if (j.contains("adversary")) s.adversary = adversary_from(j["adversary"], path + "/adversary");
  s.truth = as_vector(require(j, path, "truth"), path + "/truth");
  s.profile_source = profile_source_from(require(j, path, "profile"), path + "/profile");
  return s;
}

json scenario_to(const Scenario& s) {
  json j;
  j["clean"] = distribution_to(s.clean);
  j["adversary"] = adversary_to(s.adversary);
  j["truth"] = s.truth;
  j["profile"] = profile_source_to(s.profile_source);
  return j;
}

EstimatorSpec estimator_from(const json& j, const std::string& path) {
  EstimatorSpec e;
  const std::string kind = as_string(require(j, path, "kind"), path + "/kind");
  if (kind == "optimal_linear") {
    e.kind = EstimatorSpec::Kind::kOptimalLinear;
    if (j.contains("c")) e.c = as_number(j["c"], path + "/c");
  } else if (kind == "threshold") {
    e.kind = EstimatorSpec::Kind::kThreshold;
    if (j.contains("t")) e.t = as_number(j["t"], path + "/t");
  } else if (kind == "tukey" || kind == "regression_depth") {
    e.kind = kind == "tukey" ? EstimatorSpec::Kind::kTukey
                             : EstimatorSpec::Kind::kRegressionDepth;
    if (j.contains("weighting")) {
      const std::string w = as_string(j["weighting"], path + "/weighting");
      if (w == "uniform") e.weighting = EstimatorSpec::Weighting::kUniform;
      else if (w == "optimal") e.weighting = EstimatorSpec::Weighting::kOptimal;
      else if (w == "threshold") e.weighting = EstimatorSpec::Weighting::kThreshold;
      else schema_error(path + "/weighting",
                        "unknown weighting '" + w + "' (valid: uniform, optimal, threshold)");
    }
    if (j.contains("c")) e.c = as_number(j["c"], path + "/c");
    if (j.contains("t")) e.t = as_number(j["t"], path + "/t");
  } else if (kind == "mean") {
    e.kind = EstimatorSpec::Kind::kBaselineMean;
  } else if (kind == "median") {
    e.kind = EstimatorSpec::Kind::kBaselineMedian;
  } else if (kind == "ols") {
    e.kind = EstimatorSpec::Kind::kBaselineOls;
  } else {
    schema_error(path + "/kind",
                 "unknown estimator '" + kind +
                     "' (valid: optimal_linear, threshold, tukey, regression_depth, "
                     "mean, median, ols)");
  }
  if (e.kind == EstimatorSpec::Kind::kOptimalLinear && e.c <= 0.0)
    schema_error(path + "/c", "penalty must be positive");
  return e;
}

json estimator_to(const EstimatorSpec& e) {
  json j;
  switch (e.kind) {
    case EstimatorSpec::Kind::kOptimalLinear:
      j["kind"] = "optimal_linear";
      if (e.c != kDefaultPenalty) j["c"] = e.c;
      break;
    case EstimatorSpec::Kind::kThreshold:
      j["kind"] = "threshold";
      if (e.t) j["t"] = *e.t;
      break;
    case EstimatorSpec::Kind::kTukey:
    case EstimatorSpec::Kind::kRegressionDepth:
      j["kind"] = e.kind == EstimatorSpec::Kind::kTukey ? "tukey" : "regression_depth";
      j["weighting"] = e.weighting == EstimatorSpec::Weighting::kUniform ? "uniform"
                       : e.weighting == EstimatorSpec::Weighting::kOptimal ? "optimal"
                                                                           : "threshold";
      if (e.c != kDefaultPenalty) j["c"] = e.c;
      if (e.t) j["t"] = *e.t;
      break;
    case EstimatorSpec::Kind::kBaselineMean:
      j["kind"] = "mean";
      break;
    case EstimatorSpec::Kind::kBaselineMedian:
      j["kind"] = "median";
      break;
    case EstimatorSpec::Kind::kBaselineOls:
      j["kind"] = "ols";
      break;
  }
  return j;
}

MetricSpec metric_from(const json& j, const std::string& path) {
  MetricSpec m;
  const std::string kind = as_string(require(j, path, "kind"), path + "/kind");
  if (kind == "mse") {
    m.kind = MetricSpec::Kind::kMse;
  } else if (kind == "quantile") {
    m.kind = MetricSpec::Kind::kQuantile;
    if (j.contains("p")) m.p = as_number(j["p"], path + "/p");
    if (!(m.p > 0.0 && m.p < 1.0)) schema_error(path + "/p", "must lie in (0,1)");
  } else if (kind == "bias") {
    m.kind = MetricSpec::Kind::kBias;
  } else {
    schema_error(path + "/kind",
                 "unknown metric '" + kind + "' (valid: mse, quantile, bias)");
  }
  return m;
}

json metric_to(const MetricSpec& m) {
  json j;
  switch (m.kind) {
    case MetricSpec::Kind::kMse:
      j["kind"] = "mse";
      break;
    case MetricSpec::Kind::kQuantile:
      j["kind"] = "quantile";
      j["p"] = m.p;
      break;
    case MetricSpec::Kind::kBias:
      j["kind"] = "bias";
      break;
  }
  return j;
}

json parse_root(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  return scenario_from(parse_root(text), "");
}

std::string scenario_to_json(const Scenario& scenario) {
  return scenario_to(scenario).dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  const json j = parse_root(text);
  if (j.contains("schema_version") &&
      as_uint(j["schema_version"], "/schema_version") != kSchemaVersion)
    schema_error("/schema_version", "unsupported version");
  ExperimentConfig config;
  config.scenario = scenario_from(require(j, "", "scenario"), "/scenario");
  config.trials =
      static_cast<std::size_t>(as_uint(require(j, "", "trials"), "/trials"));
  const json& ests = require(j, "", "estimators");
  if (!ests.is_array() || ests.empty())
    schema_error("/estimators", "expected a non-empty array");
  for (std::size_t i = 0; i < ests.size(); ++i)
    config.estimators.push_back(
        estimator_from(ests[i], "/estimators/" + std::to_string(i)));
  if (j.contains("metrics")) {
    if (!j["metrics"].is_array()) schema_error("/metrics", "expected an array");
    config.metrics.clear();
    for (std::size_t i = 0; i < j["metrics"].size(); ++i)
      config.metrics.push_back(metric_from(j["metrics"][i], "/metrics/" + std::to_string(i)));
  }
  if (j.contains("root_seed")) config.root_seed = as_uint(j["root_seed"], "/root_seed");
  if (j.contains("sigma_norm"))
    config.sigma_norm = as_matrix(j["sigma_norm"], "/sigma_norm");
  if (j.contains("q_grid")) config.q_grid = as_vector(j["q_grid"], "/q_grid");
  if (j.contains("search")) {
    const json& s = j["search"];
    if (!s.is_object()) schema_error("/search", "expected an object");
    if (s.contains("directions"))
      config.search.directions =
          static_cast<std::size_t>(as_uint(s["directions"], "/search/directions"));
    if (s.contains("starts"))
      config.search.starts = static_cast<std::size_t>(as_uint(s["starts"], "/search/starts"));
    if (s.contains("rounds"))
      config.search.rounds = static_cast<std::size_t>(as_uint(s["rounds"], "/search/rounds"));
  }
  config.validate();
  return config;
}

std::string config_to_json(const ExperimentConfig& config) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["scenario"] = scenario_to(config.scenario);
  j["trials"] = config.trials;
  j["estimators"] = json::array();
  for (const auto& e : config.estimators) j["estimators"].push_back(estimator_to(e));
  j["metrics"] = json::array();
  for (const auto& m : config.metrics) j["metrics"].push_back(metric_to(m));
  j["root_seed"] = config.root_seed;
  if (config.sigma_norm) j["sigma_norm"] = *config.sigma_norm;
  if (!config.q_grid.empty()) j["q_grid"] = config.q_grid;
  j["search"] = {{"directions", config.search.directions},
                 {"starts", config.search.starts},
                 {"rounds", config.search.rounds}};
  return j.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
  try {
    return config_from_json(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace hetrob::io
