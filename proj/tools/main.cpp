#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hetrob/adversary.hpp"
#include "hetrob/bench.hpp"
#include "hetrob/errors.hpp"
#include "hetrob/estimators.hpp"
#include "hetrob/io.hpp"
#include "hetrob/numeric.hpp"
#include "hetrob/profile.hpp"
#include "hetrob/weights.hpp"

namespace {

// exit codes: 0 success, 1 verification failure, 2 input error, 3 estimation error
constexpr int kOk = 0;
constexpr int kVerifyFail = 1;
constexpr int kInputError = 2;
constexpr int kEstimationError = 3;

bool g_color = true;

std::string green(const std::string& s) { return g_color ? "\033[32m" + s + "\033[0m" : s; }
std::string red(const std::string& s) { return g_color ? "\033[31m" + s + "\033[0m" : s; }

std::uint64_t resolve_seed(std::optional<std::uint64_t> seed) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) | rd();
  std::cout << "seed: " << s << "\n";
  return s;
}

std::string vector_to_string(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += hetrob::io::format_double(v[i]);
  }
  return out + "]";
}

int cmd_estimate(const std::string& data_path, const std::string& method, double c,
                 std::optional<double> t, const std::string& weighting,
                 std::optional<std::uint64_t> seed_flag, const std::string& weights_out) {
  using namespace hetrob;
  const Dataset data = io::load_dataset(data_path);
  const bool regression = data.mode == Dataset::Mode::kRegression;

  SearchBudget search;
  search.seed = resolve_seed(seed_flag);

  auto make_weights = [&](const std::string& kind) -> WeightVector {
    if (kind == "uniform") {
      std::vector<double> w(data.size(), 1.0 / static_cast<double>(data.size()));
      return WeightVector(std::move(w), data.profile);
    }
    if (kind == "optimal") return solve_optimal_weights(data.profile, c);
    // threshold: fixed t or the rate-functional minimizer with k = d
    const double tt =
        t ? *t : rate_functional(data.profile, static_cast<double>(data.dim)).argmin_threshold;
    return threshold_weights(data.profile, tt);
  };

  EstimateResult result;
  WeightVector weights;
  bool have_weights = true;
  if (method == "mean-optimal") {
    if (regression) throw InputError("method mean-optimal requires mean-mode data");
    weights = make_weights("optimal");
    result = weighted_mean(data, weights);
  } else if (method == "threshold") {
    weights = make_weights("threshold");
    result = regression ? weighted_regression_coefficient(data, weights, search)
                        : weighted_mean(data, weights);
  } else if (method == "tukey") {
    if (regression) throw InputError("method tukey requires mean-mode data");
    weights = make_weights(weighting);
    result = weighted_tukey_median(data, weights, search);
  } else if (method == "regression-depth") {
    if (!regression) throw InputError("method regression-depth requires regression data");
    weights = make_weights(weighting);
    result = weighted_regression_coefficient(data, weights, search);
  } else if (method == "mean" || method == "median" || method == "ols") {
    if ((method == "ols") != regression)
      throw InputError("method " + method + (regression ? " requires mean-mode data"
                                                        : " requires regression data"));
    result = baselines(data).at(method);
    if (result.failed) throw EstimationError(result.error);
    have_weights = false;
  } else {
    throw InputError(
        "unknown method '" + method +
        "' (valid: mean-optimal, threshold, tukey, regression-depth, mean, median, ols)");
  }

  std::cout << "method: " << result.method << "\n";
  std::cout << "estimate: " << vector_to_string(result.estimate) << "\n";
  if (have_weights) {
    std::cout << "effective sample size: "
              << io::format_double(weights.effective_sample_size()) << "\n";
    std::cout << "included samples: " << weights.support_size() << " / " << data.size()
              << "\n";
    if (!weights_out.empty())
      io::write_file(weights_out, io::weights_to_csv(data.profile, weights));
  }
  if (result.achieved_depth)
    std::cout << "achieved depth: " << io::format_double(*result.achieved_depth) << "\n";
  return kOk;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed_flag) {
  using namespace hetrob;
  const Scenario scenario = io::scenario_from_json(io::read_file(scenario_path));
  scenario.validate();
  const std::uint64_t seed = resolve_seed(seed_flag);
  const CorruptionProfile profile =
      scenario.profile_source.realize(mix_seed(seed ^ 0x50524f46ULL, 0));
  const Dataset data = contaminate(scenario, profile, mix_seed(seed, 0));
  const std::string csv = io::dataset_to_csv(data);
  if (out_path.empty() || out_path == "-") {
    std::cout << csv;
  } else {
    io::write_file(out_path, csv);
    std::size_t corrupted = 0;
    for (bool b : data.corrupted) corrupted += b ? 1 : 0;
    std::cout << "wrote " << data.size() << " samples (" << corrupted
              << " corrupted) to " << out_path << "\n";
  }
  return kOk;
}

int cmd_bench(const std::string& config_path, const std::string& out_path,
              const std::string& json_out, std::optional<std::uint64_t> seed_flag) {
  using namespace hetrob;
  ExperimentConfig config = io::load_config(config_path);
  if (seed_flag) config.root_seed = *seed_flag;
  const TrialReport report = run_experiment(config);
  io::write_file(out_path, io::report_to_csv(report));
  if (!json_out.empty()) io::write_file(json_out, io::report_to_json(report));

  for (const auto& est : config.estimators) {
    const std::string name = est.name();
    double total = 0.0;
    std::size_t rows = 0, failures = 0;
    for (const auto& row : report.rows) {
      if (row.estimator != name || row.metric.rfind("mse", 0) != 0) continue;
      total += row.value;
      failures += row.failures;
      ++rows;
    }
    std::cout << name << ": ";
    if (rows > 0)
      std::cout << "mean MSE over " << rows << " q-points "
                << io::format_double(total / static_cast<double>(rows));
    else
      std::cout << report.rows.size() << " rows";
    if (failures > 0) std::cout << " (" << failures << " failed trials)";
    std::cout << "\n";
  }
  std::cout << "wrote " << report.rows.size() << " rows to " << out_path << "\n";
  return kOk;
}

int cmd_rates(const std::string& profile_path, double k, double r,
              const std::string& out_path) {
  using namespace hetrob;
  const CorruptionProfile profile = io::load_profile(profile_path);
  const auto rows = rate_overlay(profile, k, r);
  std::string csv = "quantity,x,value\n";
  for (const auto& row : rows)
    csv += row.quantity + "," + io::format_double(row.x) + "," +
           io::format_double(row.value) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::cout << csv;
  } else {
    io::write_file(out_path, csv);
    std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
  }
  return kOk;
}

int cmd_verify(std::size_t n, std::size_t cases, std::optional<std::uint64_t> seed_flag) {
  using namespace hetrob;
  if (n < 2) throw InputError("verify: n must be >= 2");
  if (cases == 0) throw InputError("verify: cases must be >= 1");
  const std::uint64_t seed = resolve_seed(seed_flag);

  bool all_ok = true;
  const auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? green("PASS") : red("FAIL")) << "  " << name << "  " << detail
              << "\n";
    all_ok = all_ok && ok;
  };

  // KKT solver vs accelerated projected-gradient oracle on random profiles
  double max_residual = 0.0;
  double max_gap = 0.0;
  for (std::size_t i = 0; i < cases; ++i) {
    std::mt19937_64 rng(mix_seed(seed, i));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> lambdas(n);
    for (double& l : lambdas) l = unif(rng);
    const CorruptionProfile profile(lambdas);
    const double c = kDefaultPenalty;
    const WeightVector w = solve_optimal_weights(profile, c);
    max_residual = std::max(max_residual, kkt_residual(profile, w, c));
    const WeightVector o = oracle_solve_accelerated(profile, c, 200000, 1e-12);
    const double gap = weight_objective(profile, o, c) - weight_objective(profile, w, c);
    max_gap = std::max(max_gap, std::abs(gap));
  }
  report("kkt-vs-oracle", max_residual <= 1e-10 && max_gap >= -1e-9,
         "max residual " + io::format_double(max_residual) + ", max objective gap " +
             io::format_double(max_gap));

  // Le Cam mixture identity: the contaminated sign (clean branch mixed with the
  // adversary's draw at rate lambda) is Ber(1/2) under either hypothesis
  {
    const double delta = 0.1;
    const double lambda = 0.5;  // above 2d/(1+2d)
    const std::size_t m = 100000;
    double worst = 0.0;
    for (int hyp : {+1, -1}) {
      std::mt19937_64 rng(mix_seed(seed, 1000 + static_cast<std::size_t>(hyp + 1)));
      std::bernoulli_distribution corrupt(lambda);
      std::bernoulli_distribution clean(0.5 - hyp * delta);
      KahanSum sum;
      for (std::size_t i = 0; i < m; ++i) {
        if (corrupt(rng))
          sum.add(bounded_lecam_outlier(lambda, delta, 1.0, hyp, rng));
        else
          sum.add(clean(rng) ? 1.0 : -1.0);
      }
      worst = std::max(worst, std::abs(sum.value() / static_cast<double>(m)));
    }
    const double bound = 3.0 / std::sqrt(static_cast<double>(m));
    report("lecam-mixture", worst <= bound,
           "max |mean sign| " + io::format_double(worst) + " <= " +
               io::format_double(bound));
  }

  return all_ok ? kOk : kVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust estimation under heterogeneous per-sample corruption rates"};
  app.require_subcommand(1);
  app.add_flag_callback("--no-color", [] { g_color = false; },
                        "disable ANSI colors in output");

  std::string data_path, method = "mean-optimal", weighting = "uniform", weights_out;
  double c = hetrob::kDefaultPenalty;
  std::optional<double> t;
  std::optional<std::uint64_t> seed;

  auto* estimate = app.add_subcommand("estimate", "estimate from a dataset CSV");
  estimate->fallthrough();
  estimate->add_option("--data", data_path, "input dataset CSV")->required();
  estimate->add_option("--method", method,
                       "mean-optimal | threshold | tukey | regression-depth | mean | "
                       "median | ols");
  estimate->add_option("--c", c, "penalty coefficient for optimal weights");
  estimate->add_option("--t", t, "fixed corruption threshold (default: auto)");
  estimate->add_option("--weighting", weighting,
                       "uniform | optimal | threshold (depth methods)");
  estimate->add_option("--seed", seed, "search seed (default: entropy, printed)");
  estimate->add_option("--weights-out", weights_out, "write the weights CSV here");

  std::string scenario_path, out_path, json_out;
  auto* simulate = app.add_subcommand("simulate", "draw a contaminated dataset");
  simulate->fallthrough();
  simulate->add_option("--scenario", scenario_path, "scenario JSON")->required();
  simulate->add_option("--out", out_path, "output CSV (default: stdout)");
  simulate->add_option("--seed", seed, "root seed (default: entropy, printed)");

  std::string config_path, bench_out, bench_json;
  auto* bench = app.add_subcommand("bench", "run a Monte-Carlo experiment");
  bench->fallthrough();
  bench->add_option("--config", config_path, "experiment config JSON")->required();
  bench->add_option("--out", bench_out, "output CSV")->required();
  bench->add_option("--json", bench_json, "also write a JSON summary here");
  bench->add_option("--seed", seed, "override the config root seed");

  std::string profile_path, rates_out;
  double k = 1.0, r = 1.0;
  auto* rates = app.add_subcommand("rates", "emit rate-functional / lower-bound curves");
  rates->fallthrough();
  rates->add_option("--profile", profile_path, "profile CSV or JSON array")->required();
  rates->add_option("--k", k, "rate-functional numerator (1 or d)");
  rates->add_option("--r", r, "bounded-support radius");
  rates->add_option("--out", rates_out, "output CSV (default: stdout)");

  std::size_t verify_n = 64, verify_cases = 50;
  auto* verify = app.add_subcommand("verify", "run solver property suites");
  verify->fallthrough();
  verify->add_option("--n", verify_n, "profile size per case");
  verify->add_option("--cases", verify_cases, "number of random cases");
  verify->add_option("--seed", seed, "root seed (default: entropy, printed)");

  try {
    app.parse(argc, argv);
    if (*estimate)
      return cmd_estimate(data_path, method, c, t, weighting, seed, weights_out);
    if (*simulate) return cmd_simulate(scenario_path, out_path, seed);
    if (*bench) return cmd_bench(config_path, bench_out, bench_json, seed);
    if (*rates) return cmd_rates(profile_path, k, r, rates_out);
    if (*verify) return cmd_verify(verify_n, verify_cases, seed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  } catch (const hetrob::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const hetrob::EstimationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEstimationError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kEstimationError;
  }
  return kOk;
}
