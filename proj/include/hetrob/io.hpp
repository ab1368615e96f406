#pragma once

#include <string>
#include <vector>

#include "hetrob/bench.hpp"
#include "hetrob/estimators.hpp"
#include "hetrob/profile.hpp"
#include "hetrob/weights.hpp"

namespace hetrob::io {

/// Shortest round-trip decimal representation (std::to_chars); parsing it back is
/// bit-exact.
std::string format_double(double v);

/// Single-column CSV with header `lambda`, or a JSON array of rates; dispatched on the
/// `.json` extension. Malformed rows report their line number.
CorruptionProfile load_profile(const std::string& path);
CorruptionProfile parse_profile_csv(std::istream& in, const std::string& origin);

/// Mean mode: header x1..xd,lambda. Regression mode: w1..wd,y,lambda. The mode is read
/// off the header. Validation failures carry the offending line number.
Dataset load_dataset(const std::string& path);
Dataset parse_dataset_csv(std::istream& in, const std::string& origin);
void save_dataset(const std::string& path, const Dataset& data);
std::string dataset_to_csv(const Dataset& data);

/// Audit dump: columns index, lambda, weight, in the original sample order.
std::string weights_to_csv(const CorruptionProfile& profile, const WeightVector& w);

/// Versioned long-form report CSV: q, estimator, metric, value, stderr, n, trials, seed.
std::string report_to_csv(const TrialReport& report);
/// JSON summary alongside the CSV: schema version, provenance, rows incl. failure counts.
std::string report_to_json(const TrialReport& report);

/// Scenario / experiment configs as JSON. parse(serialize(x)) reproduces x exactly;
/// schema violations throw InputError with a JSON-pointer path.
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& scenario);
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace hetrob::io
