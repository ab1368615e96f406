#pragma once

#include <stdexcept>
#include <string>

namespace hetrob {

/// Invalid caller input: bad file contents, out-of-range parameters, schema violations.
class InputError : public std::runtime_error {
public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Estimation failed at runtime on otherwise valid input (singular design, empty selection, ...).
class EstimationError : public std::runtime_error {
public:
  explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hetrob
