#pragma once

#include <stdexcept>
#include <string>

namespace freqbias {

/// Malformed input data or invalid parameters. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally valid input that degenerates the analysis (flat turnover
/// profiles, zero spread in a reference table, ...). CLI exit code 1.
class DegenerateError : public std::runtime_error {
 public:
  explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace freqbias
