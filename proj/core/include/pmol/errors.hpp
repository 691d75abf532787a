#pragma once

#include <stdexcept>
#include <string>

namespace pmol {

/// Invalid inputs or configuration. The CLI maps this to exit code 1.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Failures that arise while computing: diverged integrations, fits that do
/// not converge, peaks or knees that are not present in the data. The CLI
/// maps this to exit code 2.
class compute_error : public std::runtime_error {
 public:
  explicit compute_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pmol
