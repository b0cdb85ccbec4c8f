#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace netmimo {

/// Invalid layout, scheme or experiment configuration. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A bin descriptor whose locations are not equidistant to the root cluster.
class SymmetryError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Quantity requested outside the set where it is defined.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failures (exit code 2).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Zero-forcing order too large for the available antennas (J*S >= C*M).
class InfeasibleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Stacked zero-forcing matrix lost column rank.
class SingularError : public NumericalError {
 public:
  SingularError(const std::string& what, std::uint64_t seed, std::uint64_t trial)
      : NumericalError(what + " (seed " + std::to_string(seed) + ", trial " +
                       std::to_string(trial) + ")"),
        seed_(seed),
        trial_(trial) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t trial() const { return trial_; }

 private:
  std::uint64_t seed_;
  std::uint64_t trial_;
};

}  // namespace netmimo
