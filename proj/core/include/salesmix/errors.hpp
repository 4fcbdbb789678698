#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace salesmix {

// Invalid system configuration (bad field values, inconsistent unit list).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; the message carries a "row R, column C" locus
// where one is known.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A clearing or allocation problem with no feasible solution.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what, double shortfall = 0.0,
                           std::optional<std::size_t> scenario = std::nullopt)
      : std::runtime_error(what), shortfall(shortfall), scenario(scenario) {}

  double shortfall = 0.0;                  // unserved quantity, MWh
  std::optional<std::size_t> scenario;     // offending scenario index, if known
};

// Filesystem failure (unreadable input, unwritable output).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace salesmix
