#ifndef VPMM_ERRORS_HPP
#define VPMM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vpmm {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A matrix left GL+(d): det <= floor where positivity is required.
struct DeterminantNotPositive : Error {
  explicit DeterminantNotPositive(const std::string& msg) : Error(msg) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

// Attempt to use the numeric value of an infinite energy.
struct InfiniteEnergyState : Error {
  explicit InfiniteEnergyState(const std::string& msg) : Error(msg) {}
};

struct InnerSolverDiverged : Error {
  explicit InnerSolverDiverged(const std::string& msg) : Error(msg) {}
};

struct StepRejected : Error {
  explicit StepRejected(const std::string& msg) : Error(msg) {}
};

struct TimeOutOfRange : Error {
  explicit TimeOutOfRange(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg) {}
};

struct SchemaMismatch : Error {
  explicit SchemaMismatch(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace vpmm

#endif
