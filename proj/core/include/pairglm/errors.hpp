#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pairglm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A covariate column has zero sample variance and cannot be standardized.
struct ConstantColumnError : Error {
  ConstantColumnError(char block, std::size_t column)
      : Error(std::string("constant column in block ") + block + " at index " +
              std::to_string(column)),
        block(block),
        column(column) {}
  char block;
  std::size_t column;
};

struct ShapeMismatchError : Error {
  explicit ShapeMismatchError(const std::string& what) : Error("shape mismatch: " + what) {}
};

struct NotSymmetricError : Error {
  NotSymmetricError() : Error("operation requires a symmetric problem (p1 == p2, X == Z)") {}
};

struct EmptyVectorError : Error {
  EmptyVectorError() : Error("penalty evaluated on an empty vector") {}
};

struct NonBinaryResponseError : Error {
  NonBinaryResponseError() : Error("binomial family requires a response in {0, 1}") {}
};

struct InfeasibleScenarioError : Error {
  explicit InfeasibleScenarioError(const std::string& what) : Error("infeasible scenario: " + what) {}
};

struct SingularSystemError : Error {
  explicit SingularSystemError(const std::string& what, double condition = 0)
      : Error("singular system: " + what), condition(condition) {}
  double condition;
};

struct CsvError : Error {
  explicit CsvError(const std::string& what) : Error("csv: " + what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error("config: " + what) {}
};

}  // namespace pairglm
