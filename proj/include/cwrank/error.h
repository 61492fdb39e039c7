#ifndef CWRANK_ERROR_H_
#define CWRANK_ERROR_H_

#include <stdexcept>
#include <string>

namespace cwrank {

// Malformed input text (bad JSON, bad number, truncated record).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a data contract.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent or missing configuration (paths, groups, task sets).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure during training.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cwrank

#endif  // CWRANK_ERROR_H_
