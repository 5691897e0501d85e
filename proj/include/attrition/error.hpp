#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace attrition {

// Error hierarchy. The CLI maps each family to an exit code:
//   UsageError -> 2, DataError (and subclasses) -> 3, NumericError (and subclasses) -> 4.

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IntegrityError : public DataError {
 public:
  using DataError::DataError;
};

class RangeError : public DataError {
 public:
  using DataError::DataError;
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

// Raised by the cross-validation guard when any training stage touched an
// outer-test row or a feature column depends on outer-test labels.
class LeakageError : public DataError {
 public:
  using DataError::DataError;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroVarianceError : public NumericError {
 public:
  explicit ZeroVarianceError(const std::string& covariate)
      : NumericError("zero variance covariate: " + covariate), covariate_(covariate) {}

  const std::string& covariate() const noexcept { return covariate_; }

 private:
  std::string covariate_;
};

class SingularHessianError : public NumericError {
 public:
  using NumericError::NumericError;
};

class NoEventsError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace attrition
