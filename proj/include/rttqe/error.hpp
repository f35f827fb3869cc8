#pragma once

#include <stdexcept>
#include <string>

namespace rttqe {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, mismatched lengths, invalid parameters.
/// The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A correlation coefficient is undefined for the given input (constant
/// vector, all pairs tied, too few observations).
class UndefinedCorrelation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A translator adapter failed (transport error after retries, non-2xx
/// response, malformed response). The CLI maps these to exit code 2.
class TranslatorError : public Error {
 public:
  TranslatorError(const std::string& what, std::size_t batch_index = 0)
      : Error(what), batch_index_(batch_index) {}

  std::size_t batch_index() const { return batch_index_; }

 private:
  std::size_t batch_index_;
};

}  // namespace rttqe
