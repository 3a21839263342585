#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmrbench {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Transport-level failure after all retries were exhausted.
class TransportError : public Error {
 public:
  TransportError(const std::string& message, int attempts)
      : Error(message), attempts_(attempts) {}

  int attempts() const { return attempts_; }

 private:
  int attempts_ = 1;
};

class ModelNotFoundError : public Error {
 public:
  using Error::Error;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

// Carries the 1-based line number of the offending corpus line (0 = whole file).
class CorpusFormatError : public Error {
 public:
  CorpusFormatError(const std::string& message, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

class UnsplittableError : public Error {
 public:
  using Error::Error;
};

class EmptyTranslationError : public Error {
 public:
  using Error::Error;
};

class ManifestMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmrbench
