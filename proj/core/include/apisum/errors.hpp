#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace apisum {

// Base for every error raised by the library. Callers that only care about
// "did the stage fail" catch this; the CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t record_index, const std::string& what)
      : Error("malformed record " + std::to_string(record_index) + ": " + what),
        record_index_(record_index) {}
  std::size_t record_index() const { return record_index_; }

 private:
  std::size_t record_index_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SchemaVersionMismatch : public Error {
 public:
  using Error::Error;
};

class HttpError : public Error {
 public:
  // status 0 means the request never produced an HTTP response.
  explicit HttpError(int status, const std::string& detail = {})
      : Error("HTTP error " + std::to_string(status) +
              (detail.empty() ? std::string() : ": " + detail)),
        status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class QuotaExhausted : public Error {
 public:
  using Error::Error;
};

class UnbalancedParens : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : Error("format error at line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyModel : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t lhs, std::size_t rhs)
      : Error("dimension mismatch: " + std::to_string(lhs) + " vs " + std::to_string(rhs)) {}
};

class ApiUnknown : public Error {
 public:
  explicit ApiUnknown(const std::string& api) : Error("API never mentioned in dataset: " + api) {}
};

class EmptyCorpus : public Error {
 public:
  explicit EmptyCorpus(const std::string& api) : Error("corpus is empty for " + api) {}
};

}  // namespace apisum
