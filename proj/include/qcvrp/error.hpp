#pragma once

#include <stdexcept>
#include <string>

namespace qcvrp {

// Base of every error thrown by the library. `exit_code` follows the CLI
// convention: 2 for bad input data, 3 for runtime failures.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what, int exit_code = 3)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

private:
  int exit_code_;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what, 2), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& what) : Error(what, 2) {}
};

class UnsupportedFormatError : public Error {
public:
  explicit UnsupportedFormatError(const std::string& what) : Error(what, 2) {}
};

class ModelError : public Error {
public:
  explicit ModelError(const std::string& what) : Error(what, 2) {}
};

class OverflowError : public Error {
public:
  explicit OverflowError(const std::string& what) : Error(what, 2) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(what, 2) {}
};

class DimensionError : public Error {
public:
  explicit DimensionError(const std::string& what) : Error(what, 2) {}
};

class DomainError : public Error {
public:
  explicit DomainError(const std::string& what) : Error(what, 2) {}
};

class SizeGuardError : public Error {
public:
  explicit SizeGuardError(const std::string& what) : Error(what, 2) {}
};

class EncodingError : public Error {
public:
  explicit EncodingError(const std::string& what) : Error(what, 2) {}
};

// Remote sampler failures. `retryable()` tells the caller whether repeating
// the same request may succeed.
class RemoteError : public Error {
public:
  RemoteError(const std::string& what, bool retryable)
      : Error(what, 3), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

private:
  bool retryable_;
};

// Connection refused, timeout, DNS failure.
class TransportError : public RemoteError {
public:
  explicit TransportError(const std::string& what)
      : RemoteError(what + " (transport failure; retry later)", true) {}
};

class HttpStatusError : public RemoteError {
public:
  HttpStatusError(int status, const std::string& body)
      : RemoteError("service returned HTTP " + std::to_string(status) +
                        (status >= 500 || status == 429
                             ? " (server side; retry with backoff)"
                             : " (client side; fix the request before retrying)") +
                        (body.empty() ? "" : ": " + body),
                    status >= 500 || status == 429),
        status_(status) {}
  int status() const noexcept { return status_; }

private:
  int status_;
};

class SchemaError : public RemoteError {
public:
  explicit SchemaError(const std::string& what)
      : RemoteError("response schema mismatch: " + what +
                        " (not retryable; check service version)",
                    false) {}
};

}  // namespace qcvrp
