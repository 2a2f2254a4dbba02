#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcnoise {

enum class ErrorCode {
  kInvalidArgument,
  kInsufficientPoints,
  kDegenerateRay,
  kUnknownTier,
  kParseError,
  kEmptyCloud,
  kEmptyInput,
  kZeroVariance,
  kMissingSigma,
  kTooFewValues,
  kIo,
};

const char* to_string(ErrorCode code);

// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(ErrorCode::kParseError,
              source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

class MissingSigmaError : public Error {
 public:
  explicit MissingSigmaError(std::vector<std::string> ids);

  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  std::vector<std::string> ids_;
};

}  // namespace pcnoise
