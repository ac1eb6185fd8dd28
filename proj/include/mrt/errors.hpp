#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mrt {

/// Byte offsets [begin, end) into a parsed input.
struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violations: bad arguments, mixed spaces, undefined jets or directions.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, SourceSpan span)
      : Error(what + " at [" + std::to_string(span.begin) + "," + std::to_string(span.end) + ")"),
        span_(span) {}
  SourceSpan span() const { return span_; }

 private:
  SourceSpan span_;
};

/// An intermediate expression exceeded the configured term cap.
class SwellError : public Error {
 public:
  using Error::Error;
};

/// A reduction exceeded its rewrite-step cap.
class StepCapError : public Error {
 public:
  using Error::Error;
};

}  // namespace mrt
