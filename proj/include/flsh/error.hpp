#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flsh {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define FLSH_DEFINE_ERROR(Name)                                                \
  class Name : public Error {                                                  \
  public:                                                                      \
    using Error::Error;                                                        \
  }

FLSH_DEFINE_ERROR(DomainError);
FLSH_DEFINE_ERROR(NonFiniteError);
FLSH_DEFINE_ERROR(DuplicateIdError);
FLSH_DEFINE_ERROR(ZeroNormError);
FLSH_DEFINE_ERROR(TruncationError);
FLSH_DEFINE_ERROR(BasisMismatchError);
FLSH_DEFINE_ERROR(UnsupportedMeasureError);
FLSH_DEFINE_ERROR(OverflowError);
FLSH_DEFINE_ERROR(ZeroVectorError);
FLSH_DEFINE_ERROR(UnsupportedPError);
FLSH_DEFINE_ERROR(RangeError);
FLSH_DEFINE_ERROR(EpsilonTooLargeError);
FLSH_DEFINE_ERROR(KindError);
FLSH_DEFINE_ERROR(EmptyIndexError);
FLSH_DEFINE_ERROR(IoError);
FLSH_DEFINE_ERROR(FormatVersionError);
FLSH_DEFINE_ERROR(ChecksumError);
FLSH_DEFINE_ERROR(ConfigError);

#undef FLSH_DEFINE_ERROR

/// Parse failure; carries the 1-based line number (0 when not line-oriented).
class ParseError : public Error {
public:
  ParseError(const std::string &what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

} // namespace flsh
