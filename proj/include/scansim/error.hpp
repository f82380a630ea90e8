#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scansim {

// Base of every error raised by the library. Callers that only need to
// report a failure can catch this; tests match the concrete subclasses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedCallNumber : public Error {
 public:
  MalformedCallNumber(std::size_t position, std::string reason)
      : Error("malformed call number at " + std::to_string(position) + ": " +
              reason),
        position_(position),
        reason_(std::move(reason)) {}

  std::size_t position() const { return position_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t position_;
  std::string reason_;
};

class InvalidConfig : public Error {
 public:
  InvalidConfig(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class UnknownSection : public Error {
 public:
  explicit UnknownSection(const std::string& id)
      : Error("unknown section '" + id + "'") {}
};

class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

class OneSidedCloud : public Error {
 public:
  using Error::Error;
};

class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class EmptyCandidates : public Error {
 public:
  EmptyCandidates() : Error("candidate set is empty") {}
};

class EmptySet : public Error {
 public:
  EmptySet() : Error("evaluation set is empty") {}
};

// Schema or parse failure while reading one of the on-disk formats.
class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace scansim
