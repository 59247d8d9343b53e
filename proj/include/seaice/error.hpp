#pragma once

#include <stdexcept>
#include <string>

namespace seaice {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  /// Short machine-readable category used in structured CLI error output.
  [[nodiscard]] virtual const char* kind() const noexcept { return "error"; }
};

class ParameterError : public Error {
public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "parameter"; }
};

class ConfigurationError : public Error {
public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "configuration"; }
};

class InsufficientDataError : public Error {
public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "insufficient_data"; }
};

class UndefinedStatisticError : public Error {
public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "undefined_statistic"; }
};

/// Two floe centres coincide, so no contact normal exists.
class DegenerateContactError : public Error {
public:
  DegenerateContactError(int l, int j)
      : Error("degenerate contact: floes " + std::to_string(l) + " and " + std::to_string(j) +
              " have coincident centres"),
        first(l), second(j) {}
  [[nodiscard]] const char* kind() const noexcept override { return "degenerate_contact"; }
  int first;
  int second;
};

class NumericalBlowupError : public Error {
public:
  NumericalBlowupError(int floe_id, double time)
      : Error("non-finite state for floe " + std::to_string(floe_id) + " at t=" + std::to_string(time) + " s"),
        floe(floe_id), t(time) {}
  [[nodiscard]] const char* kind() const noexcept override { return "numerical_blowup"; }
  int floe;
  double t;
};

/// A file could not be read, written or understood.
class IoError : public Error {
public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "io"; }
};

class ParseError : public Error {
public:
  ParseError(const std::string& msg, int line_no)
      : Error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + msg : msg), line(line_no) {}
  [[nodiscard]] const char* kind() const noexcept override { return "parse"; }
  int line;
};

}  // namespace seaice

namespace seaice {

/// An error raised inside a time step, annotated with the simulation time.
class StepError : public Error {
public:
  StepError(const Error& cause, double time)
      : Error("t=" + std::to_string(time) + " s: " + cause.what()), t(time), cause_kind_(cause.kind()) {}
  [[nodiscard]] const char* kind() const noexcept override { return cause_kind_.c_str(); }
  double t;

private:
  std::string cause_kind_;
};

}  // namespace seaice
