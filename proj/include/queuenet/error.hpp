#pragma once

#include <stdexcept>
#include <string>

namespace queuenet {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Raised by the RK4 integrator when a step leaves the probability simplex.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& what, double t) : Error(what), t_(t) {}
  double time() const { return t_; }

 private:
  double t_;
};

// Waiting time requested for a stream with zero arrival intensity.
class UndefinedWaitError : public Error {
 public:
  using Error::Error;
};

}  // namespace queuenet
