#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ctrace {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise inadmissible numeric input.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The integrator lost the trajectory (step underflow or runaway state).
class EscapeError : public Error {
 public:
  EscapeError(const std::string& what, Eigen::VectorXd last_state, double last_time)
      : Error(what), last_state_(std::move(last_state)), last_time_(last_time) {}

  const Eigen::VectorXd& last_state() const { return last_state_; }
  double last_time() const { return last_time_; }

 private:
  Eigen::VectorXd last_state_;
  double last_time_;
};

class EmptyShellError : public Error {
 public:
  using Error::Error;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class ClosureError : public Error {
 public:
  using Error::Error;
};

class BifurcationError : public Error {
 public:
  using Error::Error;
};

class NoConvergenceError : public Error {
 public:
  using Error::Error;
};

class RefinementError : public Error {
 public:
  using Error::Error;
};

class BoxError : public Error {
 public:
  using Error::Error;
};

class CoverageError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class GridMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctrace
