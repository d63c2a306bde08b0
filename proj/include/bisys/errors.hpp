#pragma once

#include <stdexcept>
#include <string>

namespace bisys {

// Trajectory aborted (e.g. collision guard hit); carries the failure time.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// Eigenvalue search failed to bracket or converge.
class EigenvalueSearchError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dirac point spectrum ceases to exist at coupling >= j + 1/2.
class SupercriticalCouplingError : public std::domain_error {
  using std::domain_error::domain_error;
};

// Extrapolation ladder too noisy or inconsistent to quote a limit.
class ExtrapolationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config file rejected; carries the offending 1-based line when known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace bisys
