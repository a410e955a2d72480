#pragma once

#include <stdexcept>
#include <string>

namespace plk {

/// Input outside an operation's mathematical domain (bad parameter sign,
/// query time out of range, violated precondition inequality).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iterative numerical routine did not converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CertificateError : public std::runtime_error {
 public:
  enum class Kind {
    Inapplicable,  // stability inequalities of the plankton-only point fail
    Unsupported,   // zero delay
    Internal       // constructed certificate violates its own invariants
  };

  CertificateError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(double time, const std::string& what)
      : std::runtime_error(what), time_(time) {}

  /// Time at which the state stopped being finite.
  [[nodiscard]] double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Malformed scenario configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace plk
