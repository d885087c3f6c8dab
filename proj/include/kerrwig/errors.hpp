#pragma once

#include <stdexcept>
#include <string>

namespace kerrwig {

// Fock-space truncation left more probability outside the cutoff than allowed.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, int cutoff, double tail_mass, double tolerance)
      : std::runtime_error(what), cutoff_(cutoff), tail_mass_(tail_mass), tolerance_(tolerance) {}

  int cutoff() const noexcept { return cutoff_; }
  double tail_mass() const noexcept { return tail_mass_; }
  double tolerance() const noexcept { return tolerance_; }

 private:
  int cutoff_;
  double tail_mass_;
  double tolerance_;
};

// A numerical procedure failed to reach its accuracy target.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace kerrwig
