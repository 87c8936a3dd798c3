#pragma once

#include <stdexcept>
#include <string>

namespace bheat {

/// A mode index outside the range the grid can resolve (p >= n or q >= m).
class ModeRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Inconsistent sizes between a grid and the data attached to it.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bad user-supplied parameters (configuration files, CLI flags, constructors).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An inverse amplification factor exp(A(t)(p^2+q^2)) pushed a coefficient
/// past the representable range. Carries the offending mode and the natural
/// log of the coefficient magnitude that tripped the guard.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(int p, int q, double log_magnitude)
      : std::runtime_error("numerical blow-up at mode (" + std::to_string(p) + "," +
                           std::to_string(q) + "), log|coefficient| = " +
                           std::to_string(log_magnitude)),
        p_(p),
        q_(q),
        log_magnitude_(log_magnitude) {}

  int p() const { return p_; }
  int q() const { return q_; }
  double log_magnitude() const { return log_magnitude_; }

 private:
  int p_;
  int q_;
  double log_magnitude_;
};

}  // namespace bheat
