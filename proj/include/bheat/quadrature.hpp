#pragma once

#include <functional>
#include <span>
#include <vector>

namespace bheat {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  int order = 0;
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // positive, sum to 2
};

/// Roots of P_order by Newton iteration from Chebyshev-like initial guesses,
/// weights 2 / ((1 - x^2) P'(x)^2). Throws std::runtime_error if Newton
/// fails to converge and ConfigError if order < 1.
GaussLegendreRule gauss_legendre_rule(int order);

/// Shared 512-point rule (built once, thread-safe).
const GaussLegendreRule& gauss_legendre_512();

/// Integral of f over [a, b] with the rule mapped affinely.
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    const GaussLegendreRule& rule);

/// Composite end-corrected rule on K equal segments of [0, T]:
///   h * {3/8, 7/6, 23/24, 1, ..., 1, 23/24, 7/6, 3/8}
/// Exact for cubics. K < 6 is rejected because the end stencils overlap.
std::vector<double> composite_time_weights(int K, double T = 1.0);

/// Equidistant time nodes t_k = kT/K, k = 0..K, carrying composite weights.
class TimeGrid {
 public:
  TimeGrid(double T, int K);

  double horizon() const { return T_; }
  int segments() const { return K_; }
  double step() const { return T_ / K_; }
  std::span<const double> points() const { return points_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return points_.size(); }

  /// Weights integrating over [0, t_k] with the same nodes. Uses the
  /// composite rule when k >= 6 and the closed Newton-Cotes rule on k
  /// segments for 1 <= k <= 5; k = 0 gives a single zero weight.
  std::vector<double> prefix_weights(int k) const;

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.T_ == b.T_ && a.K_ == b.K_;
  }

 private:
  double T_;
  int K_;
  std::vector<double> points_;
  std::vector<double> weights_;
};

/// sum_k values[k] * weights[k]. Throws ShapeError on length mismatch.
double integrate_time_series(std::span<const double> values, const TimeGrid& grid);

}  // namespace bheat
