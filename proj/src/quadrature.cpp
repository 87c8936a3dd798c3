#include "bheat/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bheat/errors.hpp"
#include "bheat/spectral_basis.hpp"

namespace bheat {

namespace {

struct LegendreValue {
  double p;       // P_n(x)
  double dp;      // P_n'(x)
};

LegendreValue legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  // (1 - x^2) P_n' = n (P_{n-1} - x P_n)
  return {p1, n * (p0 - x * p1) / (1.0 - x * x)};
}

// Closed Newton-Cotes weights (in units of h) on k = 1..5 segments.
std::vector<double> newton_cotes_closed(int k) {
  switch (k) {
    case 1:
      return {0.5, 0.5};
    case 2:
      return {1.0 / 3, 4.0 / 3, 1.0 / 3};
    case 3:
      return {3.0 / 8, 9.0 / 8, 9.0 / 8, 3.0 / 8};
    case 4:
      return {14.0 / 45, 64.0 / 45, 24.0 / 45, 64.0 / 45, 14.0 / 45};
    case 5:
      return {95.0 / 288, 375.0 / 288, 250.0 / 288, 250.0 / 288, 375.0 / 288, 95.0 / 288};
    default:
      throw std::logic_error("newton_cotes_closed: unsupported segment count");
  }
}

}  // namespace

GaussLegendreRule gauss_legendre_rule(int order) {
  if (order < 1) throw ConfigError("Gauss-Legendre order must be >= 1");
  constexpr double kTol = 1e-14;
  constexpr int kMaxIter = 100;

  GaussLegendreRule rule;
  rule.order = order;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));

  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Root i counted from the right end of the interval.
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    bool converged = false;
    for (int iter = 0; iter < kMaxIter; ++iter) {
      const LegendreValue v = legendre(order, x);
      const double dx = v.p / v.dp;
      x -= dx;
      if (std::abs(dx) < kTol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw std::runtime_error("gauss_legendre_rule: Newton iteration did not converge for order " +
                               std::to_string(order));
    }
    const double dp = legendre(order, x).dp;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(order - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  return rule;
}

const GaussLegendreRule& gauss_legendre_512() {
  static const GaussLegendreRule rule = gauss_legendre_rule(512);
  return rule;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    const GaussLegendreRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

std::vector<double> composite_time_weights(int K, double T) {
  if (K < 6) throw ConfigError("composite_time_weights: need at least 6 segments, got " + std::to_string(K));
  if (!(T > 0.0)) throw ConfigError("composite_time_weights: horizon must be positive");
  const double h = T / K;
  std::vector<double> w(static_cast<std::size_t>(K + 1), h);
  const double ends[3] = {3.0 / 8, 7.0 / 6, 23.0 / 24};
  for (std::size_t e = 0; e < 3; ++e) {
    w[e] = h * ends[e];
    w[static_cast<std::size_t>(K) - e] = h * ends[e];
  }
  return w;
}

TimeGrid::TimeGrid(double T, int K) : T_(T), K_(K), weights_(composite_time_weights(K, T)) {
  points_.resize(static_cast<std::size_t>(K + 1));
  for (int k = 0; k <= K; ++k) points_[static_cast<std::size_t>(k)] = T * k / K;
  points_.back() = T;
}

std::vector<double> TimeGrid::prefix_weights(int k) const {
  if (k < 0 || k > K_) throw std::out_of_range("TimeGrid::prefix_weights: index out of range");
  if (k == 0) return {0.0};
  if (k == K_) return weights_;
  if (k >= 6) return composite_time_weights(k, points_[static_cast<std::size_t>(k)]);
  std::vector<double> w = newton_cotes_closed(k);
  for (double& v : w) v *= step();
  return w;
}

double integrate_time_series(std::span<const double> values, const TimeGrid& grid) {
  if (values.size() != grid.size()) {
    throw ShapeError("integrate_time_series: expected " + std::to_string(grid.size()) +
                     " values, got " + std::to_string(values.size()));
  }
  double sum = 0.0;
  const auto w = grid.weights();
  for (std::size_t k = 0; k < values.size(); ++k) sum += values[k] * w[k];
  return sum;
}

}  // namespace bheat
