#include "bheat/spectral_basis.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "bheat/kernels.hpp"

namespace bheat {

namespace {

const double kSqrt2OverPi = std::sqrt(2.0 / kPi);

std::vector<double> midpoint_nodes(int count) {
  std::vector<double> nodes(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    nodes[static_cast<std::size_t>(i)] = kPi * (2.0 * (i + 1) - 1.0) / (2.0 * count);
  }
  return nodes;
}

void check_mode_range(const GridSpec& grid, int p, int q) {
  if (p < 1 || q < 1 || p > grid.max_mode_x() || q > grid.max_mode_y()) {
    throw ModeRangeError("mode (" + std::to_string(p) + "," + std::to_string(q) +
                         ") outside the resolvable range [1," +
                         std::to_string(grid.max_mode_x()) + "]x[1," +
                         std::to_string(grid.max_mode_y()) + "]");
  }
}

// (-1)^(k / 2n) when 2n | k, else 0.
double alias_cos_mean(int n, int k) {
  const int period = 2 * n;
  if (k % period != 0) return 0.0;
  return (std::abs(k / period) % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

GridSpec::GridSpec(int n, int m) : n_(n), m_(m) {
  if (n < 1 || m < 1) {
    throw ConfigError("grid sizes must be positive, got n=" + std::to_string(n) +
                      ", m=" + std::to_string(m));
  }
  nodes_x_ = midpoint_nodes(n);
  nodes_y_ = midpoint_nodes(m);
}

CoefficientField::CoefficientField(int P, int Q) {
  if (P < 0 || Q < 0) throw ConfigError("coefficient block sizes must be non-negative");
  values_ = Matrix(static_cast<std::size_t>(P), static_cast<std::size_t>(Q));
}

void CoefficientField::set(int p, int q, double value) {
  if (!std::isfinite(value)) {
    throw std::domain_error("non-finite coefficient at mode (" + std::to_string(p) + "," +
                            std::to_string(q) + ")");
  }
  values_(static_cast<std::size_t>(p - 1), static_cast<std::size_t>(q - 1)) = value;
}

double basis_1d(int p, double x) { return kSqrt2OverPi * std::sin(p * x); }

double basis_eval(int p, int q, double x, double y) {
  return (2.0 / kPi) * std::sin(p * x) * std::sin(q * y);
}

Matrix sine_table(std::span<const double> nodes, int modes) {
  Matrix table(static_cast<std::size_t>(modes), nodes.size());
  for (int p = 1; p <= modes; ++p) {
    auto row = table.row(static_cast<std::size_t>(p - 1));
    for (std::size_t i = 0; i < nodes.size(); ++i) row[i] = basis_1d(p, nodes[i]);
  }
  return table;
}

double discrete_coefficient(const Matrix& values, const GridSpec& grid, int p, int q) {
  if (values.rows() != static_cast<std::size_t>(grid.n()) ||
      values.cols() != static_cast<std::size_t>(grid.m())) {
    throw ShapeError("discrete_coefficient: values must be n x m");
  }
  check_mode_range(grid, p, q);

  std::vector<double> phi_y(static_cast<std::size_t>(grid.m()));
  for (int j = 0; j < grid.m(); ++j) phi_y[static_cast<std::size_t>(j)] = basis_1d(q, grid.nodes_y()[j]);

  double sum = 0.0;
  for (int i = 0; i < grid.n(); ++i) {
    sum += basis_1d(p, grid.nodes_x()[i]) * kernels::dot(values.row(static_cast<std::size_t>(i)), phi_y);
  }
  return kPi * kPi / (static_cast<double>(grid.n()) * grid.m()) * sum;
}

Matrix synthesize_field(const CoefficientField& coeffs, const GridSpec& grid) {
  return SineTransform(grid, coeffs.P(), coeffs.Q()).synthesize(coeffs);
}

SineTransform::SineTransform(const GridSpec& grid, int P, int Q)
    : grid_(grid),
      P_(P),
      Q_(Q),
      sin_x_(sine_table(grid.nodes_x(), std::max(P, 0))),
      sin_y_(sine_table(grid.nodes_y(), std::max(Q, 0))) {
  if (P < 0 || Q < 0) throw ConfigError("SineTransform: mode caps must be non-negative");
}

CoefficientField SineTransform::forward(const Matrix& values) const {
  const auto n = static_cast<std::size_t>(grid_.n());
  const auto m = static_cast<std::size_t>(grid_.m());
  if (values.rows() != n || values.cols() != m) {
    throw ShapeError("SineTransform::forward: values must be n x m");
  }
  if (P_ > grid_.max_mode_x() || Q_ > grid_.max_mode_y()) {
    throw ModeRangeError("SineTransform::forward: caps (" + std::to_string(P_) + "," +
                         std::to_string(Q_) + ") exceed the grid's resolvable range");
  }

  // partial(q, i) = sum_j values(i, j) phi_q(y_j)
  Matrix partial(static_cast<std::size_t>(Q_), n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = values.row(i);
    for (int q = 0; q < Q_; ++q) {
      partial(static_cast<std::size_t>(q), i) = kernels::dot(row, sin_y_.row(static_cast<std::size_t>(q)));
    }
  }

  const double scale = kPi * kPi / (static_cast<double>(n) * static_cast<double>(m));
  CoefficientField out(P_, Q_);
  for (int p = 1; p <= P_; ++p) {
    const auto phi_p = sin_x_.row(static_cast<std::size_t>(p - 1));
    for (int q = 1; q <= Q_; ++q) {
      out.set(p, q, scale * kernels::dot(phi_p, partial.row(static_cast<std::size_t>(q - 1))));
    }
  }
  return out;
}

Matrix SineTransform::synthesize(const CoefficientField& coeffs) const {
  return synthesize(coeffs.values());
}

Matrix SineTransform::synthesize(const Matrix& coeffs) const {
  const auto P = coeffs.rows();
  const auto Q = coeffs.cols();
  if (P > static_cast<std::size_t>(P_) || Q > static_cast<std::size_t>(Q_)) {
    throw ShapeError("SineTransform::synthesize: coefficient block exceeds transform caps");
  }
  const auto n = static_cast<std::size_t>(grid_.n());
  const auto m = static_cast<std::size_t>(grid_.m());

  // along_x(q, i) = sum_p c(p, q) phi_p(x_i)
  Matrix along_x(Q, n);
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t q = 0; q < Q; ++q) {
      const double c = coeffs(p, q);
      if (c != 0.0) kernels::axpy(c, sin_x_.row(p), along_x.row(q));
    }
  }

  Matrix field(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    auto out_row = field.row(i);
    for (std::size_t q = 0; q < Q; ++q) {
      const double c = along_x(q, i);
      if (c != 0.0) kernels::axpy(c, sin_y_.row(q), out_row);
    }
  }
  return field;
}

double delta_orthogonality(const GridSpec& grid, int p, int q, int r, int s) {
  double sx = 0.0;
  for (double x : grid.nodes_x()) sx += basis_1d(p, x) * basis_1d(r, x);
  double sy = 0.0;
  for (double y : grid.nodes_y()) sy += basis_1d(q, y) * basis_1d(s, y);
  return (sx / grid.n()) * (sy / grid.m());
}

double delta_1d_predicted(int n, int p, int r) {
  return (alias_cos_mean(n, p - r) - alias_cos_mean(n, p + r)) / kPi;
}

double delta_orthogonality_predicted(int n, int m, int p, int q, int r, int s) {
  return delta_1d_predicted(n, p, r) * delta_1d_predicted(m, q, s);
}

}  // namespace bheat
