#pragma once

// Dirichlet sine basis phi_{p,q}(x,y) = (2/pi) sin(px) sin(qy) on (0,pi)^2,
// sampled on the midpoint grid x_i = pi(2i-1)/(2n), y_j = pi(2j-1)/(2m).
//
// Mode indices (p,q) are 1-based everywhere in the public API. Grid node
// indices are 0-based (node i in code is node i+1 in the usual notation).
// On this grid the first n-1 (resp. m-1) sine modes are exactly discretely
// orthogonal, which is what makes the scaled grid sum
//   (pi^2 / nm) sum_ij v_ij phi_{p,q}(x_i, y_j)
// an unbiased coefficient estimate for band-limited data.

#include <numbers>
#include <span>
#include <vector>

#include "bheat/matrix.hpp"

namespace bheat {

inline constexpr double kPi = std::numbers::pi;

class GridSpec {
 public:
  /// Midpoint grid with n nodes in x and m nodes in y. Throws ConfigError if
  /// either count is below 1.
  GridSpec(int n, int m);

  int n() const { return n_; }
  int m() const { return m_; }
  std::span<const double> nodes_x() const { return nodes_x_; }
  std::span<const double> nodes_y() const { return nodes_y_; }

  /// Largest mode index the discrete transform resolves in each direction.
  int max_mode_x() const { return n_ - 1; }
  int max_mode_y() const { return m_ - 1; }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.n_ == b.n_ && a.m_ == b.m_;
  }

 private:
  int n_;
  int m_;
  std::vector<double> nodes_x_;
  std::vector<double> nodes_y_;
};

/// Sine-series coefficients c_{p,q}, p = 1..P, q = 1..Q. Entries are always
/// finite; set() rejects NaN and infinities.
class CoefficientField {
 public:
  CoefficientField() = default;
  CoefficientField(int P, int Q);

  int P() const { return static_cast<int>(values_.rows()); }
  int Q() const { return static_cast<int>(values_.cols()); }

  double at(int p, int q) const { return values_(p - 1, q - 1); }
  void set(int p, int q, double value);

  /// Coefficient for any (p,q) >= 1, zero outside the stored block.
  double get_or_zero(int p, int q) const {
    return (p <= P() && q <= Q()) ? values_(p - 1, q - 1) : 0.0;
  }

  const Matrix& values() const { return values_; }

  friend bool operator==(const CoefficientField&, const CoefficientField&) = default;

 private:
  Matrix values_;
};

/// (2/pi) sin(px) sin(qy).
double basis_eval(int p, int q, double x, double y);

/// 1-D factor sqrt(2/pi) sin(p x).
double basis_1d(int p, double x);

/// rows[p-1][i] = sqrt(2/pi) sin(p * nodes[i]) for p = 1..modes.
Matrix sine_table(std::span<const double> nodes, int modes);

/// (pi^2/nm) sum_ij values(i,j) phi_{p,q}(x_i, y_j). Requires 1 <= p <= n-1 and
/// 1 <= q <= m-1 (ModeRangeError otherwise) and values of shape n x m.
double discrete_coefficient(const Matrix& values, const GridSpec& grid, int p, int q);

/// Pointwise evaluation of the finite sine series at the grid nodes.
Matrix synthesize_field(const CoefficientField& coeffs, const GridSpec& grid);

/// Batched separable transform between grid samples and a P x Q block of
/// coefficients. Precomputes the sine tables once; forward() costs
/// O(nm Q + nPQ) instead of O(nmPQ) for a coefficient-by-coefficient loop.
class SineTransform {
 public:
  SineTransform(const GridSpec& grid, int P, int Q);

  const GridSpec& grid() const { return grid_; }
  int P() const { return P_; }
  int Q() const { return Q_; }

  /// Requires P <= n-1 and Q <= m-1 (checked here, ModeRangeError).
  CoefficientField forward(const Matrix& values) const;
  /// Accepts any coefficient block no larger than P x Q.
  Matrix synthesize(const CoefficientField& coeffs) const;
  /// Same as synthesize() but from raw (possibly rescaled) coefficient values.
  Matrix synthesize(const Matrix& coeffs) const;

 private:
  GridSpec grid_;
  int P_;
  int Q_;
  Matrix sin_x_;  // P x n
  Matrix sin_y_;  // Q x m
};

/// delta_{p,q,r,s} = (1/n) sum_i phi_p(x_i) phi_r(x_i) * (1/m) sum_j phi_q(y_j) phi_s(y_j),
/// by direct summation. Any indices >= 1 are allowed, including aliased ones.
double delta_orthogonality(const GridSpec& grid, int p, int q, int r, int s);

/// Closed-form 1-D factor (1/n) sum_i phi_p(x_i) phi_r(x_i) on the midpoint
/// grid: (1/pi)[c(p-r) - c(p+r)] with c(k) = (-1)^(k/2n) when 2n divides k,
/// else 0.
double delta_1d_predicted(int n, int p, int r);

/// Closed-form counterpart of delta_orthogonality().
double delta_orthogonality_predicted(int n, int m, int p, int q, int r, int s);

}  // namespace bheat
