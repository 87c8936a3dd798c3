#pragma once

// Forward problem u_t - a(t) (u_xx + u_yy) = f on (0,pi)^2 with zero Dirichlet
// data, solved mode by mode:
//   u_{p,q}(t) = (theta_{p,q} + int_0^t lambda^{-1}_{p,q}(s) f_{p,q}(s) ds) lambda_{p,q}(t),
//   lambda_{p,q}(t) = exp(-A(t)(p^2+q^2)),  A(t) = int_0^t a(s) ds.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bheat/quadrature.hpp"
#include "bheat/spectral_basis.hpp"

namespace bheat {

class DiffusionProfile {
 public:
  enum class Kind { constant, linear_ex1, exp_ex2, tabulated };

  /// a(t) = c on [0, horizon].
  static DiffusionProfile constant(double c, double horizon = 1.0);
  /// a(t) = 2 - t. Requires horizon < 2.
  static DiffusionProfile linear_ex1(double horizon = 1.0);
  /// a(t) = 0.5 exp(-t).
  static DiffusionProfile exp_ex2(double horizon = 1.0);
  /// Monotone piecewise-cubic (PCHIP) interpolation of samples (t_k, a_k).
  /// Needs at least 4 strictly increasing times starting at 0; the last time
  /// is the horizon. A(t) is integrated with the 512-point Gauss-Legendre rule.
  static DiffusionProfile tabulated(std::vector<double> times, std::vector<double> rates);

  Kind kind() const { return kind_; }
  double horizon() const { return horizon_; }
  /// Bounds a1 <= a(t) <= a2 on [0, horizon]; exact for the named profiles,
  /// from a dense sample for tabulated ones.
  double lower_bound() const { return a1_; }
  double upper_bound() const { return a2_; }

  double rate(double t) const;
  /// A(t). Throws std::out_of_range outside [0, horizon].
  double cumulative(double t) const;

  std::string describe() const;

 private:
  DiffusionProfile() = default;
  void compute_bounds();

  Kind kind_ = Kind::constant;
  double horizon_ = 1.0;
  double c_ = 1.0;
  double a1_ = 1.0;
  double a2_ = 1.0;
  std::vector<double> times_;
  std::vector<double> rates_;
  std::shared_ptr<const std::function<double(double)>> interpolant_;
};

/// A(t) for the given profile.
double cumulative_diffusion(const DiffusionProfile& profile, double t);

/// exp(-A(t)(p^2+q^2)).
double lambda_pq(const DiffusionProfile& profile, int p, int q, double t);

/// A(t_k) at every node of the time grid.
std::vector<double> cumulative_at_nodes(const DiffusionProfile& profile, const TimeGrid& grid);

/// u_{p,q}(t_k) with the inner integral taken by the grid's quadrature on
/// [0, t_k]. Evaluated as theta lambda(t_k) + sum_j w_j exp(-(A(t_k)-A(t_j))(p^2+q^2)) f(t_j)
/// so no intermediate factor exceeds 1.
double forward_coefficient(const DiffusionProfile& profile, double theta_pq,
                           std::span<const double> f_pq, const TimeGrid& grid, int p, int q,
                           int t_index);

/// Ground-truth problem: evaluable fields plus optional exact coefficient oracles.
struct ProblemInstance {
  std::string name;
  double T = 1.0;
  DiffusionProfile profile = DiffusionProfile::constant(1.0);
  std::function<double(double, double)> theta;
  std::function<double(double, double, double)> f;  // (x, y, t)
  std::function<double(double, double)> h;
  std::function<double(int, int)> theta_coeff;
  std::function<double(int, int, double)> f_coeff;  // (p, q, t)
  std::function<double(int, int)> h_coeff;

  bool has_oracles() const { return theta_coeff && f_coeff; }

  Matrix sample_theta(const GridSpec& grid) const;
  Matrix sample_h(const GridSpec& grid) const;
  Matrix sample_f(const GridSpec& grid, double t) const;
};

/// h_{p,q} for p <= P, q <= Q from the theta and f oracles via the forward map
/// on the given time grid. Throws ConfigError without oracles.
CoefficientField final_data_coefficients(const ProblemInstance& instance, int P, int Q,
                                         const TimeGrid& grid);

/// Built-in problems (T = 1):
///   1: a = 2 - t, theta = 5 sin x sin y, h = 4 sin x sin y,
///      f = 2(t^3 - 2t^2 - 6t + 10) sin x sin y.
///   2: a = 0.5 e^{-t}, theta = (1/pi)[x(pi-x) sin y - sin 3x sin y], h = e^{-1} theta,
///      f the source for which u = e^{-t} theta solves the equation.
/// Throws ConfigError for other ids.
ProblemInstance builtin_example(int id);

struct ModalTerm {
  int p;
  int q;
  double value;
};

struct SourceTerm {
  int p;
  int q;
  std::vector<double> poly;  // f_{p,q}(t) = sum_k poly[k] t^k
};

/// Finite sine-series problem: theta and f are given by their modes, h follows
/// from the forward map (integral by 512-point Gauss-Legendre).
ProblemInstance modal_problem(const DiffusionProfile& profile, std::vector<ModalTerm> theta_modes,
                              std::vector<SourceTerm> source_modes);

}  // namespace bheat
