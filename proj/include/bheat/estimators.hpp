#pragma once

// Spectral inversion of noisy final and source data.
//
// All three estimators share the mode-wise form
//   c_{p,q} = F_{p,q} * (h^_{p,q} - J_{p,q}),
//   J_{p,q} = sum_k w_k exp(-(A(T) - A(t_k))(p^2+q^2)) f^_{p,q}(t_k),
// where J only contains damping factors <= 1 and F_{p,q} is
//   truncated / classical:  exp(A(T)(p^2+q^2))
//   QBV:                    1 / (eps (p^2+q^2) + exp(-A(T)(p^2+q^2)))
// Amplification is applied in log space so that an exploding inversion is
// detected (and its magnitude measured) before it overflows.

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "bheat/heat_model.hpp"
#include "bheat/noise.hpp"

namespace bheat {

/// Default exponent cap (natural log) above which a coefficient counts as blown up.
inline constexpr double kDefaultLogCap = 700.0;

/// h^_{p,q}: discrete transform of d.
double estimate_h_coeff(const NoisyDataset& dataset, int p, int q);

/// f^_{p,q}(t_k) for every node of the dataset's time grid.
std::vector<double> estimate_f_coeff(const NoisyDataset& dataset, int p, int q);

/// Batched transforms of d and every g slice for modes p <= P, q <= Q.
struct SpectralData {
  CoefficientField h_hat;
  std::vector<CoefficientField> f_hat;  // one field per time node
};
SpectralData spectral_data(const NoisyDataset& dataset, int P, int Q);

struct TruncationRule {
  enum class Mode { theorem, numeric, manual };
  Mode mode = Mode::numeric;
  double omega1 = 1.0;
  double omega2 = 1.0;
  int N = 1;  // manual mode only
  int M = 1;

  static TruncationRule numeric() { return {}; }
  static TruncationRule theorem(double omega1, double omega2);
  static TruncationRule manual(int N, int M);
};

TruncationRule::Mode parse_truncation_mode(const std::string& text);
std::string to_string(TruncationRule::Mode mode);

/// Mode caps (N, M):
///   numeric: floor(sqrt(log n) / A_T)
///   theorem: floor(sqrt(omega1 log n) / (2 sqrt(A_T)))
///   manual:  as given
/// always clamped to [1, n-1] x [1, m-1]. Throws ConfigError if n or m < 2,
/// A_T <= 0, or omega outside (0, 2) in theorem mode.
std::pair<int, int> select_truncation(const TruncationRule& rule, int n, int m, double A_T);

/// Coefficients c_{p,q} = exp(log_scale) * scaled(p-1, q-1). log_scale is 0
/// unless some coefficient is too large to hold directly.
struct Estimate {
  Matrix scaled;
  double log_scale = 0.0;
  /// Largest log|c_{p,q}| and where it occurred.
  double max_log_magnitude = -std::numeric_limits<double>::infinity();
  int worst_p = 0;
  int worst_q = 0;
  /// max_log_magnitude exceeded the cap.
  bool blown_up = false;

  int P() const { return static_cast<int>(scaled.rows()); }
  int Q() const { return static_cast<int>(scaled.cols()); }

  /// Plain coefficients. Throws BlowUpError when they are not representable.
  CoefficientField coefficients() const;
  /// Sine series on the grid. Throws BlowUpError when not representable.
  Matrix field(const GridSpec& grid) const;
};

/// Mode-(p,q) truncated estimator for p <= N, q <= M with (N, M) from the
/// rule. Throws BlowUpError naming the largest mode coefficient when its
/// log magnitude exceeds log_cap.
Estimate truncated_estimator(const NoisyDataset& dataset, const DiffusionProfile& profile,
                             const TruncationRule& rule, double log_cap = kDefaultLogCap);

/// Quasi-boundary-value filter on p <= P_max, q <= Q_max. Never overflows.
Estimate qbv_estimator(const NoisyDataset& dataset, const DiffusionProfile& profile, double epsilon,
                       int P_max, int Q_max);

/// Unfiltered inversion on p <= P_max, q <= Q_max. Does not throw on
/// blow-up; the result carries blown_up and the log magnitude instead.
Estimate classical_estimator(const NoisyDataset& dataset, const DiffusionProfile& profile, int P_max,
                             int Q_max, double log_cap = kDefaultLogCap);

/// RMSE over the grid between a field and the truth.
double rmse(const Matrix& estimate, const Matrix& truth);

/// Natural log of the RMSE between an estimate's field and the truth,
/// finite even when the coefficients themselves overflow a double.
double log_rmse(const Estimate& estimate, const GridSpec& grid, const Matrix& truth);

/// gamma_{n,m,p,q}: discrete transform of exact samples minus the exact coefficient.
double discretization_bias_direct(const std::function<double(double, double)>& field,
                                  const std::function<double(int, int)>& coeff_oracle,
                                  const GridSpec& grid, int p, int q);

/// Aliasing tail P + Q + R with |k| <= k_cap, |l| <= l_cap:
///   P = sum_k (-1)^k (c_{2kn+p,q} - c_{2kn-p,q}), Q likewise in l,
///   R = sum_{k,l} (-1)^{k+l} (c_{2kn+p,2lm+q} - c_{2kn+p,2lm-q}
///                            - c_{2kn-p,2lm+q} + c_{2kn-p,2lm-q}).
/// The oracle must be valid up to (2 k_cap n + p, 2 l_cap m + q).
double bias_tail_series(const std::function<double(int, int)>& coeff_oracle, int n, int m, int p, int q,
                        int k_cap, int l_cap);

/// Coefficient-decay budget sum p^{2 alpha} q^{2 beta} c_{p,q}^2 <= E^2.
struct SmoothnessClass {
  double alpha = 1.0;
  double beta = 1.0;
  double E = 1.0;

  double weighted_norm_sq(const CoefficientField& coeffs) const;
  bool contains(const CoefficientField& coeffs) const { return weighted_norm_sq(coeffs) <= E * E; }
};

/// ||theta^ - theta||^2 by coefficients over [1, cap]^2, split into the
/// estimated block and the modes the estimator left at zero.
struct ParsevalSplit {
  double inside = 0.0;   // sum over the estimated block of (c^ - c)^2
  double outside = 0.0;  // sum of c^2 outside the block
  double total = 0.0;    // direct sum of (c^ - c)^2 with c^ = 0 outside
};
ParsevalSplit parseval_error_split(const CoefficientField& estimate,
                                   const std::function<double(int, int)>& truth, int cap);

}  // namespace bheat
