#include "bheat/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bheat/errors.hpp"
#include "bheat/kernels.hpp"

namespace bheat {

namespace {

// Coefficients up to e^700 are stored as plain doubles.
constexpr double kRepresentableLog = 700.0;

void require_profile_covers(const NoisyDataset& ds, const DiffusionProfile& profile) {
  if (ds.time_grid.horizon() > profile.horizon() * (1.0 + 1e-12)) {
    throw ConfigError("diffusion profile horizon is shorter than the dataset's final time");
  }
}

void check_caps(const GridSpec& grid, int P, int Q, const char* who) {
  if (P < 1 || Q < 1 || P > grid.max_mode_x() || Q > grid.max_mode_y()) {
    throw ModeRangeError(std::string(who) + ": mode caps (" + std::to_string(P) + "," + std::to_string(Q) +
                         ") outside [1," + std::to_string(grid.max_mode_x()) + "]x[1," +
                         std::to_string(grid.max_mode_y()) + "]");
  }
}

// h^ - sum_k w_k exp(-(A(T)-A(t_k)) pp) f^(t_k) for every mode of the block.
Matrix residual_block(const NoisyDataset& ds, const DiffusionProfile& profile, int P, int Q) {
  const SpectralData spec = spectral_data(ds, P, Q);
  const std::vector<double> A = cumulative_at_nodes(profile, ds.time_grid);
  const double AT = A.back();
  const auto w = ds.time_grid.weights();

  Matrix out(static_cast<std::size_t>(P), static_cast<std::size_t>(Q));
  for (int p = 1; p <= P; ++p) {
    for (int q = 1; q <= Q; ++q) {
      const double pp = static_cast<double>(p * p + q * q);
      double J = 0.0;
      for (std::size_t k = 0; k < A.size(); ++k) J += w[k] * std::exp(-(AT - A[k]) * pp) * spec.f_hat[k].at(p, q);
      out(static_cast<std::size_t>(p - 1), static_cast<std::size_t>(q - 1)) = spec.h_hat.at(p, q) - J;
    }
  }
  return out;
}

// c = sign(r) exp(log_gain + log|r|), assembled with a common scale.
Estimate from_log_gain(const Matrix& residual, const std::function<double(int, int)>& log_gain, double log_cap) {
  const auto P = residual.rows();
  const auto Q = residual.cols();
  Matrix logmag(P, Q);
  Estimate est;
  for (std::size_t i = 0; i < P; ++i) {
    for (std::size_t j = 0; j < Q; ++j) {
      const double r = residual(i, j);
      const double lm = r == 0.0 ? -std::numeric_limits<double>::infinity()
                                 : log_gain(static_cast<int>(i) + 1, static_cast<int>(j) + 1) + std::log(std::abs(r));
      logmag(i, j) = lm;
      if (lm > est.max_log_magnitude) {
        est.max_log_magnitude = lm;
        est.worst_p = static_cast<int>(i) + 1;
        est.worst_q = static_cast<int>(j) + 1;
      }
    }
  }
  est.blown_up = est.max_log_magnitude > log_cap;
  est.log_scale = est.max_log_magnitude > kRepresentableLog ? est.max_log_magnitude : 0.0;
  est.scaled = Matrix(P, Q);
  for (std::size_t i = 0; i < P; ++i) {
    for (std::size_t j = 0; j < Q; ++j) {
      const double r = residual(i, j);
      if (r == 0.0) continue;
      est.scaled(i, j) = std::copysign(std::exp(logmag(i, j) - est.log_scale), r);
    }
  }
  return est;
}

}  // namespace

double estimate_h_coeff(const NoisyDataset& dataset, int p, int q) {
  return discrete_coefficient(dataset.d, dataset.grid, p, q);
}

std::vector<double> estimate_f_coeff(const NoisyDataset& dataset, int p, int q) {
  std::vector<double> out;
  out.reserve(dataset.g.size());
  for (const Matrix& slice : dataset.g) out.push_back(discrete_coefficient(slice, dataset.grid, p, q));
  return out;
}

SpectralData spectral_data(const NoisyDataset& dataset, int P, int Q) {
  if (dataset.g.size() != dataset.time_grid.size()) throw ShapeError("dataset: g must have K+1 slices");
  const SineTransform transform(dataset.grid, P, Q);
  SpectralData out{transform.forward(dataset.d), {}};
  out.f_hat.reserve(dataset.g.size());
  for (const Matrix& slice : dataset.g) out.f_hat.push_back(transform.forward(slice));
  return out;
}

TruncationRule TruncationRule::theorem(double omega1, double omega2) {
  TruncationRule r;
  r.mode = Mode::theorem;
  r.omega1 = omega1;
  r.omega2 = omega2;
  return r;
}

TruncationRule TruncationRule::manual(int N, int M) {
  TruncationRule r;
  r.mode = Mode::manual;
  r.N = N;
  r.M = M;
  return r;
}

TruncationRule::Mode parse_truncation_mode(const std::string& text) {
  if (text == "numeric") return TruncationRule::Mode::numeric;
  if (text == "theorem") return TruncationRule::Mode::theorem;
  if (text == "manual") return TruncationRule::Mode::manual;
  throw ConfigError("unknown truncation mode '" + text + "' (expected numeric, theorem or manual)");
}

std::string to_string(TruncationRule::Mode mode) {
  switch (mode) {
    case TruncationRule::Mode::numeric:
      return "numeric";
    case TruncationRule::Mode::theorem:
      return "theorem";
    case TruncationRule::Mode::manual:
      return "manual";
  }
  return "?";
}

std::pair<int, int> select_truncation(const TruncationRule& rule, int n, int m, double A_T) {
  if (n < 2 || m < 2) throw ConfigError("select_truncation: need n, m >= 2");
  if (!(A_T > 0.0)) throw ConfigError("select_truncation: A(T) must be positive");
  int N = 0;
  int M = 0;
  switch (rule.mode) {
    case TruncationRule::Mode::numeric:
      N = static_cast<int>(std::floor(std::sqrt(std::log(n)) / A_T));
      M = static_cast<int>(std::floor(std::sqrt(std::log(m)) / A_T));
      break;
    case TruncationRule::Mode::theorem:
      if (!(rule.omega1 > 0.0 && rule.omega1 < 2.0 && rule.omega2 > 0.0 && rule.omega2 < 2.0)) {
        throw ConfigError("select_truncation: omega1, omega2 must lie in (0, 2)");
      }
      N = static_cast<int>(std::floor(std::sqrt(rule.omega1 * std::log(n)) / (2.0 * std::sqrt(A_T))));
      M = static_cast<int>(std::floor(std::sqrt(rule.omega2 * std::log(m)) / (2.0 * std::sqrt(A_T))));
      break;
    case TruncationRule::Mode::manual:
      N = rule.N;
      M = rule.M;
      break;
  }
  return {std::clamp(N, 1, n - 1), std::clamp(M, 1, m - 1)};
}

CoefficientField Estimate::coefficients() const {
  if (log_scale != 0.0) throw BlowUpError(worst_p, worst_q, max_log_magnitude);
  CoefficientField out(P(), Q());
  for (int p = 1; p <= P(); ++p)
    for (int q = 1; q <= Q(); ++q) out.set(p, q, scaled(static_cast<std::size_t>(p - 1), static_cast<std::size_t>(q - 1)));
  return out;
}

Matrix Estimate::field(const GridSpec& grid) const {
  if (log_scale != 0.0) throw BlowUpError(worst_p, worst_q, max_log_magnitude);
  Matrix out = SineTransform(grid, P(), Q()).synthesize(scaled);
  for (double v : out.flat()) {
    if (!std::isfinite(v)) throw BlowUpError(worst_p, worst_q, max_log_magnitude);
  }
  return out;
}

Estimate truncated_estimator(const NoisyDataset& dataset, const DiffusionProfile& profile,
                             const TruncationRule& rule, double log_cap) {
  require_profile_covers(dataset, profile);
  const double AT = profile.cumulative(dataset.time_grid.horizon());
  const auto [N, M] = select_truncation(rule, dataset.grid.n(), dataset.grid.m(), AT);
  Estimate est = from_log_gain(residual_block(dataset, profile, N, M),
                               [AT](int p, int q) { return AT * (p * p + q * q); }, log_cap);
  if (est.blown_up) throw BlowUpError(est.worst_p, est.worst_q, est.max_log_magnitude);
  return est;
}

Estimate qbv_estimator(const NoisyDataset& dataset, const DiffusionProfile& profile, double epsilon, int P_max,
                       int Q_max) {
  if (!(epsilon > 0.0)) throw ConfigError("qbv_estimator: epsilon must be positive");
  check_caps(dataset.grid, P_max, Q_max, "qbv_estimator");
  require_profile_covers(dataset, profile);
  const double AT = profile.cumulative(dataset.time_grid.horizon());
  return from_log_gain(
      residual_block(dataset, profile, P_max, Q_max),
      [AT, epsilon](int p, int q) {
        const double pp = static_cast<double>(p * p + q * q);
        return -std::log(epsilon * pp + std::exp(-AT * pp));
      },
      kRepresentableLog);
}

Estimate classical_estimator(const NoisyDataset& dataset, const DiffusionProfile& profile, int P_max, int Q_max,
                             double log_cap) {
  check_caps(dataset.grid, P_max, Q_max, "classical_estimator");
  require_profile_covers(dataset, profile);
  const double AT = profile.cumulative(dataset.time_grid.horizon());
  return from_log_gain(residual_block(dataset, profile, P_max, Q_max),
                       [AT](int p, int q) { return AT * (p * p + q * q); }, log_cap);
}

double rmse(const Matrix& estimate, const Matrix& truth) {
  require_same_shape(estimate, truth, "rmse");
  if (truth.size() == 0) throw ShapeError("rmse: empty fields");
  return std::sqrt(kernels::sum_sq_diff(estimate.flat(), truth.flat()) / static_cast<double>(truth.size()));
}

double log_rmse(const Estimate& estimate, const GridSpec& grid, const Matrix& truth) {
  const double s = std::max(0.0, estimate.max_log_magnitude);
  const double rel = std::exp(estimate.log_scale - s);
  Matrix coeffs = estimate.scaled;
  for (double& c : coeffs.flat()) c *= rel;
  const Matrix field = SineTransform(grid, estimate.P(), estimate.Q()).synthesize(coeffs);
  Matrix target = truth;
  const double down = std::exp(-s);
  for (double& v : target.flat()) v *= down;
  return s + std::log(rmse(field, target));
}

double discretization_bias_direct(const std::function<double(double, double)>& field,
                                  const std::function<double(int, int)>& coeff_oracle, const GridSpec& grid, int p,
                                  int q) {
  Matrix samples(static_cast<std::size_t>(grid.n()), static_cast<std::size_t>(grid.m()));
  for (int i = 0; i < grid.n(); ++i)
    for (int j = 0; j < grid.m(); ++j) samples(i, j) = field(grid.nodes_x()[i], grid.nodes_y()[j]);
  return discrete_coefficient(samples, grid, p, q) - coeff_oracle(p, q);
}

double bias_tail_series(const std::function<double(int, int)>& c, int n, int m, int p, int q, int k_cap,
                        int l_cap) {
  if (p < 1 || q < 1 || p >= n || q >= m) throw ModeRangeError("bias_tail_series: mode outside [1,n-1]x[1,m-1]");
  if (k_cap < 0 || l_cap < 0) throw ConfigError("bias_tail_series: caps must be non-negative");
  auto sgn = [](int k) { return (k % 2 == 0) ? 1.0 : -1.0; };

  double P = 0.0;
  for (int k = 1; k <= k_cap; ++k) P += sgn(k) * (c(2 * k * n + p, q) - c(2 * k * n - p, q));
  double Q = 0.0;
  for (int l = 1; l <= l_cap; ++l) Q += sgn(l) * (c(p, 2 * l * m + q) - c(p, 2 * l * m - q));
  double R = 0.0;
  for (int k = 1; k <= k_cap; ++k) {
    const int kp = 2 * k * n + p;
    const int km = 2 * k * n - p;
    for (int l = 1; l <= l_cap; ++l) {
      const int lp = 2 * l * m + q;
      const int lm = 2 * l * m - q;
      R += sgn(k + l) * (c(kp, lp) - c(kp, lm) - c(km, lp) + c(km, lm));
    }
  }
  return P + Q + R;
}

double SmoothnessClass::weighted_norm_sq(const CoefficientField& coeffs) const {
  double sum = 0.0;
  for (int p = 1; p <= coeffs.P(); ++p) {
    for (int q = 1; q <= coeffs.Q(); ++q) {
      const double c = coeffs.at(p, q);
      sum += std::pow(p, 2.0 * alpha) * std::pow(q, 2.0 * beta) * c * c;
    }
  }
  return sum;
}

ParsevalSplit parseval_error_split(const CoefficientField& estimate, const std::function<double(int, int)>& truth,
                                   int cap) {
  if (cap < std::max(estimate.P(), estimate.Q())) throw ConfigError("parseval_error_split: cap below estimate block");
  ParsevalSplit out;
  for (int p = 1; p <= cap; ++p) {
    for (int q = 1; q <= cap; ++q) {
      const double t = truth(p, q);
      const double e = estimate.get_or_zero(p, q);
      const bool inside = p <= estimate.P() && q <= estimate.Q();
      if (inside) {
        out.inside += (e - t) * (e - t);
      } else {
        out.outside += t * t;
      }
      out.total += (e - t) * (e - t);
    }
  }
  return out;
}

}  // namespace bheat
