#include "bheat/heat_model.hpp"

#include <algorithm>
#include <cmath>
// Boost 1.74 pchip calls isnan unqualified; <math.h> puts it in the global namespace.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>
#include <sstream>
#include <stdexcept>

#include "bheat/errors.hpp"

namespace bheat {

DiffusionProfile DiffusionProfile::constant(double c, double horizon) {
  if (!(c > 0.0)) throw ConfigError("constant diffusion coefficient must be positive");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  DiffusionProfile prof;
  prof.kind_ = Kind::constant;
  prof.c_ = c;
  prof.horizon_ = horizon;
  prof.compute_bounds();
  return prof;
}

DiffusionProfile DiffusionProfile::linear_ex1(double horizon) {
  if (!(horizon > 0.0) || horizon >= 2.0) throw ConfigError("a(t) = 2 - t needs 0 < T < 2");
  DiffusionProfile prof;
  prof.kind_ = Kind::linear_ex1;
  prof.horizon_ = horizon;
  prof.compute_bounds();
  return prof;
}

DiffusionProfile DiffusionProfile::exp_ex2(double horizon) {
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  DiffusionProfile prof;
  prof.kind_ = Kind::exp_ex2;
  prof.horizon_ = horizon;
  prof.compute_bounds();
  return prof;
}

DiffusionProfile DiffusionProfile::tabulated(std::vector<double> times, std::vector<double> rates) {
  if (times.size() != rates.size()) throw ConfigError("tabulated profile: length mismatch");
  if (times.size() < 4) throw ConfigError("tabulated profile: need at least 4 samples");
  if (times.front() != 0.0) throw ConfigError("tabulated profile: first sample must be at t = 0");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw ConfigError("tabulated profile: times must increase strictly");
  }
  for (double a : rates) {
    if (!(a > 0.0)) throw ConfigError("tabulated profile: rates must be positive");
  }

  DiffusionProfile prof;
  prof.kind_ = Kind::tabulated;
  prof.horizon_ = times.back();
  prof.times_ = times;
  prof.rates_ = rates;
  auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
      std::move(times), std::move(rates));
  prof.interpolant_ = std::make_shared<const std::function<double(double)>>(
      [spline](double t) { return (*spline)(t); });
  prof.compute_bounds();
  if (!(prof.a1_ > 0.0)) throw ConfigError("tabulated profile: interpolant is not positive");
  return prof;
}

void DiffusionProfile::compute_bounds() {
  switch (kind_) {
    case Kind::constant:
      a1_ = a2_ = c_;
      break;
    case Kind::linear_ex1:
      a1_ = 2.0 - horizon_;
      a2_ = 2.0;
      break;
    case Kind::exp_ex2:
      a1_ = 0.5 * std::exp(-horizon_);
      a2_ = 0.5;
      break;
    case Kind::tabulated: {
      constexpr int kSamples = 4096;
      a1_ = a2_ = rate(0.0);
      for (int k = 1; k <= kSamples; ++k) {
        const double a = rate(horizon_ * k / kSamples);
        a1_ = std::min(a1_, a);
        a2_ = std::max(a2_, a);
      }
      break;
    }
  }
}

double DiffusionProfile::rate(double t) const {
  switch (kind_) {
    case Kind::constant:
      return c_;
    case Kind::linear_ex1:
      return 2.0 - t;
    case Kind::exp_ex2:
      return 0.5 * std::exp(-t);
    case Kind::tabulated:
      return (*interpolant_)(std::clamp(t, 0.0, horizon_));
  }
  return 0.0;
}

double DiffusionProfile::cumulative(double t) const {
  if (!(t >= 0.0 && t <= horizon_ * (1.0 + 1e-12))) {
    throw std::out_of_range("cumulative diffusion requested outside [0, T]");
  }
  t = std::min(t, horizon_);
  switch (kind_) {
    case Kind::constant:
      return c_ * t;
    case Kind::linear_ex1:
      return 2.0 * t - 0.5 * t * t;
    case Kind::exp_ex2:
      return 0.5 * (1.0 - std::exp(-t));
    case Kind::tabulated:
      if (t == 0.0) return 0.0;
      return integrate_gl([this](double s) { return rate(s); }, 0.0, t, gauss_legendre_512());
  }
  return 0.0;
}

std::string DiffusionProfile::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::constant:
      os << "constant:" << c_;
      break;
    case Kind::linear_ex1:
      os << "linear_ex1";
      break;
    case Kind::exp_ex2:
      os << "exp_ex2";
      break;
    case Kind::tabulated:
      os << "tabulated(" << times_.size() << " samples)";
      break;
  }
  return os.str();
}

double cumulative_diffusion(const DiffusionProfile& profile, double t) { return profile.cumulative(t); }

double lambda_pq(const DiffusionProfile& profile, int p, int q, double t) {
  return std::exp(-profile.cumulative(t) * (p * p + q * q));
}

std::vector<double> cumulative_at_nodes(const DiffusionProfile& profile, const TimeGrid& grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid.points()) out.push_back(profile.cumulative(std::min(t, profile.horizon())));
  return out;
}

double forward_coefficient(const DiffusionProfile& profile, double theta_pq,
                           std::span<const double> f_pq, const TimeGrid& grid, int p, int q,
                           int t_index) {
  if (t_index < 0 || t_index > grid.segments()) throw std::out_of_range("forward_coefficient: bad time index");
  if (f_pq.size() != grid.size()) throw ShapeError("forward_coefficient: source series length mismatch");
  const double freq = static_cast<double>(p * p + q * q);
  const std::vector<double> A = cumulative_at_nodes(profile, grid);
  const auto k = static_cast<std::size_t>(t_index);
  const std::vector<double> w = grid.prefix_weights(t_index);

  double duhamel = 0.0;
  for (std::size_t j = 0; j <= k && t_index > 0; ++j) {
    duhamel += w[j] * std::exp(-(A[k] - A[j]) * freq) * f_pq[j];
  }
  return theta_pq * std::exp(-A[k] * freq) + duhamel;
}

Matrix ProblemInstance::sample_theta(const GridSpec& grid) const {
  Matrix out(static_cast<std::size_t>(grid.n()), static_cast<std::size_t>(grid.m()));
  for (int i = 0; i < grid.n(); ++i)
    for (int j = 0; j < grid.m(); ++j) out(i, j) = theta(grid.nodes_x()[i], grid.nodes_y()[j]);
  return out;
}

Matrix ProblemInstance::sample_h(const GridSpec& grid) const {
  Matrix out(static_cast<std::size_t>(grid.n()), static_cast<std::size_t>(grid.m()));
  for (int i = 0; i < grid.n(); ++i)
    for (int j = 0; j < grid.m(); ++j) out(i, j) = h(grid.nodes_x()[i], grid.nodes_y()[j]);
  return out;
}

Matrix ProblemInstance::sample_f(const GridSpec& grid, double t) const {
  Matrix out(static_cast<std::size_t>(grid.n()), static_cast<std::size_t>(grid.m()));
  for (int i = 0; i < grid.n(); ++i)
    for (int j = 0; j < grid.m(); ++j) out(i, j) = f(grid.nodes_x()[i], grid.nodes_y()[j], t);
  return out;
}

CoefficientField final_data_coefficients(const ProblemInstance& instance, int P, int Q,
                                         const TimeGrid& grid) {
  if (!instance.has_oracles()) {
    throw ConfigError("final_data_coefficients: problem '" + instance.name + "' has no coefficient oracles");
  }
  CoefficientField out(P, Q);
  std::vector<double> f_series(grid.size());
  for (int p = 1; p <= P; ++p) {
    for (int q = 1; q <= Q; ++q) {
      for (std::size_t k = 0; k < grid.size(); ++k) f_series[k] = instance.f_coeff(p, q, grid.points()[k]);
      out.set(p, q,
              forward_coefficient(instance.profile, instance.theta_coeff(p, q), f_series, grid, p, q,
                                  grid.segments()));
    }
  }
  return out;
}

namespace {

ProblemInstance example_one() {
  ProblemInstance inst;
  inst.name = "example1";
  inst.T = 1.0;
  inst.profile = DiffusionProfile::linear_ex1(1.0);
  inst.theta = [](double x, double y) { return 5.0 * std::sin(x) * std::sin(y); };
  inst.h = [](double x, double y) { return 4.0 * std::sin(x) * std::sin(y); };
  inst.f = [](double x, double y, double t) {
    return 2.0 * (t * t * t - 2.0 * t * t - 6.0 * t + 10.0) * std::sin(x) * std::sin(y);
  };
  // <sin x sin y, phi_{1,1}> = pi/2
  inst.theta_coeff = [](int p, int q) { return (p == 1 && q == 1) ? 5.0 * kPi / 2.0 : 0.0; };
  inst.h_coeff = [](int p, int q) { return (p == 1 && q == 1) ? 2.0 * kPi : 0.0; };
  inst.f_coeff = [](int p, int q, double t) {
    return (p == 1 && q == 1) ? kPi * (t * t * t - 2.0 * t * t - 6.0 * t + 10.0) : 0.0;
  };
  return inst;
}

// Example 2 coefficients. With phi_{p,1} and odd p:
//   <x(pi-x) sin y, phi_{p,1}> = 4/p^3,   <sin y, phi_{p,1}> = 2/p,
//   <sin 3x sin y, phi_{3,1}> = pi/2.
double example_two_theta_coeff(int p, int q) {
  if (q != 1 || p % 2 == 0) return 0.0;
  double c = 4.0 / (kPi * p * p * p);
  if (p == 3) c -= 0.5;
  return c;
}

ProblemInstance example_two() {
  ProblemInstance inst;
  inst.name = "example2";
  inst.T = 1.0;
  inst.profile = DiffusionProfile::exp_ex2(1.0);
  inst.theta = [](double x, double y) {
    return (x * (kPi - x) * std::sin(y) - std::sin(3.0 * x) * std::sin(y)) / kPi;
  };
  inst.h = [](double x, double y) {
    return std::exp(-1.0) * (x * (kPi - x) * std::sin(y) - std::sin(3.0 * x) * std::sin(y)) / kPi;
  };
  // f = u_t - a Lap u for u = e^{-t} theta:
  //   (e^{-t}/pi) [ (2a + (a-1) x(pi-x)) sin y + (1 - 10a) sin 3x sin y ]
  inst.f = [](double x, double y, double t) {
    const double a = 0.5 * std::exp(-t);
    return std::exp(-t) / kPi *
           ((2.0 * a + (a - 1.0) * x * (kPi - x)) * std::sin(y) +
            (1.0 - 10.0 * a) * std::sin(3.0 * x) * std::sin(y));
  };
  inst.theta_coeff = example_two_theta_coeff;
  inst.h_coeff = [](int p, int q) { return std::exp(-1.0) * example_two_theta_coeff(p, q); };
  inst.f_coeff = [](int p, int q, double t) {
    if (q != 1 || p % 2 == 0) return 0.0;
    const double a = 0.5 * std::exp(-t);
    const double e = std::exp(-t);
    double c = e / kPi * (2.0 * a * 2.0 / p + (a - 1.0) * 4.0 / (static_cast<double>(p) * p * p));
    if (p == 3) c += e / kPi * (1.0 - 10.0 * a) * kPi / 2.0;
    return c;
  };
  return inst;
}

double poly_eval(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}

}  // namespace

ProblemInstance builtin_example(int id) {
  switch (id) {
    case 1:
      return example_one();
    case 2:
      return example_two();
    default:
      throw ConfigError("unknown built-in example id " + std::to_string(id) + " (expected 1 or 2)");
  }
}

ProblemInstance modal_problem(const DiffusionProfile& profile, std::vector<ModalTerm> theta_modes,
                              std::vector<SourceTerm> source_modes) {
  for (const auto& t : theta_modes)
    if (t.p < 1 || t.q < 1) throw ConfigError("modal problem: mode indices must be >= 1");
  for (const auto& s : source_modes)
    if (s.p < 1 || s.q < 1) throw ConfigError("modal problem: mode indices must be >= 1");

  const double T = profile.horizon();
  const auto& rule = gauss_legendre_512();

  // Every mode that appears in theta or f gets an h coefficient.
  std::vector<ModalTerm> h_modes;
  auto find_theta = [&](int p, int q) {
    double v = 0.0;
    for (const auto& t : theta_modes)
      if (t.p == p && t.q == q) v += t.value;
    return v;
  };
  auto f_value = [source_modes](int p, int q, double t) {
    double v = 0.0;
    for (const auto& s : source_modes)
      if (s.p == p && s.q == q) v += poly_eval(s.poly, t);
    return v;
  };
  std::vector<std::pair<int, int>> modes;
  for (const auto& t : theta_modes) modes.emplace_back(t.p, t.q);
  for (const auto& s : source_modes) modes.emplace_back(s.p, s.q);
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
  const double AT = profile.cumulative(T);
  for (auto [p, q] : modes) {
    const double freq = static_cast<double>(p * p + q * q);
    const double duhamel = integrate_gl(
        [&](double s) { return std::exp(-(AT - profile.cumulative(s)) * freq) * f_value(p, q, s); }, 0.0, T,
        rule);
    h_modes.push_back({p, q, find_theta(p, q) * std::exp(-AT * freq) + duhamel});
  }

  auto series = [](std::vector<ModalTerm> terms) {
    return [terms = std::move(terms)](double x, double y) {
      double v = 0.0;
      for (const auto& t : terms) v += t.value * basis_eval(t.p, t.q, x, y);
      return v;
    };
  };
  auto lookup = [](std::vector<ModalTerm> terms) {
    return [terms = std::move(terms)](int p, int q) {
      double v = 0.0;
      for (const auto& t : terms)
        if (t.p == p && t.q == q) v += t.value;
      return v;
    };
  };

  ProblemInstance inst;
  inst.name = "modal";
  inst.T = T;
  inst.profile = profile;
  inst.theta = series(theta_modes);
  inst.h = series(h_modes);
  inst.theta_coeff = lookup(theta_modes);
  inst.h_coeff = lookup(h_modes);
  inst.f_coeff = f_value;
  inst.f = [source_modes](double x, double y, double t) {
    double v = 0.0;
    for (const auto& s : source_modes) v += poly_eval(s.poly, t) * basis_eval(s.p, s.q, x, y);
    return v;
  };
  return inst;
}

}  // namespace bheat
