#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string_view>

#include "gsure/error.hpp"
#include "gsure/graph.hpp"

namespace gsure {

enum class Mechanism { classical, analytic };

inline std::string_view to_string(Mechanism m) { return m == Mechanism::classical ? "classical" : "analytic"; }

inline std::optional<Mechanism> parse_mechanism(std::string_view s) {
  if (s == "classical") return Mechanism::classical;
  if (s == "analytic") return Mechanism::analytic;
  return std::nullopt;
}

struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 1e-6;
  double sensitivity = 1.0;  // l2 sensitivity
  Mechanism mechanism = Mechanism::analytic;
};

/// Standard normal CDF through the complementary error function, which keeps
/// full relative accuracy in the lower tail.
inline double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// sigma = Delta sqrt(2 log(1.25 / delta)) / epsilon. The guarantee is proven
/// for epsilon < 1; epsilon = 1 is accepted as the boundary case that is
/// commonly tabulated.
inline double classical_sigma(const PrivacyParams& p) {
  if (!(p.epsilon > 0.0 && p.epsilon <= 1.0))
    throw InvalidArgument("classical_sigma: epsilon must lie in (0, 1]");
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw InvalidArgument("classical_sigma: delta must lie in (0, 1)");
  if (!(p.sensitivity > 0.0)) throw InvalidArgument("classical_sigma: sensitivity must be > 0");
  return p.sensitivity * std::sqrt(2.0 * std::log(1.25 / p.delta)) / p.epsilon;
}

/// Left side of the analytic Gaussian mechanism condition, as a function of
/// the ratio s = sigma / Delta:
///   Phi(1/(2s) - eps s) - e^eps Phi(-1/(2s) - eps s).
inline double analytic_privacy_loss(double ratio, double epsilon) {
  const double a = 0.5 / ratio;
  const double b = epsilon * ratio;
  return gaussian_cdf(a - b) - std::exp(epsilon) * gaussian_cdf(-a - b);
}

/// Smallest sigma with analytic_privacy_loss(sigma / Delta) <= delta, by
/// bisection on sigma / Delta over [1e-6, 2 x classical bound]. The returned
/// sigma always satisfies the condition.
inline double analytic_sigma(const PrivacyParams& p, double tol = 1e-9) {
  if (!(p.epsilon > 0.0)) throw InvalidArgument("analytic_sigma: epsilon must be > 0");
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw InvalidArgument("analytic_sigma: delta must lie in (0, 1)");
  if (!(p.sensitivity > 0.0)) throw InvalidArgument("analytic_sigma: sensitivity must be > 0");
  if (!(tol > 0.0)) throw InvalidArgument("analytic_sigma: tol must be > 0");

  double lo = 1e-6;
  double hi = 2.0 * std::sqrt(2.0 * std::log(1.25 / p.delta)) / p.epsilon;
  const double f_lo = analytic_privacy_loss(lo, p.epsilon);
  const double f_hi = analytic_privacy_loss(hi, p.epsilon);
  if (!(f_lo > p.delta) || !(f_hi <= p.delta)) {
    std::ostringstream os;
    os << "analytic_sigma: bracket [" << lo << ", " << hi << "] (in units of Delta) does not straddle delta = "
       << p.delta << ": loss(lo) = " << f_lo << ", loss(hi) = " << f_hi;
    throw ComputationError(os.str());
  }
  // Stop once sigma is within tol and the loss at hi is within 1e-12 of delta,
  // or the bracket can no longer be split.
  while (hi - lo > tol * hi || p.delta - analytic_privacy_loss(hi, p.epsilon) > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (analytic_privacy_loss(mid, p.epsilon) <= p.delta)
      hi = mid;
    else
      lo = mid;
  }
  return hi * p.sensitivity;
}

inline double calibrate_sigma(const PrivacyParams& p) {
  return p.mechanism == Mechanism::classical ? classical_sigma(p) : analytic_sigma(p);
}

struct SanitizedSignal {
  Vector values;
  double sigma;
};

/// f~ = f + xi with xi ~ N(0, sigma^2 I), deterministic in `seed`. sigma is
/// returned with the signal: it is public and may be used downstream.
inline SanitizedSignal sanitize(std::span<const double> f, double sigma, std::uint64_t seed) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sanitize: sigma must be finite and > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  SanitizedSignal out{Vector(f.begin(), f.end()), sigma};
  for (double& v : out.values) v += noise(rng);
  return out;
}

}  // namespace gsure
