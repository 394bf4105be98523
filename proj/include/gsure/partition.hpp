#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gsure/error.hpp"
#include "gsure/laplacian.hpp"

namespace gsure {

/// Shape of the transition of the plateau function omega on (1/b, 1].
enum class PlateauKind {
  piecewise_linear,  // affine ramp from 1 down to 0
  smooth,            // C-infinity ramp built from h_c
};

inline std::string_view to_string(PlateauKind k) {
  return k == PlateauKind::piecewise_linear ? "linear" : "smooth";
}

inline std::optional<PlateauKind> parse_plateau_kind(std::string_view s) {
  if (s == "linear" || s == "piecewise-linear") return PlateauKind::piecewise_linear;
  if (s == "smooth" || s == "hc") return PlateauKind::smooth;
  return std::nullopt;
}

namespace detail {

// f(x) = exp(-1/x) for x > 0. Flushed to 0 below 1e-12 where it underflows anyway.
inline double bump_exp(double x) { return x > 1e-12 ? std::exp(-1.0 / x) : 0.0; }

// g_c(x) = f(x) / (f(x) + f(c - x)); 0 for x <= 0 and 1 for x >= c.
inline double smooth_step(double x, double c) {
  const double a = bump_exp(x);
  const double b = bump_exp(c - x);
  return a / (a + b);
}

}  // namespace detail

/// h_c(x) = g_c(x + 1) g_c(1 - x). Equal to 1 on [0, 1 - c] and 0 beyond 1
/// for c in (0, 1].
inline double smooth_plateau(double x, double c) {
  return detail::smooth_step(x + 1.0, c) * detail::smooth_step(1.0 - x, c);
}

/// Plateau function: 1 on [0, 1/b], 0 beyond 1, decreasing in between.
///
/// The smooth kind evaluates h_c on the transition band rescaled to [0, 1],
/// i.e. omega(x) = h_c((x - 1/b) / (1 - 1/b)), so that both kinds share the
/// same plateau and support.
inline double omega(double x, PlateauKind kind, double b, double c = 1.0) {
  const double inv_b = 1.0 / b;
  if (x <= inv_b) return 1.0;
  if (x > 1.0) return 0.0;
  if (kind == PlateauKind::piecewise_linear) {
    const double v = (b / (1.0 - b)) * x + b / (b - 1.0);
    return std::clamp(v, 0.0, 1.0);
  }
  return smooth_plateau((x - inv_b) / (1.0 - inv_b), c);
}

/// Finite partition of unity psi_0..psi_J on [0, lambda_ub] generated by
/// dilations of omega:
///   psi_0(x) = omega(x),  psi_j(x) = omega(b^{-j} x) - omega(b^{-j+1} x),
/// with J = floor(log(lambda_ub) / log(b)) + 2 (clamped at 0).
class PartitionOfUnity {
 public:
  PartitionOfUnity(PlateauKind kind, double b, double lambda_ub, double c = 1.0)
      : kind_(kind), b_(b), c_(c), lambda_ub_(lambda_ub) {
    if (!(b > 1.0) || !std::isfinite(b)) throw InvalidArgument("PartitionOfUnity: b must be > 1");
    if (!(lambda_ub > 0.0) || !std::isfinite(lambda_ub))
      throw InvalidArgument("PartitionOfUnity: lambda_ub must be finite and > 0");
    if (kind == PlateauKind::smooth && !(c > 0.0 && c <= 1.0))
      throw InvalidArgument("PartitionOfUnity: smoothness c must lie in (0, 1]");
    const double raw = std::floor(std::log(lambda_ub) / std::log(b)) + 2.0;
    max_scale_ = raw < 0.0 ? 0 : static_cast<int>(raw);
    inv_powers_.resize(max_scale_ + 1);
    for (int j = 0; j <= max_scale_; ++j) inv_powers_[j] = std::pow(b, -j);
  }

  /// Same as the constructor, additionally enforcing b in (1, 2] for the
  /// normalized and random-walk variants (spectrum inside [0, 2]).
  static PartitionOfUnity for_operator(const LaplacianOperator& op, PlateauKind kind, double b, double c = 1.0) {
    if (op.variant() != LaplacianVariant::unnormalized && !(b > 1.0 && b <= 2.0))
      throw InvalidArgument("PartitionOfUnity: b must lie in (1, 2] for the " + std::string(to_string(op.variant())) +
                            " Laplacian");
    return PartitionOfUnity(kind, b, op.lambda_ub(), c);
  }

  PlateauKind kind() const { return kind_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double lambda_ub() const { return lambda_ub_; }
  /// J, the largest scale index.
  int max_scale() const { return max_scale_; }
  std::size_t num_scales() const { return static_cast<std::size_t>(max_scale_) + 1; }

  double omega(double x) const { return gsure::omega(x, kind_, b_, c_); }

  double psi(int j, double x) const {
    if (j < 0 || j > max_scale_)
      throw InvalidArgument("psi: scale index " + std::to_string(j) + " outside [0, " + std::to_string(max_scale_) +
                            "]");
    if (j == 0) return omega(x);
    const double v = omega(inv_powers_[j] * x) - omega(inv_powers_[j - 1] * x);
    return std::clamp(v, 0.0, 1.0);
  }

  double sqrt_psi(int j, double x) const { return std::sqrt(psi(j, x)); }

  /// Stable textual identity used in cache keys and file headers.
  std::string fingerprint() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(kind_) << ";b=" << b_;
    if (kind_ == PlateauKind::smooth) os << ";c=" << c_;
    os << ";lambda_ub=" << lambda_ub_ << ";J=" << max_scale_;
    return os.str();
  }

 private:
  PlateauKind kind_;
  double b_;
  double c_;
  double lambda_ub_;
  int max_scale_ = 0;
  std::vector<double> inv_powers_;
};

}  // namespace gsure
