#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "gsure/error.hpp"
#include "gsure/frame.hpp"

namespace gsure {

inline constexpr double kMaxBeta = 100.0;

namespace detail {

inline double ratio_pow(double r, double beta) {
  if (beta == 2.0) return r * r;
  if (beta == 1.0) return r;
  return std::pow(r, beta);
}

inline void check_shrinkage_params(double t, double beta) {
  if (!(t >= 0.0)) throw InvalidArgument("threshold must be >= 0");
  if (!(beta >= 1.0 && beta <= kMaxBeta)) throw InvalidArgument("beta must lie in [1, 100]");
}

// Unchecked kernels; callers validate t and beta once.
inline double js_value(double x, double t, double beta) {
  if (t == 0.0) return x;
  const double ax = std::abs(x);
  if (ax <= t) return 0.0;
  return x * (1.0 - ratio_pow(t / ax, beta));
}

inline double js_slope(double x, double t, double beta) {
  if (t == 0.0) return 1.0;
  const double ax = std::abs(x);
  if (ax < t) return 0.0;
  if (ax == t) return beta;
  return 1.0 + (beta - 1.0) * ratio_pow(t / ax, beta);
}

}  // namespace detail

/// James-Stein type shrinkage tau(x, t) = x max{1 - t^beta |x|^-beta, 0}.
/// beta = 1 is soft thresholding; beta = 2 the classical James-Stein rule.
inline double js_threshold(double x, double t, double beta = 2.0) {
  detail::check_shrinkage_params(t, beta);
  return detail::js_value(x, t, beta);
}

/// d tau / dx: 0 for |x| < t, 1 + (beta - 1) t^beta |x|^-beta for |x| > t.
/// At the kink |x| = t the right limit beta is returned; t = 0 gives 1.
inline double js_derivative(double x, double t, double beta = 2.0) {
  detail::check_shrinkage_params(t, beta);
  return detail::js_slope(x, t, beta);
}

struct ThresholdPolicy {
  double beta = 2.0;
  std::vector<double> thresholds;  // one per scale, may be +inf
  int grid_percentiles = 100;
};

/// Candidate thresholds for one scale: the 0, 100/P, ..., 100 percentiles of
/// |F~_i| (nearest rank, no interpolation) plus the sentinels 0 and +inf,
/// sorted strictly ascending.
inline std::vector<double> candidate_grid(std::span<const double> block, int P = 100) {
  if (block.empty()) throw InvalidArgument("candidate_grid: empty coefficient block");
  if (P < 1) throw InvalidArgument("candidate_grid: need P >= 1");
  std::vector<double> mags(block.size());
  std::transform(block.begin(), block.end(), mags.begin(), [](double v) { return std::abs(v); });
  std::sort(mags.begin(), mags.end());
  std::vector<double> grid;
  grid.reserve(P + 3);
  grid.push_back(0.0);
  const double last = static_cast<double>(mags.size() - 1);
  for (int k = 0; k <= P; ++k) {
    const auto idx = static_cast<std::size_t>(std::llround(k * last / P));
    grid.push_back(mags[idx]);
  }
  grid.push_back(std::numeric_limits<double>::infinity());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

/// Additive SURE contribution of one scale for threshold t, evaluated
/// coefficient by coefficient: sum_i (h_i - F~_i)^2 + 2 sigma^2 gamma_ii^2 h_i'.
inline double scale_sure(std::span<const double> block, std::span<const double> gamma_diag, double t, double sigma,
                         double beta) {
  detail::check_shrinkage_params(t, beta);
  double acc = 0.0;
  const double s2 = sigma * sigma;
  for (std::size_t i = 0; i < block.size(); ++i) {
    const double r = detail::js_value(block[i], t, beta) - block[i];
    acc += r * r + 2.0 * s2 * gamma_diag[i] * detail::js_slope(block[i], t, beta);
  }
  return acc;
}

namespace detail {

// Per-scale minimiser over the candidate grid. Coefficients are visited in
// ascending |x| so that everything below the threshold is a prefix sum.
inline double select_scale_threshold(std::span<const double> block, std::span<const double> gamma, double sigma,
                                     double beta, int P) {
  const std::size_t m = block.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(block[a]) < std::abs(block[b]); });
  std::vector<double> mag(m), sq_prefix(m + 1, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    mag[r] = std::abs(block[order[r]]);
    sq_prefix[r + 1] = sq_prefix[r] + block[order[r]] * block[order[r]];
  }
  const double s2 = sigma * sigma;

  double best_t = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (double t : candidate_grid(block, P)) {
    double sure;
    if (std::isinf(t)) {
      sure = sq_prefix[m];
    } else {
      const std::size_t lo = static_cast<std::size_t>(std::lower_bound(mag.begin(), mag.end(), t) - mag.begin());
      const std::size_t hi = static_cast<std::size_t>(std::upper_bound(mag.begin(), mag.end(), t) - mag.begin());
      // |x| < t: killed, slope 0. |x| == t: killed, slope at the kink.
      sure = sq_prefix[lo];
      const double kink_slope = t == 0.0 ? 1.0 : beta;
      for (std::size_t r = lo; r < hi; ++r) {
        const double x = block[order[r]];
        sure += (t == 0.0 ? 0.0 : x * x) + 2.0 * s2 * gamma[order[r]] * kink_slope;
      }
      for (std::size_t r = hi; r < m; ++r) {
        const double x = block[order[r]];
        const double ratio = ratio_pow(t / mag[r], beta);
        const double shrink = x * ratio;
        sure += shrink * shrink + 2.0 * s2 * gamma[order[r]] * (1.0 + (beta - 1.0) * ratio);
      }
    }
    if (sure < best) {
      best = sure;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace detail

/// Level-dependent threshold selection: for each scale independently, the
/// candidate minimising that scale's SURE contribution (ties go to the
/// smaller threshold).
inline ThresholdPolicy select_thresholds_sure(const FrameCoefficients& noisy, std::span<const double> weights_diag,
                                              double sigma, double beta = 2.0, int P = 100) {
  if (!(sigma > 0.0)) throw InvalidArgument("select_thresholds_sure: sigma must be > 0");
  if (weights_diag.size() != noisy.size())
    throw InvalidArgument("select_thresholds_sure: weight vector does not match coefficients");
  detail::check_shrinkage_params(0.0, beta);
  ThresholdPolicy policy;
  policy.beta = beta;
  policy.grid_percentiles = P;
  const std::size_t n = noisy.num_nodes();
  for (std::size_t j = 0; j < noisy.num_scales(); ++j) {
    policy.thresholds.push_back(
        detail::select_scale_threshold(noisy.scale(j), weights_diag.subspan(j * n, n), sigma, beta, P));
  }
  return policy;
}

struct ThresholdedCoefficients {
  FrameCoefficients coefficients;
  Vector derivatives;  // dh_i / dF~_i
};

inline ThresholdedCoefficients apply_policy(const FrameCoefficients& noisy, const ThresholdPolicy& policy) {
  if (policy.thresholds.size() != noisy.num_scales())
    throw InvalidArgument("apply_policy: policy has one threshold per scale; count does not match");
  for (double t : policy.thresholds) detail::check_shrinkage_params(t, policy.beta);
  ThresholdedCoefficients out{FrameCoefficients(noisy.num_nodes(), noisy.num_scales()), Vector(noisy.size())};
  const std::size_t n = noisy.num_nodes();
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    const double t = policy.thresholds[i / n];
    out.coefficients[i] = detail::js_value(noisy[i], t, policy.beta);
    out.derivatives[i] = detail::js_slope(noisy[i], t, policy.beta);
  }
  return out;
}

}  // namespace gsure
