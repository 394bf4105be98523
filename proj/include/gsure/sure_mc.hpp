#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "gsure/error.hpp"
#include "gsure/frame.hpp"

namespace gsure {

enum class ProbeDistribution { rademacher, gaussian };

inline std::string_view to_string(ProbeDistribution d) {
  return d == ProbeDistribution::rademacher ? "rademacher" : "gaussian";
}

inline std::optional<ProbeDistribution> parse_probe_distribution(std::string_view s) {
  if (s == "rademacher") return ProbeDistribution::rademacher;
  if (s == "gaussian" || s == "normal") return ProbeDistribution::gaussian;
  return std::nullopt;
}

/// Moments of eps^2 entering the variance formulas: V[eps^2] and E[eps^2]^2.
struct ProbeMoments {
  double var_of_square;
  double mean_square_squared;
};

inline ProbeMoments probe_moments(ProbeDistribution d) {
  return d == ProbeDistribution::rademacher ? ProbeMoments{0.0, 1.0} : ProbeMoments{2.0, 1.0};
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of probe k derived from (seed, k) alone, so probes can be drawn in any
/// order and N can be extended without redrawing earlier samples.
inline std::uint64_t probe_seed(std::uint64_t seed, std::uint64_t k) {
  return splitmix64(seed ^ splitmix64(k ^ 0xa0761d6478bd642fULL));
}

/// k-th random probe of length n: i.i.d. entries with mean 0 and variance 1.
inline Vector draw_probe(std::size_t n, ProbeDistribution dist, std::uint64_t seed, std::uint64_t k) {
  Vector eps(n);
  std::mt19937_64 rng(probe_seed(seed, k));
  if (dist == ProbeDistribution::rademacher) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng();
      eps[i] = (bits & 1) ? 1.0 : -1.0;
      bits >>= 1;
    }
  } else {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : eps) v = normal(rng);
  }
  return eps;
}

/// Anything that maps a length-n signal to n (J+1) frame coefficients.
template <class T>
concept AnalysisOperator = requires(const T& t, std::span<const double> f) {
  { t.forward(f) } -> std::same_as<FrameCoefficients>;
  { t.num_nodes() } -> std::convertible_to<std::size_t>;
  { t.num_scales() } -> std::convertible_to<std::size_t>;
  { t.fingerprint() } -> std::convertible_to<std::string>;
};

/// Analysis operator given by an explicit n (J+1) x n matrix.
class DenseAnalysis {
 public:
  explicit DenseAnalysis(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.cols() == 0 || matrix_.rows() % matrix_.cols() != 0)
      throw InvalidArgument("DenseAnalysis: row count must be a multiple of the column count");
  }
  std::size_t num_nodes() const { return static_cast<std::size_t>(matrix_.cols()); }
  std::size_t num_scales() const { return static_cast<std::size_t>(matrix_.rows() / matrix_.cols()); }
  std::string fingerprint() const { return "dense"; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  FrameCoefficients forward(std::span<const double> f) const {
    if (f.size() != num_nodes()) throw InvalidArgument("DenseAnalysis: signal length mismatch");
    const Eigen::VectorXd c = matrix_ * Eigen::Map<const Eigen::VectorXd>(f.data(), f.size());
    return FrameCoefficients(num_nodes(), num_scales(), Vector(c.data(), c.data() + c.size()));
  }

 private:
  Eigen::MatrixXd matrix_;
};

/// Monte-Carlo estimate of the diagonal SURE weights gamma_ii^2 = (W W^*)_ii.
struct WeightEstimate {
  Vector diag;
  std::size_t num_nodes = 0;
  std::size_t num_scales = 0;
  std::size_t num_samples = 0;
  ProbeDistribution distribution = ProbeDistribution::rademacher;
  std::uint64_t seed = 0;
  std::string fingerprint;
};

/// Adds sum_k (W eps_k)_i^2 over probes k in [k_begin, k_end) to `sums`.
template <AnalysisOperator Analysis>
void accumulate_diagonal_weights(const Analysis& transform, ProbeDistribution dist, std::uint64_t seed,
                                 std::uint64_t k_begin, std::uint64_t k_end, std::span<double> sums) {
  const std::size_t n = transform.num_nodes();
  if (sums.size() != n * transform.num_scales())
    throw InvalidArgument("accumulate_diagonal_weights: accumulator has the wrong length");
  for (std::uint64_t k = k_begin; k < k_end; ++k) {
    const FrameCoefficients c = transform.forward(draw_probe(n, dist, seed, k));
    for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += c[i] * c[i];
  }
}

/// gamma^_ii^2 = (1/N) sum_k (W eps_k)_i^2. Unbiased for the weights of
/// whichever transform is passed in (exact or Chebyshev-approximated).
template <AnalysisOperator Analysis>
WeightEstimate estimate_diagonal_weights(const Analysis& transform, std::size_t num_samples, ProbeDistribution dist,
                                         std::uint64_t seed) {
  if (num_samples < 1) throw InvalidArgument("estimate_diagonal_weights: need N >= 1 samples");
  WeightEstimate est;
  est.num_nodes = transform.num_nodes();
  est.num_scales = transform.num_scales();
  est.num_samples = num_samples;
  est.distribution = dist;
  est.seed = seed;
  est.fingerprint = transform.fingerprint();
  est.diag.assign(est.num_nodes * est.num_scales, 0.0);
  accumulate_diagonal_weights(transform, dist, seed, 0, num_samples, est.diag);
  for (double& v : est.diag) v /= static_cast<double>(num_samples);
  return est;
}

/// Full symmetric matrix gamma^_ij^2 = (1/N) sum_k (W eps_k)_i (W eps_k)_j.
/// Only for n (J+1) <= max_size.
template <AnalysisOperator Analysis>
Eigen::MatrixXd estimate_full_weights(const Analysis& transform, std::size_t num_samples, ProbeDistribution dist,
                                      std::uint64_t seed, std::size_t max_size = 2000) {
  if (num_samples < 1) throw InvalidArgument("estimate_full_weights: need N >= 1 samples");
  const std::size_t n = transform.num_nodes();
  const std::size_t size = n * transform.num_scales();
  if (size > max_size)
    throw InvalidArgument("estimate_full_weights: n (J + 1) = " + std::to_string(size) + " exceeds the cap of " +
                          std::to_string(max_size));
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(size, size);
  for (std::uint64_t k = 0; k < num_samples; ++k) {
    const FrameCoefficients c = transform.forward(draw_probe(n, dist, seed, k));
    for (std::size_t j = 0; j < size; ++j)
      for (std::size_t i = 0; i <= j; ++i) acc(i, j) += c[i] * c[j];
  }
  const double inv = 1.0 / static_cast<double>(num_samples);
  for (std::size_t j = 0; j < size; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      acc(i, j) *= inv;
      acc(j, i) = acc(i, j);
    }
  }
  return acc;
}

/// gamma_ij^2 = (W W^T)_ij from a dense frame matrix.
inline Eigen::MatrixXd exact_weights(const Eigen::MatrixXd& frame) { return frame * frame.transpose(); }

/// SURE of a coordinate-wise thresholding h applied to F~:
///   -n sigma^2 + ||h(F~) - F~||^2 + 2 sigma^2 sum_i gamma_ii^2 dh_i/dF~_i.
inline double sure_value(const FrameCoefficients& noisy, const FrameCoefficients& thresholded,
                         std::span<const double> derivs, double sigma, std::span<const double> weights_diag) {
  const std::size_t size = noisy.size();
  if (thresholded.size() != size || derivs.size() != size || weights_diag.size() != size)
    throw InvalidArgument("sure_value: all inputs must have length n (J + 1)");
  if (!(sigma > 0.0)) throw InvalidArgument("sure_value: sigma must be > 0");
  double fidelity = 0.0, divergence = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double r = thresholded[i] - noisy[i];
    fidelity += r * r;
    divergence += weights_diag[i] * derivs[i];
  }
  const double s2 = sigma * sigma;
  return -static_cast<double>(noisy.num_nodes()) * s2 + fidelity + 2.0 * s2 * divergence;
}

/// Closed-form variance of gamma^_ij^2 for N probes of distribution `dist`:
///   (1/N) { V[eps^2] sum_p W_ip^2 W_jp^2
///           + E[eps^2]^2 sum_{p != q} (W_ip^2 W_jq^2 + W_ip W_iq W_jp W_jq) }.
/// On the diagonal (i = j) the bracket is V[eps^2] sum_p W_ip^4 + 2 sum_{p != q} W_ip^2 W_iq^2.
inline double gamma_variance_exact(const Eigen::MatrixXd& frame, ProbeDistribution dist, std::size_t num_samples,
                                   std::size_t i, std::size_t j) {
  if (num_samples < 1) throw InvalidArgument("gamma_variance_exact: need N >= 1");
  if (i >= static_cast<std::size_t>(frame.rows()) || j >= static_cast<std::size_t>(frame.rows()))
    throw InvalidArgument("gamma_variance_exact: index out of range");
  const ProbeMoments mom = probe_moments(dist);
  // With c_p = W_ip W_jp: sum_{p != q} c_p c_q = (sum c)^2 - sum c^2, and
  // sum_{p != q} W_ip^2 W_jq^2 = (sum W_i.^2)(sum W_j.^2) - sum c^2.
  double sum = 0.0, sum_sq = 0.0, norm_i = 0.0, norm_j = 0.0;
  for (Eigen::Index p = 0; p < frame.cols(); ++p) {
    const double c = frame(i, p) * frame(j, p);
    sum += c;
    sum_sq += c * c;
    norm_i += frame(i, p) * frame(i, p);
    norm_j += frame(j, p) * frame(j, p);
  }
  const double cross = (norm_i * norm_j - sum_sq) + (sum * sum - sum_sq);
  return (mom.var_of_square * sum_sq + mom.mean_square_squared * cross) / static_cast<double>(num_samples);
}

/// Closed-form conditional variance of the plug-in SURE given F~, for a
/// general Jacobian `derivs` (derivs(i, j) = dh_i / dF~_j).
///
/// With M = W^T A W (A = derivs), the quadruple sum collapses to
///   (4 sigma^4 / N) { V[eps^2] sum_p M_pp^2 + E[eps^2]^2 sum_{p != q} (M_pq M_qp + M_pq^2) }.
inline double sure_variance_exact(const Eigen::MatrixXd& frame, const Eigen::MatrixXd& derivs, double sigma,
                                  ProbeDistribution dist, std::size_t num_samples, std::size_t max_size = 2000) {
  if (num_samples < 1) throw InvalidArgument("sure_variance_exact: need N >= 1");
  if (derivs.rows() != frame.rows() || derivs.cols() != frame.rows())
    throw InvalidArgument("sure_variance_exact: Jacobian must be n (J + 1) square");
  if (static_cast<std::size_t>(frame.rows()) > max_size)
    throw InvalidArgument("sure_variance_exact: n (J + 1) exceeds the oracle cap");
  const ProbeMoments mom = probe_moments(dist);
  const Eigen::MatrixXd m = frame.transpose() * derivs * frame;
  double diag = 0.0, off = 0.0;
  for (Eigen::Index p = 0; p < m.rows(); ++p) {
    diag += m(p, p) * m(p, p);
    for (Eigen::Index q = 0; q < m.cols(); ++q)
      if (p != q) off += m(p, q) * m(q, p) + m(p, q) * m(p, q);
  }
  const double s2 = sigma * sigma;
  return 4.0 * s2 * s2 / static_cast<double>(num_samples) * (mom.var_of_square * diag + mom.mean_square_squared * off);
}

}  // namespace gsure
