#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "gsure/error.hpp"
#include "gsure/frame.hpp"
#include "gsure/laplacian.hpp"
#include "gsure/partition.hpp"

namespace gsure {

/// Right end of the interval mapped onto [-1, 1] by the shifted operator
/// L~ = (2 / lambda_max) L - I. The degree-scaled variants use their fixed
/// spectral range [0, 2], i.e. L~ = L - I.
inline double chebyshev_domain(const LaplacianOperator& op) {
  return op.variant() == LaplacianVariant::unnormalized ? op.lambda_ub() : 2.0;
}

/// Chebyshev coefficients of rho~(y) = rho(lambda_max (y + 1) / 2) by
/// Chebyshev-Gauss quadrature on M nodes (default 4 (K + 1)):
///   theta_i = (2 - [i == 0]) / M * sum_m rho~(cos t_m) cos(i t_m),  t_m = pi (m - 1/2) / M.
inline std::vector<double> chebyshev_coefficients(const std::function<double(double)>& rho, double lambda_max, int K,
                                                  int M = 0) {
  if (K < 0) throw InvalidArgument("chebyshev_coefficients: K must be >= 0");
  if (M == 0) M = 4 * (K + 1);
  if (M < K + 1) throw InvalidArgument("chebyshev_coefficients: need M >= K + 1 quadrature nodes");
  if (!(lambda_max > 0.0)) throw InvalidArgument("chebyshev_coefficients: lambda_max must be > 0");

  std::vector<double> samples(M), angles(M);
  for (int m = 0; m < M; ++m) {
    angles[m] = std::numbers::pi * (m + 0.5) / M;
    const double x = 0.5 * lambda_max * (std::cos(angles[m]) + 1.0);
    samples[m] = rho(x);
    if (!std::isfinite(samples[m])) {
      std::ostringstream os;
      os << "chebyshev_coefficients: filter is not finite at x = " << x;
      throw ComputationError(os.str());
    }
  }
  std::vector<double> theta(K + 1, 0.0);
  for (int i = 0; i <= K; ++i) {
    double acc = 0.0;
    for (int m = 0; m < M; ++m) acc += samples[m] * std::cos(i * angles[m]);
    theta[i] = (i == 0 ? 1.0 : 2.0) * acc / M;
  }
  return theta;
}

/// Jackson damping factors
///   g_i = sin((i+1) a) / ((K+2) sin a) + (1 - (i+1)/(K+2)) cos(i a),  a = pi / (K+2).
inline std::vector<double> jackson_damping(int K) {
  if (K < 0) throw InvalidArgument("jackson_damping: K must be >= 0");
  const double a = std::numbers::pi / (K + 2);
  std::vector<double> g(K + 1);
  for (int i = 0; i <= K; ++i)
    g[i] = std::sin((i + 1) * a) / ((K + 2) * std::sin(a)) + (1.0 - (i + 1.0) / (K + 2)) * std::cos(i * a);
  return g;
}

/// Truncated (optionally Jackson-damped) Chebyshev expansion of a spectral filter.
class ChebyshevExpansion {
 public:
  ChebyshevExpansion(std::vector<double> theta, double lambda_max, bool jackson)
      : theta_(std::move(theta)), lambda_max_(lambda_max), jackson_(jackson) {
    if (theta_.empty()) throw InvalidArgument("ChebyshevExpansion: need at least one coefficient");
    effective_ = theta_;
    if (jackson_) {
      const auto g = jackson_damping(degree());
      for (std::size_t i = 0; i < effective_.size(); ++i) effective_[i] *= g[i];
    }
  }

  int degree() const { return static_cast<int>(theta_.size()) - 1; }
  double lambda_max() const { return lambda_max_; }
  bool jackson() const { return jackson_; }
  /// Undamped coefficients theta_0..theta_K.
  const std::vector<double>& theta() const { return theta_; }
  /// Coefficients actually applied (damped when Jackson is on).
  const std::vector<double>& coefficients() const { return effective_; }

  /// Scalar value of the approximating polynomial at x in [0, lambda_max].
  double evaluate(double x) const {
    const double y = 2.0 * x / lambda_max_ - 1.0;
    double t_prev = 1.0, t_cur = y;
    double acc = effective_[0];
    if (degree() >= 1) acc += effective_[1] * y;
    for (int k = 2; k <= degree(); ++k) {
      const double t_next = 2.0 * y * t_cur - t_prev;
      acc += effective_[k] * t_next;
      t_prev = t_cur;
      t_cur = t_next;
    }
    return acc;
  }

 private:
  std::vector<double> theta_;
  std::vector<double> effective_;
  double lambda_max_;
  bool jackson_;
};

inline ChebyshevExpansion make_expansion(const std::function<double(double)>& rho, double lambda_max, int K,
                                         bool jackson, int M = 0) {
  return ChebyshevExpansion(chebyshev_coefficients(rho, lambda_max, K, M), lambda_max, jackson);
}

namespace detail {

inline void check_domain(const LaplacianOperator& op, const ChebyshevExpansion& e) {
  const double expected = chebyshev_domain(op);
  if (std::abs(e.lambda_max() - expected) > 1e-12 * expected)
    throw InvalidArgument("apply_filter: expansion interval does not match the operator's spectral domain");
}

// Runs the three-term recurrence T_k(L~) f for k = 0..K and hands each term
// to `sink(k, t_k)`. Performs exactly K operator applications.
template <class Sink>
void chebyshev_recurrence(const LaplacianOperator& op, double lambda_max, int K, std::span<const double> f,
                          Sink&& sink) {
  const std::size_t n = op.num_nodes();
  const double scale = 2.0 / lambda_max;
  Vector t_prev(f.begin(), f.end());
  sink(0, std::span<const double>(t_prev));
  if (K == 0) return;
  Vector t_cur(n), t_next(n);
  op.apply(t_prev, t_cur);
  for (std::size_t i = 0; i < n; ++i) t_cur[i] = scale * t_cur[i] - t_prev[i];
  sink(1, std::span<const double>(t_cur));
  for (int k = 2; k <= K; ++k) {
    op.apply(t_cur, t_next);
    for (std::size_t i = 0; i < n; ++i) t_next[i] = 2.0 * (scale * t_next[i] - t_cur[i]) - t_prev[i];
    sink(k, std::span<const double>(t_next));
    t_prev.swap(t_cur);
    t_cur.swap(t_next);
  }
}

}  // namespace detail

/// out = sum_k c_k T_k(L~) f. O(K (m + n)) time, three work vectors.
inline void apply_filter(const LaplacianOperator& op, const ChebyshevExpansion& e, std::span<const double> f,
                         std::span<double> out) {
  if (f.size() != op.num_nodes() || out.size() != op.num_nodes())
    throw InvalidArgument("apply_filter: signal length does not match graph");
  detail::check_domain(op, e);
  const auto& c = e.coefficients();
  std::fill(out.begin(), out.end(), 0.0);
  detail::chebyshev_recurrence(op, e.lambda_max(), e.degree(), f, [&](int k, std::span<const double> t) {
    const double ck = c[k];
    for (std::size_t i = 0; i < t.size(); ++i) out[i] += ck * t[i];
  });
}

inline Vector apply_filter(const LaplacianOperator& op, const ChebyshevExpansion& e, std::span<const double> f) {
  Vector out(op.num_nodes());
  apply_filter(op, e, f, out);
  return out;
}

/// Process-wide cache of the sqrt(psi_j) expansions, keyed by everything the
/// coefficients depend on.
class ExpansionCache {
 public:
  static ExpansionCache& instance() {
    static ExpansionCache cache;
    return cache;
  }

  std::shared_ptr<const ChebyshevExpansion> get(const PartitionOfUnity& pou, int j, double lambda_max, int K,
                                                bool jackson) {
    Key key{static_cast<int>(pou.kind()), pou.b(), pou.c(), pou.lambda_ub(), j, lambda_max, K, jackson};
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) {
      ++hits_;
      return it->second;
    }
    auto e = std::make_shared<const ChebyshevExpansion>(
        make_expansion([&pou, j](double x) { return pou.sqrt_psi(j, x); }, lambda_max, K, jackson));
    entries_.emplace(key, e);
    return e;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
  }
  std::size_t hits() const {
    std::lock_guard lock(mutex_);
    return hits_;
  }
  void clear() {
    std::lock_guard lock(mutex_);
    entries_.clear();
    hits_ = 0;
  }

 private:
  using Key = std::tuple<int, double, double, double, int, double, int, bool>;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const ChebyshevExpansion>> entries_;
  std::size_t hits_ = 0;
};

/// SGWT approximated by degree-K Chebyshev(-Jackson) polynomials of the
/// Laplacian; never forms an eigendecomposition.
class FastSgwt {
 public:
  FastSgwt(LaplacianOperator op, PartitionOfUnity pou, int K, bool jackson)
      : op_(std::move(op)), pou_(std::move(pou)), degree_(K), jackson_(jackson) {
    if (K < 0) throw InvalidArgument("FastSgwt: K must be >= 0");
    const double domain = chebyshev_domain(op_);
    for (int j = 0; j <= pou_.max_scale(); ++j)
      bank_.push_back(ExpansionCache::instance().get(pou_, j, domain, K, jackson));
  }

  std::size_t num_nodes() const { return op_.num_nodes(); }
  std::size_t num_scales() const { return pou_.num_scales(); }
  int degree() const { return degree_; }
  bool jackson() const { return jackson_; }
  const LaplacianOperator& laplacian() const { return op_; }
  const PartitionOfUnity& partition() const { return pou_; }
  const ChebyshevExpansion& expansion(std::size_t j) const { return *bank_[j]; }

  std::string fingerprint() const {
    std::ostringstream os;
    os << "fast;variant=" << to_string(op_.variant()) << ";" << pou_.fingerprint() << ";K=" << degree_
       << ";jackson=" << (jackson_ ? 1 : 0);
    return os.str();
  }

  /// All J+1 filters share one recurrence: K matvecs plus O(n (J+1) K) updates.
  FrameCoefficients forward(std::span<const double> f) const {
    if (f.size() != num_nodes()) throw InvalidArgument("sgwt_forward_fast: signal length does not match graph");
    FrameCoefficients out(num_nodes(), num_scales());
    detail::chebyshev_recurrence(op_, chebyshev_domain(op_), degree_, f, [&](int k, std::span<const double> t) {
      for (std::size_t j = 0; j < num_scales(); ++j) {
        const double ck = bank_[j]->coefficients()[k];
        auto block = out.scale(j);
        for (std::size_t i = 0; i < t.size(); ++i) block[i] += ck * t[i];
      }
    });
    return out;
  }

  /// sum_j rho_j(L) eta_j with rho_j the approximation of sqrt(psi_j).
  Vector inverse(const FrameCoefficients& coeffs) const {
    if (coeffs.num_nodes() != num_nodes() || coeffs.num_scales() != num_scales())
      throw InvalidArgument("sgwt_inverse_fast: coefficient dimensions do not match the frame");
    Vector acc(num_nodes(), 0.0), part(num_nodes());
    for (std::size_t j = 0; j < num_scales(); ++j) {
      apply_filter(op_, *bank_[j], coeffs.scale(j), part);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += part[i];
    }
    return acc;
  }

 private:
  LaplacianOperator op_;
  PartitionOfUnity pou_;
  int degree_;
  bool jackson_;
  std::vector<std::shared_ptr<const ChebyshevExpansion>> bank_;
};

inline FrameCoefficients sgwt_forward_fast(const LaplacianOperator& op, std::span<const double> f,
                                           const PartitionOfUnity& pou, int K, bool jackson) {
  return FastSgwt(op, pou, K, jackson).forward(f);
}

inline Vector sgwt_inverse_fast(const LaplacianOperator& op, const FrameCoefficients& coeffs,
                                const PartitionOfUnity& pou, int K, bool jackson) {
  return FastSgwt(op, pou, K, jackson).inverse(coeffs);
}

}  // namespace gsure
