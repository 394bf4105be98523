#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsure/error.hpp"
#include "gsure/graph.hpp"

namespace gsure {

enum class LaplacianVariant { unnormalized, normalized, random_walk };

inline std::string_view to_string(LaplacianVariant v) {
  switch (v) {
    case LaplacianVariant::unnormalized: return "unnormalized";
    case LaplacianVariant::normalized: return "normalized";
    case LaplacianVariant::random_walk: return "random-walk";
  }
  return "?";
}

inline std::optional<LaplacianVariant> parse_laplacian_variant(std::string_view s) {
  if (s == "unnormalized" || s == "combinatorial") return LaplacianVariant::unnormalized;
  if (s == "normalized") return LaplacianVariant::normalized;
  if (s == "random-walk" || s == "rw") return LaplacianVariant::random_walk;
  return std::nullopt;
}

/// Graph Laplacian applied matrix-free over a shared immutable graph.
///
///   unnormalized  L x      = D x - W x
///   normalized    Ln x     = x - D^{-1/2} W D^{-1/2} x
///   random-walk   Lrw x    = x - D^{-1} W x
///
/// The random-walk operator is self-adjoint for <x, y>_D = x^T D y and is
/// similar to the normalized one: Ln = D^{1/2} Lrw D^{-1/2}.
class LaplacianOperator {
 public:
  LaplacianOperator(std::shared_ptr<const SparseGraph> graph, LaplacianVariant variant)
      : graph_(std::move(graph)), variant_(variant), matvecs_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
    if (!graph_) throw InvalidArgument("LaplacianOperator: null graph");
    const std::size_t n = graph_->num_nodes();
    if (n == 0) throw InvalidArgument("LaplacianOperator: empty graph");
    degrees_.resize(n);
    inv_sqrt_degrees_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = graph_->weighted_degree(i);
      if (!(d > 0.0))
        throw InvalidArgument("LaplacianOperator: node " + std::to_string(i) + " ('" + graph_->labels()[i] +
                              "') has zero degree");
      degrees_[i] = d;
      inv_sqrt_degrees_[i] = 1.0 / std::sqrt(d);
    }
    lambda_ub_ = gershgorin_bound();
  }

  LaplacianVariant variant() const { return variant_; }
  const SparseGraph& graph() const { return *graph_; }
  const std::shared_ptr<const SparseGraph>& graph_ptr() const { return graph_; }
  std::size_t num_nodes() const { return degrees_.size(); }
  std::span<const double> degrees() const { return degrees_; }

  /// Certified upper bound on the largest eigenvalue.
  double lambda_ub() const { return lambda_ub_; }

  /// Copy of this operator carrying a different spectral upper bound.
  LaplacianOperator with_spectral_bound(double lambda_ub) const {
    if (!(lambda_ub > 0.0) || !std::isfinite(lambda_ub))
      throw InvalidArgument("with_spectral_bound: bound must be finite and > 0");
    LaplacianOperator copy = *this;
    copy.lambda_ub_ = lambda_ub;
    return copy;
  }

  /// Row-sum (Gershgorin) bound: 2 max_i D_ii, or 2 for the degree-scaled variants.
  double gershgorin_bound() const {
    if (variant_ != LaplacianVariant::unnormalized) return 2.0;
    return 2.0 * *std::max_element(degrees_.begin(), degrees_.end());
  }

  /// y = L x for this operator's variant. O(m + n).
  void apply(std::span<const double> x, std::span<double> y) const { apply_as(variant_, x, y); }

  Vector apply(std::span<const double> x) const {
    Vector y(num_nodes());
    apply(x, y);
    return y;
  }

  /// y = S x, where S is the symmetric matrix similar to this operator: L itself
  /// for the symmetric variants and D^{1/2} Lrw D^{-1/2} = Ln for random-walk.
  void apply_symmetric(std::span<const double> x, std::span<double> y) const {
    apply_as(variant_ == LaplacianVariant::random_walk ? LaplacianVariant::normalized : variant_, x, y);
  }

  /// Inner product under which the operator is self-adjoint.
  double inner_product(std::span<const double> x, std::span<const double> y) const {
    double acc = 0.0;
    if (variant_ == LaplacianVariant::random_walk) {
      for (std::size_t i = 0; i < x.size(); ++i) acc += degrees_[i] * x[i] * y[i];
    } else {
      for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    }
    return acc;
  }

  double energy(std::span<const double> x) const { return inner_product(x, x); }

  std::uint64_t matvec_count() const { return matvecs_->load(std::memory_order_relaxed); }
  void reset_matvec_count() const { matvecs_->store(0, std::memory_order_relaxed); }

 private:
  void apply_as(LaplacianVariant variant, std::span<const double> x, std::span<double> y) const {
    check_dims(x, y);
    matvecs_->fetch_add(1, std::memory_order_relaxed);
    const auto offsets = graph_->offsets();
    const auto cols = graph_->neighbors();
    const auto w = graph_->weights();
    const std::size_t n = num_nodes();
    switch (variant) {
      case LaplacianVariant::unnormalized:
        for (std::size_t i = 0; i < n; ++i) {
          double acc = 0.0;
          for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) acc += w[e] * x[cols[e]];
          y[i] = degrees_[i] * x[i] - acc;
        }
        break;
      case LaplacianVariant::normalized:
        for (std::size_t i = 0; i < n; ++i) {
          double acc = 0.0;
          for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e)
            acc += w[e] * inv_sqrt_degrees_[cols[e]] * x[cols[e]];
          y[i] = x[i] - inv_sqrt_degrees_[i] * acc;
        }
        break;
      case LaplacianVariant::random_walk:
        for (std::size_t i = 0; i < n; ++i) {
          double acc = 0.0;
          for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) acc += w[e] * x[cols[e]];
          y[i] = x[i] - acc / degrees_[i];
        }
        break;
    }
  }

  void check_dims(std::span<const double> x, std::span<double> y) const {
    if (x.size() != num_nodes() || y.size() != num_nodes())
      throw InvalidArgument("LaplacianOperator: vector length does not match node count");
  }

  std::shared_ptr<const SparseGraph> graph_;
  LaplacianVariant variant_;
  Vector degrees_;
  Vector inv_sqrt_degrees_;
  double lambda_ub_ = 0.0;
  // Shared between copies; instrumentation only.
  std::shared_ptr<std::atomic<std::uint64_t>> matvecs_;
};

struct SpectralBoundOptions {
  double tol = 1e-8;
  std::size_t max_iter = 5000;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
  double safety_margin = 0.01;
};

class SpectralBoundError : public ComputationError {
 public:
  SpectralBoundError(const std::string& what, double last_estimate)
      : ComputationError(what), last_estimate_(last_estimate) {}
  double last_estimate() const { return last_estimate_; }

 private:
  double last_estimate_;
};

/// Power iteration on the symmetric form of `op`. Returns the converged
/// Rayleigh quotient times (1 + safety_margin), clamped to 2 for the
/// normalized and random-walk variants.
inline double estimate_spectral_bound(const LaplacianOperator& op, const SpectralBoundOptions& opts = {}) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("estimate_spectral_bound: tol must be > 0");
  const std::size_t n = op.num_nodes();
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector x(n), y(n);
  for (double& v : x) v = unif(rng);

  auto normalize = [](Vector& v) {
    double s = 0.0;
    for (double a : v) s += a * a;
    s = std::sqrt(s);
    if (!(s > 0.0)) return false;
    for (double& a : v) a /= s;
    return true;
  };
  if (!normalize(x)) throw ComputationError("estimate_spectral_bound: degenerate start vector");

  double previous = 0.0;
  double estimate = 0.0;
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    op.apply_symmetric(x, y);
    double rq = 0.0;
    for (std::size_t i = 0; i < n; ++i) rq += x[i] * y[i];
    estimate = rq;
    if (it > 0 && std::abs(rq - previous) < opts.tol * std::abs(rq)) {
      const double bound = estimate * (1.0 + opts.safety_margin);
      return op.variant() == LaplacianVariant::unnormalized ? bound : std::min(bound, 2.0);
    }
    previous = rq;
    x.swap(y);
    if (!normalize(x)) {
      // Start vector landed in the kernel: the operator is zero on it.
      throw SpectralBoundError("estimate_spectral_bound: iterate collapsed to zero", estimate);
    }
  }
  throw SpectralBoundError("estimate_spectral_bound: no convergence after " + std::to_string(opts.max_iter) +
                               " iterations (last estimate " + std::to_string(estimate) + ")",
                           estimate);
}

inline LaplacianOperator make_laplacian(std::shared_ptr<const SparseGraph> graph, LaplacianVariant variant,
                                        const SpectralBoundOptions& opts = {}) {
  LaplacianOperator op(std::move(graph), variant);
  return op.with_spectral_bound(estimate_spectral_bound(op, opts));
}

inline LaplacianOperator make_laplacian(SparseGraph graph, LaplacianVariant variant,
                                        const SpectralBoundOptions& opts = {}) {
  return make_laplacian(std::make_shared<const SparseGraph>(std::move(graph)), variant, opts);
}

}  // namespace gsure
