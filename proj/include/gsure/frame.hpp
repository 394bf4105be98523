#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gsure/error.hpp"
#include "gsure/graph.hpp"

namespace gsure {

/// Wavelet coefficients of a graph signal along J+1 scales, stored
/// scale-major: entry i belongs to scale i / n and node i % n.
class FrameCoefficients {
 public:
  FrameCoefficients() = default;
  FrameCoefficients(std::size_t n, std::size_t num_scales) : n_(n), scales_(num_scales), values_(n * num_scales) {}
  FrameCoefficients(std::size_t n, std::size_t num_scales, Vector values)
      : n_(n), scales_(num_scales), values_(std::move(values)) {
    if (values_.size() != n_ * scales_)
      throw InvalidArgument("FrameCoefficients: length must equal n * (J + 1)");
  }

  std::size_t num_nodes() const { return n_; }
  std::size_t num_scales() const { return scales_; }
  std::size_t size() const { return values_.size(); }

  std::size_t scale_of(std::size_t i) const { return i / n_; }
  std::size_t node_of(std::size_t i) const { return i % n_; }

  std::span<double> scale(std::size_t j) { return {values_.data() + j * n_, n_}; }
  std::span<const double> scale(std::size_t j) const { return {values_.data() + j * n_, n_}; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  Vector& values() { return values_; }
  const Vector& values() const { return values_; }

  bool same_shape(const FrameCoefficients& other) const { return n_ == other.n_ && scales_ == other.scales_; }

 private:
  std::size_t n_ = 0;
  std::size_t scales_ = 0;
  Vector values_;
};

}  // namespace gsure
