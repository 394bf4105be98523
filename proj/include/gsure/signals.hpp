#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>

#include "gsure/error.hpp"
#include "gsure/graph.hpp"

namespace gsure {

/// f_{p,k} = W^k x_p with x_p i.i.d. Bernoulli(p) over the nodes.
struct SignalSpec {
  double p = 0.01;
  int k = 4;
  std::uint64_t seed = 0;
};

inline Vector synth_signal(const SparseGraph& g, const SignalSpec& spec) {
  if (!(spec.p > 0.0 && spec.p < 1.0)) throw InvalidArgument("synth_signal: p must lie in (0, 1)");
  if (spec.k < 0) throw InvalidArgument("synth_signal: k must be >= 0");
  const std::size_t n = g.num_nodes();
  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution coin(spec.p);
  Vector x(n), y(n);
  for (double& v : x) v = coin(rng) ? 1.0 : 0.0;
  for (int step = 0; step < spec.k; ++step) {
    g.adjacency_apply(x, y);
    x.swap(y);
  }
  return x;
}

/// 20 log10(||f|| / ||f - fhat||) in dB; +inf when fhat == f.
inline double snr(std::span<const double> f, std::span<const double> fhat) {
  if (f.size() != fhat.size()) throw InvalidArgument("snr: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    num += f[i] * f[i];
    den += (f[i] - fhat[i]) * (f[i] - fhat[i]);
  }
  if (num == 0.0) throw InvalidArgument("snr: reference signal is identically zero");
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(num / den);
}

inline double mse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("mse: length mismatch");
  if (a.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

}  // namespace gsure
