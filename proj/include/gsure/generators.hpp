#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "gsure/error.hpp"
#include "gsure/graph.hpp"

namespace gsure {

/// rows x cols 4-neighbour lattice with unit weights; node r * cols + c.
inline SparseGraph grid_graph(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0 || rows * cols < 2) throw InvalidArgument("grid_graph: need at least two nodes");
  std::vector<Edge> edges;
  edges.reserve(2 * rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t i = r * cols + c;
      if (c + 1 < cols) edges.push_back({i, i + 1, 1.0});
      if (r + 1 < rows) edges.push_back({i, i + cols, 1.0});
    }
  }
  return build_graph(rows * cols, edges);
}

/// Random geometric graph on the unit square with unit weights: nodes closer
/// than `radius` are joined. A node left isolated is joined to its nearest
/// neighbour so every degree is positive.
inline SparseGraph random_geometric_graph(std::size_t n, double radius, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("random_geometric_graph: need n >= 2");
  if (!(radius > 0.0)) throw InvalidArgument("random_geometric_graph: radius must be > 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = unif(rng);
    ys[i] = unif(rng);
  }
  // Bucket points into cells of side >= radius.
  const auto cells = static_cast<std::size_t>(std::max(1.0, std::floor(1.0 / radius)));
  std::vector<std::vector<std::size_t>> bucket(cells * cells);
  auto cell_of = [cells](double v) { return std::min(cells - 1, static_cast<std::size_t>(v * cells)); };
  for (std::size_t i = 0; i < n; ++i) bucket[cell_of(ys[i]) * cells + cell_of(xs[i])].push_back(i);

  std::vector<Edge> edges;
  std::vector<std::size_t> degree(n, 0);
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < n; ++i) {
    const auto cx = static_cast<long>(cell_of(xs[i])), cy = static_cast<long>(cell_of(ys[i]));
    for (long dy = -1; dy <= 1; ++dy) {
      for (long dx = -1; dx <= 1; ++dx) {
        const long nx = cx + dx, ny = cy + dy;
        if (nx < 0 || ny < 0 || nx >= static_cast<long>(cells) || ny >= static_cast<long>(cells)) continue;
        for (std::size_t j : bucket[ny * cells + nx]) {
          if (j <= i) continue;
          const double ddx = xs[i] - xs[j], ddy = ys[i] - ys[j];
          if (ddx * ddx + ddy * ddy < r2) {
            edges.push_back({i, j, 1.0});
            ++degree[i];
            ++degree[j];
          }
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (degree[i] > 0) continue;
    std::size_t best = i;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double ddx = xs[i] - xs[j], ddy = ys[i] - ys[j];
      if (const double d = ddx * ddx + ddy * ddy; d < best_d) {
        best_d = d;
        best = j;
      }
    }
    edges.push_back({i, best, 1.0});
    ++degree[i];
    ++degree[best];
  }
  return build_graph(n, edges);
}

/// Connected random graph: a random spanning tree plus `extra_edges` random
/// chords, weights uniform in [w_min, w_max].
inline SparseGraph random_connected_graph(std::size_t n, std::size_t extra_edges, std::uint64_t seed,
                                          double w_min = 0.5, double w_max = 1.5) {
  if (n < 2) throw InvalidArgument("random_connected_graph: need n >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(w_min, w_max);
  std::vector<Edge> edges;
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> parent(0, i - 1);
    edges.push_back({i, parent(rng), weight(rng)});
  }
  std::uniform_int_distribution<std::size_t> node(0, n - 1);
  for (std::size_t e = 0; e < extra_edges; ++e) {
    const std::size_t u = node(rng), v = node(rng);
    if (u != v) edges.push_back({u, v, weight(rng)});
  }
  return build_graph(n, edges);
}

}  // namespace gsure
