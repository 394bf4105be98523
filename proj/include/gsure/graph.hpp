#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gsure/error.hpp"

namespace gsure {

using Vector = std::vector<double>;

/// One line of an edge list, with external node labels.
struct EdgeRecord {
  std::string u;
  std::string v;
  double weight = 1.0;
};

/// Edge between dense node indices.
struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 1.0;
};

/// Immutable undirected weighted graph stored as symmetric compressed rows.
///
/// Every undirected edge {i, j} appears twice in the adjacency (once per
/// endpoint) with the same weight. Self-loops are never stored and all
/// weights are strictly positive.
class SparseGraph {
 public:
  SparseGraph() = default;

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return neighbors_.size() / 2; }

  std::span<const std::size_t> offsets() const { return offsets_; }
  std::span<const std::size_t> neighbors() const { return neighbors_; }
  std::span<const double> weights() const { return weights_; }

  std::span<const std::size_t> neighbors_of(std::size_t i) const {
    return {neighbors_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> weights_of(std::size_t i) const {
    return {weights_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  /// D_ii = sum_j w_ij.
  double weighted_degree(std::size_t i) const {
    double d = 0.0;
    for (double w : weights_of(i)) d += w;
    return d;
  }

  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<std::size_t> index_of(std::string_view label) const {
    if (auto it = label_index_.find(std::string(label)); it != label_index_.end())
      return it->second;
    return std::nullopt;
  }

  /// y = W x with W the weighted adjacency matrix.
  void adjacency_apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = num_nodes();
    if (x.size() != n || y.size() != n)
      throw InvalidArgument("adjacency_apply: vector length does not match node count");
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e) acc += weights_[e] * x[neighbors_[e]];
      y[i] = acc;
    }
  }

  /// 64-bit FNV-1a digest of the adjacency structure and weights.
  std::uint64_t content_hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, std::size_t len) {
      const auto* p = static_cast<const unsigned char*>(data);
      for (std::size_t k = 0; k < len; ++k) {
        h ^= p[k];
        h *= 1099511628211ULL;
      }
    };
    const std::uint64_t n = num_nodes();
    mix(&n, sizeof n);
    for (std::size_t o : offsets_) {
      const std::uint64_t v = o;
      mix(&v, sizeof v);
    }
    for (std::size_t c : neighbors_) {
      const std::uint64_t v = c;
      mix(&v, sizeof v);
    }
    for (double w : weights_) mix(&w, sizeof w);
    return h;
  }

  friend SparseGraph build_graph(std::size_t n, std::span<const Edge> edges,
                                 std::vector<std::string> labels);

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> neighbors_;
  std::vector<double> weights_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> label_index_;
};

namespace detail {

inline std::string describe(const Edge& e) {
  std::ostringstream os;
  os << "(" << e.u << ", " << e.v << ", " << e.weight << ")";
  return os.str();
}

inline std::optional<std::uint64_t> parse_index(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace detail

/// Builds a graph on nodes 0..n-1. Duplicate undirected edges are merged by
/// summing their weights. `labels` may be empty, in which case node i is
/// labelled by its decimal index.
inline SparseGraph build_graph(std::size_t n, std::span<const Edge> edges,
                               std::vector<std::string> labels = {}) {
  struct Half {
    std::size_t a, b;
    double w;
  };
  std::vector<Half> canon;
  canon.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n)
      throw InvalidArgument("build_graph: node index out of range in edge " + detail::describe(e));
    if (e.u == e.v) throw InvalidArgument("build_graph: self-loop rejected " + detail::describe(e));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw InvalidArgument("build_graph: weight must be finite and > 0 in edge " + detail::describe(e));
    canon.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.weight});
  }
  std::sort(canon.begin(), canon.end(),
            [](const Half& x, const Half& y) { return x.a != y.a ? x.a < y.a : x.b < y.b; });

  // Collapse duplicates.
  std::vector<Half> merged;
  merged.reserve(canon.size());
  for (const Half& h : canon) {
    if (!merged.empty() && merged.back().a == h.a && merged.back().b == h.b)
      merged.back().w += h.w;
    else
      merged.push_back(h);
  }
  canon.clear();
  canon.shrink_to_fit();

  SparseGraph g;
  g.offsets_.assign(n + 1, 0);
  for (const Half& h : merged) {
    ++g.offsets_[h.a + 1];
    ++g.offsets_[h.b + 1];
  }
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.neighbors_.resize(2 * merged.size());
  g.weights_.resize(2 * merged.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // Pairs are sorted by (a, b): row i first receives its neighbours a < i
  // (ascending), then its neighbours b > i (ascending), so rows come out sorted.
  for (const Half& h : merged) {
    g.neighbors_[cursor[h.a]] = h.b;
    g.weights_[cursor[h.a]++] = h.w;
    g.neighbors_[cursor[h.b]] = h.a;
    g.weights_[cursor[h.b]++] = h.w;
  }

  if (labels.empty()) {
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  } else if (labels.size() != n) {
    throw InvalidArgument("build_graph: label count does not match node count");
  }
  g.labels_ = std::move(labels);
  g.label_index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!g.label_index_.emplace(g.labels_[i], i).second)
      throw InvalidArgument("build_graph: duplicate node label '" + g.labels_[i] + "'");
  }
  return g;
}

/// Builds a graph from labelled edge records, densifying labels to 0..n-1.
///
/// If every label is a non-negative integer, nodes are ordered numerically
/// (so a `0..n-1` edge list keeps its indices); otherwise labels are numbered
/// in order of first appearance.
inline SparseGraph build_graph(std::span<const EdgeRecord> records) {
  bool numeric = true;
  for (const EdgeRecord& r : records) {
    if (!detail::parse_index(r.u) || !detail::parse_index(r.v)) {
      numeric = false;
      break;
    }
  }

  std::vector<std::string> labels;
  std::vector<Edge> edges;
  edges.reserve(records.size());
  auto check = [](const EdgeRecord& r, std::size_t a, std::size_t b) {
    if (a == b) throw InvalidArgument("build_graph: self-loop rejected (" + r.u + ", " + r.v + ")");
    if (!(r.weight > 0.0) || !std::isfinite(r.weight)) {
      std::ostringstream os;
      os << "build_graph: weight must be finite and > 0 in record (" << r.u << ", " << r.v << ", "
         << r.weight << ")";
      throw InvalidArgument(os.str());
    }
  };

  if (numeric) {
    std::vector<std::uint64_t> ids;
    ids.reserve(2 * records.size());
    for (const EdgeRecord& r : records) {
      ids.push_back(*detail::parse_index(r.u));
      ids.push_back(*detail::parse_index(r.v));
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::unordered_map<std::uint64_t, std::size_t> index;
    index.reserve(ids.size());
    for (std::uint64_t id : ids) {
      index.emplace(id, labels.size());
      labels.push_back(std::to_string(id));
    }
    for (const EdgeRecord& r : records) {
      const std::size_t a = index.at(*detail::parse_index(r.u));
      const std::size_t b = index.at(*detail::parse_index(r.v));
      check(r, a, b);
      edges.push_back({a, b, r.weight});
    }
  } else {
    std::unordered_map<std::string, std::size_t> index;
    for (const EdgeRecord& r : records) {
      for (const std::string* s : {&r.u, &r.v}) {
        if (index.emplace(*s, labels.size()).second) labels.push_back(*s);
      }
      const std::size_t a = index.at(r.u), b = index.at(r.v);
      check(r, a, b);
      edges.push_back({a, b, r.weight});
    }
  }
  const std::size_t n = labels.size();
  return build_graph(n, edges, std::move(labels));
}

}  // namespace gsure
