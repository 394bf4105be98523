#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gsure/error.hpp"
#include "gsure/graph.hpp"
#include "gsure/sure_mc.hpp"

namespace gsure {

/// Malformed input file; the message carries the file name and line number.
class ParseError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != ',') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

[[noreturn]] inline void fail_at(std::string_view source, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << source << ":" << line << ": " << what;
  throw ParseError(os.str());
}

// Splits a `# key=value` header line; other comments yield nothing.
inline std::optional<std::pair<std::string, std::string>> header_entry(std::string_view comment) {
  comment = trim(comment.substr(1));
  const auto eq = comment.find('=');
  if (eq == std::string_view::npos) return std::nullopt;
  return std::pair{std::string(trim(comment.substr(0, eq))), std::string(trim(comment.substr(eq + 1)))};
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------- edge lists

/// Reads `u v [w]` records, one per line. `#` starts a comment; blank lines
/// are skipped; fields may be separated by whitespace or commas.
inline std::vector<EdgeRecord> read_edge_records(std::istream& in, std::string_view source = "<edges>") {
  std::vector<EdgeRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    const auto fields = detail::split_fields(body);
    if (fields.empty()) continue;
    if (fields.size() < 2 || fields.size() > 3)
      detail::fail_at(source, lineno, "expected 'u v [w]', got '" + std::string(detail::trim(body)) + "'");
    EdgeRecord r{std::string(fields[0]), std::string(fields[1]), 1.0};
    if (fields.size() == 3) {
      const auto w = detail::parse_double(fields[2]);
      if (!w) detail::fail_at(source, lineno, "weight '" + std::string(fields[2]) + "' is not a number");
      r.weight = *w;
    }
    if (r.u == r.v) detail::fail_at(source, lineno, "self-loop on node '" + r.u + "'");
    if (!(r.weight > 0.0) || !std::isfinite(r.weight))
      detail::fail_at(source, lineno, "weight must be finite and > 0, got " + std::string(fields[2]));
    records.push_back(std::move(r));
  }
  return records;
}

inline SparseGraph read_edge_list(const std::string& path) {
  auto in = detail::open_input(path);
  const auto records = read_edge_records(in, path);
  if (records.empty()) throw ParseError(path + ": no edges");
  return build_graph(records);
}

/// Writes each undirected edge once, as `label_u label_v weight`.
inline void write_edge_list(std::ostream& out, const SparseGraph& g) {
  out << "# n=" << g.num_nodes() << " m=" << g.num_edges() << "\n";
  const auto& labels = g.labels();
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const auto nbrs = g.neighbors_of(i);
    const auto ws = g.weights_of(i);
    for (std::size_t e = 0; e < nbrs.size(); ++e)
      if (nbrs[e] > i) out << labels[i] << ' ' << labels[nbrs[e]] << ' ' << detail::format_double(ws[e]) << '\n';
  }
}

inline void write_edge_list(const std::string& path, const SparseGraph& g) {
  auto out = detail::open_output(path);
  write_edge_list(out, g);
  if (!out) throw ComputationError("failed writing '" + path + "'");
}

// ------------------------------------------------------------------- signals

/// Signal file: `# key=value` header lines, then either one value per line
/// (node order) or `label value` pairs.
struct SignalFile {
  Vector values;
  std::vector<std::string> labels;  // empty when the file is positional
  std::map<std::string, std::string> meta;

  std::optional<double> meta_number(const std::string& key) const {
    if (auto it = meta.find(key); it != meta.end()) return detail::parse_double(it->second);
    return std::nullopt;
  }
};

inline SignalFile read_signal(std::istream& in, std::string_view source = "<signal>") {
  SignalFile sf;
  std::string line;
  std::size_t lineno = 0;
  std::optional<bool> labelled;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = detail::trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      if (auto kv = detail::header_entry(body)) sf.meta[kv->first] = kv->second;
      continue;
    }
    const auto fields = detail::split_fields(body);
    if (fields.size() > 2) detail::fail_at(source, lineno, "expected 'value' or 'label value'");
    const bool has_label = fields.size() == 2;
    if (labelled && *labelled != has_label)
      detail::fail_at(source, lineno, "mixes labelled and positional lines");
    labelled = has_label;
    const auto v = detail::parse_double(fields.back());
    if (!v) detail::fail_at(source, lineno, "'" + std::string(fields.back()) + "' is not a number");
    if (!std::isfinite(*v)) detail::fail_at(source, lineno, "value is not finite");
    if (has_label) sf.labels.emplace_back(fields.front());
    sf.values.push_back(*v);
  }
  return sf;
}

inline SignalFile read_signal(const std::string& path) {
  auto in = detail::open_input(path);
  return read_signal(in, path);
}

/// Positional unless `labels` is given, in which case lines are `label value`.
inline void write_signal(std::ostream& out, std::span<const double> values,
                         const std::map<std::string, std::string>& meta = {},
                         std::span<const std::string> labels = {}) {
  if (!labels.empty() && labels.size() != values.size())
    throw InvalidArgument("write_signal: label count does not match value count");
  out << "# n=" << values.size() << "\n";
  for (const auto& [k, v] : meta)
    if (k != "n") out << "# " << k << "=" << v << "\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!labels.empty()) out << labels[i] << ' ';
    out << detail::format_double(values[i]) << "\n";
  }
}

inline void write_signal(const std::string& path, std::span<const double> values,
                         const std::map<std::string, std::string>& meta = {},
                         std::span<const std::string> labels = {}) {
  auto out = detail::open_output(path);
  write_signal(out, values, meta, labels);
  if (!out) throw ComputationError("failed writing '" + path + "'");
}

/// Node-ordered values of `sf` for graph `g`, resolving labels if present.
inline Vector align_signal(const SignalFile& sf, const SparseGraph& g) {
  const std::size_t n = g.num_nodes();
  if (sf.labels.empty()) {
    if (sf.values.size() != n)
      throw InvalidArgument("signal has " + std::to_string(sf.values.size()) + " values but the graph has " +
                            std::to_string(n) + " nodes");
    return sf.values;
  }
  Vector out(n, 0.0);
  std::vector<bool> seen(n, false);
  for (std::size_t r = 0; r < sf.labels.size(); ++r) {
    const auto idx = g.index_of(sf.labels[r]);
    if (!idx) throw InvalidArgument("signal label '" + sf.labels[r] + "' is not a node of the graph");
    if (seen[*idx]) throw InvalidArgument("signal label '" + sf.labels[r] + "' appears twice");
    seen[*idx] = true;
    out[*idx] = sf.values[r];
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!seen[i]) throw InvalidArgument("signal has no value for node '" + g.labels()[i] + "'");
  return out;
}

// -------------------------------------------------------------- weight cache

/// Extra header fields stored next to a weight estimate.
struct WeightCacheInfo {
  int degree = 0;
  bool jackson = true;
};

inline void write_weight_cache(std::ostream& out, const WeightEstimate& w, const WeightCacheInfo& info) {
  out << "# gsure-weights 1\n"
      << "# n=" << w.num_nodes << "\n"
      << "# J=" << (w.num_scales == 0 ? 0 : w.num_scales - 1) << "\n"
      << "# K=" << info.degree << "\n"
      << "# jackson=" << (info.jackson ? 1 : 0) << "\n"
      << "# N=" << w.num_samples << "\n"
      << "# distribution=" << to_string(w.distribution) << "\n"
      << "# seed=" << w.seed << "\n"
      << "# fingerprint=" << w.fingerprint << "\n";
  for (double v : w.diag) out << detail::format_double(v) << "\n";
}

inline void write_weight_cache(const std::string& path, const WeightEstimate& w, const WeightCacheInfo& info) {
  auto out = detail::open_output(path);
  write_weight_cache(out, w, info);
  if (!out) throw ComputationError("failed writing '" + path + "'");
}

inline WeightEstimate read_weight_cache(std::istream& in, std::string_view source = "<weights>") {
  WeightEstimate w;
  std::map<std::string, std::string> meta;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = detail::trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      if (auto kv = detail::header_entry(body)) meta[kv->first] = kv->second;
      continue;
    }
    const auto v = detail::parse_double(body);
    if (!v || !(*v >= 0.0)) detail::fail_at(source, lineno, "weight '" + std::string(body) + "' is not a number >= 0");
    w.diag.push_back(*v);
  }
  auto field = [&](const char* key) -> const std::string& {
    auto it = meta.find(key);
    if (it == meta.end()) throw ParseError(std::string(source) + ": missing header field '" + key + "'");
    return it->second;
  };
  auto integer = [&](const char* key) {
    const std::string& s = field(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ParseError(std::string(source) + ": header field '" + key + "' is not an integer");
    return v;
  };
  w.num_nodes = integer("n");
  w.num_scales = integer("J") + 1;
  w.num_samples = integer("N");
  w.seed = integer("seed");
  const auto dist = parse_probe_distribution(field("distribution"));
  if (!dist) throw ParseError(std::string(source) + ": unknown distribution '" + field("distribution") + "'");
  w.distribution = *dist;
  w.fingerprint = field("fingerprint");
  if (w.diag.size() != w.num_nodes * w.num_scales)
    throw ParseError(std::string(source) + ": expected " + std::to_string(w.num_nodes * w.num_scales) +
                     " values, found " + std::to_string(w.diag.size()));
  return w;
}

inline WeightEstimate read_weight_cache(const std::string& path) {
  auto in = detail::open_input(path);
  return read_weight_cache(in, path);
}

}  // namespace gsure
