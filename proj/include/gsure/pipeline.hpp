#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gsure/chebyshev.hpp"
#include "gsure/error.hpp"
#include "gsure/graph.hpp"
#include "gsure/io.hpp"
#include "gsure/laplacian.hpp"
#include "gsure/partition.hpp"
#include "gsure/privacy.hpp"
#include "gsure/signals.hpp"
#include "gsure/sure_mc.hpp"
#include "gsure/thresholding.hpp"

namespace gsure {

struct PipelineConfig {
  LaplacianVariant variant = LaplacianVariant::unnormalized;
  PlateauKind kind = PlateauKind::piecewise_linear;
  double b = 2.0;
  double c = 1.0;
  int K = 100;
  bool jackson = true;
  std::size_t N = 10;
  ProbeDistribution distribution = ProbeDistribution::rademacher;
  double beta = 2.0;
  int P = 100;
  std::optional<double> sigma;
  std::uint64_t weight_seed = 0;
  std::uint64_t bound_seed = SpectralBoundOptions{}.seed;
  double bound_tol = SpectralBoundOptions{}.tol;
  std::size_t bound_max_iter = SpectralBoundOptions{}.max_iter;

  /// Checks every field; `need_sigma` is set for denoising.
  void validate(bool need_sigma) const {
    if (!(b > 1.0) || !std::isfinite(b)) throw InvalidArgument("b must be finite and > 1");
    if (variant != LaplacianVariant::unnormalized && b > 2.0)
      throw InvalidArgument("b must lie in (1, 2] for the normalized and random-walk Laplacians");
    if (kind == PlateauKind::smooth && !(c > 0.0 && c <= 1.0)) throw InvalidArgument("c must lie in (0, 1]");
    if (K < 1) throw InvalidArgument("K must be >= 1");
    if (N < 1) throw InvalidArgument("N must be >= 1");
    if (!(beta >= 1.0 && beta <= kMaxBeta)) throw InvalidArgument("beta must lie in [1, 100]");
    if (P < 1) throw InvalidArgument("P must be >= 1");
    if (!(bound_tol > 0.0)) throw InvalidArgument("spectral bound tolerance must be > 0");
    if (bound_max_iter < 1) throw InvalidArgument("spectral bound iteration cap must be >= 1");
    if (need_sigma && !sigma) throw InvalidArgument("sigma is required");
    if (sigma && (!(*sigma > 0.0) || !std::isfinite(*sigma))) throw InvalidArgument("sigma must be finite and > 0");
  }
};

/// Laplacian with a spectral bound attached. If power iteration does not
/// converge the Gershgorin bound is used and a warning recorded.
inline LaplacianOperator prepare_operator(std::shared_ptr<const SparseGraph> graph, const PipelineConfig& cfg,
                                          std::vector<std::string>* warnings = nullptr) {
  LaplacianOperator op(std::move(graph), cfg.variant);
  SpectralBoundOptions opts;
  opts.seed = cfg.bound_seed;
  opts.tol = cfg.bound_tol;
  opts.max_iter = cfg.bound_max_iter;
  try {
    return op.with_spectral_bound(estimate_spectral_bound(op, opts));
  } catch (const SpectralBoundError& e) {
    if (warnings) warnings->push_back(std::string(e.what()) + "; falling back to the Gershgorin bound");
    return op.with_spectral_bound(op.gershgorin_bound());
  }
}

inline PartitionOfUnity make_partition(const LaplacianOperator& op, const PipelineConfig& cfg) {
  return PartitionOfUnity::for_operator(op, cfg.kind, cfg.b, cfg.c);
}

inline FastSgwt make_transform(const LaplacianOperator& op, const PipelineConfig& cfg) {
  return FastSgwt(op, make_partition(op, cfg), cfg.K, cfg.jackson);
}

/// Identity of a weight estimate: graph content, transform and probe settings.
inline std::string weights_fingerprint(const FastSgwt& transform, const PipelineConfig& cfg) {
  std::ostringstream os;
  os << "graph=" << std::hex << std::setw(16) << std::setfill('0') << transform.laplacian().graph().content_hash()
     << std::dec << ";" << transform.fingerprint() << ";N=" << cfg.N << ";dist=" << to_string(cfg.distribution)
     << ";seed=" << cfg.weight_seed;
  return os.str();
}

inline WeightEstimate compute_weights(const FastSgwt& transform, const PipelineConfig& cfg) {
  WeightEstimate w = estimate_diagonal_weights(transform, cfg.N, cfg.distribution, cfg.weight_seed);
  w.fingerprint = weights_fingerprint(transform, cfg);
  return w;
}

inline WeightCacheInfo cache_info(const PipelineConfig& cfg) { return {cfg.K, cfg.jackson}; }

struct StageTimings {
  double weights_ms = 0.0;
  double forward_ms = 0.0;
  double select_ms = 0.0;
  double inverse_ms = 0.0;
};

enum class CacheStatus { none, hit, mismatch };

inline std::string_view to_string(CacheStatus s) {
  switch (s) {
    case CacheStatus::hit: return "hit";
    case CacheStatus::mismatch: return "mismatch";
    default: return "miss";
  }
}

struct PipelineReport {
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  double lambda_ub = 0.0;
  int max_scale = 0;
  double sigma = 0.0;
  std::vector<double> thresholds;
  double sure = 0.0;
  CacheStatus cache = CacheStatus::none;
  StageTimings timings;
  std::vector<std::string> warnings;
};

struct PipelineResult {
  Vector estimate;
  PipelineReport report;
  WeightEstimate weights;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Analysis with the fast transform, SURE-driven per-scale thresholding and
/// synthesis. A cached weight estimate is reused only if its fingerprint
/// matches the current configuration.
inline PipelineResult denoise_pipeline(const LaplacianOperator& op, std::span<const double> noisy,
                                       const PipelineConfig& cfg, const WeightEstimate* cached = nullptr) {
  cfg.validate(true);
  if (noisy.size() != op.num_nodes())
    throw InvalidArgument("signal length " + std::to_string(noisy.size()) + " does not match the graph (" +
                          std::to_string(op.num_nodes()) + " nodes)");
  const double sigma = *cfg.sigma;
  const FastSgwt transform = make_transform(op, cfg);

  PipelineResult res;
  PipelineReport& rep = res.report;
  rep.num_nodes = op.num_nodes();
  rep.num_edges = op.graph().num_edges();
  rep.lambda_ub = op.lambda_ub();
  rep.max_scale = transform.partition().max_scale();
  rep.sigma = sigma;

  const std::string expected = weights_fingerprint(transform, cfg);
  if (cached && cached->fingerprint == expected && cached->diag.size() == op.num_nodes() * transform.num_scales()) {
    rep.cache = CacheStatus::hit;
    res.weights = *cached;
  } else {
    if (cached) {
      rep.cache = CacheStatus::mismatch;
      rep.warnings.push_back("weight cache fingerprint mismatch; recomputed (cached '" + cached->fingerprint +
                             "', expected '" + expected + "')");
    }
    detail::Stopwatch sw;
    res.weights = compute_weights(transform, cfg);
    rep.timings.weights_ms = sw.elapsed_ms();
  }

  detail::Stopwatch fw;
  const FrameCoefficients coeffs = transform.forward(noisy);
  rep.timings.forward_ms = fw.elapsed_ms();

  detail::Stopwatch sel;
  const ThresholdPolicy policy = select_thresholds_sure(coeffs, res.weights.diag, sigma, cfg.beta, cfg.P);
  const ThresholdedCoefficients thr = apply_policy(coeffs, policy);
  rep.sure = sure_value(coeffs, thr.coefficients, thr.derivatives, sigma, res.weights.diag);
  rep.thresholds = policy.thresholds;
  rep.timings.select_ms = sel.elapsed_ms();

  detail::Stopwatch inv;
  res.estimate = transform.inverse(thr.coefficients);
  rep.timings.inverse_ms = inv.elapsed_ms();
  return res;
}

// --------------------------------------------------------------------- bench

struct BenchSpec {
  enum class Sweep { epsilon, sigma };
  Sweep sweep = Sweep::epsilon;
  std::vector<double> values;  // epsilons or sigmas
  std::size_t repetitions = 1;
  std::uint64_t seed = 0;
  PrivacyParams privacy;  // epsilon overwritten per row
};

struct BenchRow {
  std::size_t run = 0;
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  double sigma = 0.0;
  double snr_in = 0.0;
  double snr_out = 0.0;
  double sure = 0.0;
  double sanitize_ms = 0.0;
  StageTimings timings;
};

inline constexpr std::string_view kBenchHeader =
    "run,epsilon,sigma,snr_in,snr_out,sure,wall_ms_sanitize,wall_ms_weights,wall_ms_forward,wall_ms_select,"
    "wall_ms_inverse";

/// Sweeps (epsilon or sigma) x repetitions. Repetition r of every sweep value
/// uses noise seed `seed + r` and probe seed `cfg.weight_seed + r`.
inline std::vector<BenchRow> run_bench(const LaplacianOperator& op, std::span<const double> clean,
                                       const BenchSpec& spec, const PipelineConfig& cfg) {
  if (spec.values.empty()) throw InvalidArgument("bench: nothing to sweep");
  if (spec.repetitions < 1) throw InvalidArgument("bench: need at least one repetition");
  cfg.validate(false);
  std::vector<BenchRow> rows;
  for (double value : spec.values) {
    for (std::size_t r = 0; r < spec.repetitions; ++r) {
      BenchRow row;
      row.run = rows.size();
      detail::Stopwatch san;
      if (spec.sweep == BenchSpec::Sweep::epsilon) {
        PrivacyParams p = spec.privacy;
        p.epsilon = value;
        row.epsilon = value;
        row.sigma = calibrate_sigma(p);
      } else {
        row.sigma = value;
      }
      const SanitizedSignal noisy = sanitize(clean, row.sigma, spec.seed + r);
      row.sanitize_ms = san.elapsed_ms();

      PipelineConfig run_cfg = cfg;
      run_cfg.sigma = row.sigma;
      run_cfg.weight_seed = cfg.weight_seed + r;
      const PipelineResult res = denoise_pipeline(op, noisy.values, run_cfg);
      row.snr_in = snr(clean, noisy.values);
      row.snr_out = snr(clean, res.estimate);
      row.sure = res.report.sure;
      row.timings = res.report.timings;
      rows.push_back(row);
    }
  }
  return rows;
}

inline void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << kBenchHeader << "\n";
  auto num = [](double v) { return std::isnan(v) ? std::string("nan") : detail::format_double(v); };
  for (const BenchRow& r : rows) {
    out << r.run << ',' << num(r.epsilon) << ',' << num(r.sigma) << ',' << num(r.snr_in) << ',' << num(r.snr_out)
        << ',' << num(r.sure) << ',' << num(r.sanitize_ms) << ',' << num(r.timings.weights_ms) << ','
        << num(r.timings.forward_ms) << ',' << num(r.timings.select_ms) << ',' << num(r.timings.inverse_ms) << "\n";
  }
}

}  // namespace gsure
