// Command-line front end: graph inspection, synthetic signals, sanitization,
// weight caching, denoising, evaluation and benchmark sweeps.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsure/gsure.hpp"

namespace {

using namespace gsure;

constexpr int kExitOk = 0;
constexpr int kExitCompute = 1;
constexpr int kExitUsage = 2;

// Raw option values; converted and validated in to_config().
struct ConfigFlags {
  std::string variant = "unnormalized";
  std::string kind = "linear";
  double b = 2.0;
  double c = 1.0;
  int K = 100;
  bool jackson = true;
  std::size_t N = 10;
  std::string distribution = "rademacher";
  double beta = 2.0;
  int P = 100;
  std::optional<double> sigma;
  std::uint64_t weight_seed = 0;
  double bound_tol = SpectralBoundOptions{}.tol;
  std::size_t bound_max_iter = SpectralBoundOptions{}.max_iter;
};

void add_transform_flags(CLI::App* app, ConfigFlags& f) {
  app->add_option("--variant", f.variant, "Laplacian: unnormalized | normalized | random-walk")->capture_default_str();
  app->add_option("--kind", f.kind, "plateau function: linear | smooth")->capture_default_str();
  app->add_option("--b", f.b, "dilation base")->capture_default_str();
  app->add_option("--c", f.c, "smoothness of the smooth plateau")->capture_default_str();
  app->add_option("-K,--degree", f.K, "Chebyshev degree")->capture_default_str();
  app->add_flag("--jackson,!--no-jackson", f.jackson, "Jackson damping (default on)");
  app->add_option("--bound-tol", f.bound_tol, "power-iteration relative tolerance")->capture_default_str();
  app->add_option("--bound-max-iter", f.bound_max_iter, "power-iteration cap")->capture_default_str();
}

void add_weight_flags(CLI::App* app, ConfigFlags& f) {
  app->add_option("-N,--samples", f.N, "Monte-Carlo probes")->capture_default_str();
  app->add_option("--distribution", f.distribution, "probe law: rademacher | gaussian")->capture_default_str();
  app->add_option("--weight-seed", f.weight_seed, "probe seed")->capture_default_str();
}

void add_threshold_flags(CLI::App* app, ConfigFlags& f) {
  app->add_option("--beta", f.beta, "shrinkage exponent in [1, 100]")->capture_default_str();
  app->add_option("-P,--percentiles", f.P, "candidate grid resolution")->capture_default_str();
}

PipelineConfig to_config(const ConfigFlags& f) {
  PipelineConfig cfg;
  const auto variant = parse_laplacian_variant(f.variant);
  if (!variant) throw InvalidArgument("unknown Laplacian variant '" + f.variant + "'");
  const auto kind = parse_plateau_kind(f.kind);
  if (!kind) throw InvalidArgument("unknown plateau kind '" + f.kind + "'");
  const auto dist = parse_probe_distribution(f.distribution);
  if (!dist) throw InvalidArgument("unknown probe distribution '" + f.distribution + "'");
  cfg.variant = *variant;
  cfg.kind = *kind;
  cfg.b = f.b;
  cfg.c = f.c;
  cfg.K = f.K;
  cfg.jackson = f.jackson;
  cfg.N = f.N;
  cfg.distribution = *dist;
  cfg.beta = f.beta;
  cfg.P = f.P;
  cfg.sigma = f.sigma;
  cfg.weight_seed = f.weight_seed;
  cfg.bound_tol = f.bound_tol;
  cfg.bound_max_iter = f.bound_max_iter;
  return cfg;
}

std::shared_ptr<const SparseGraph> load_graph(const std::string& path) {
  return std::make_shared<const SparseGraph>(read_edge_list(path));
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string num(double v) { return detail::format_double(v); }

nlohmann::json report_json(const PipelineReport& r, const PipelineConfig& cfg) {
  nlohmann::json j;
  j["n"] = r.num_nodes;
  j["m"] = r.num_edges;
  j["lambda_ub"] = r.lambda_ub;
  j["J"] = r.max_scale;
  j["sigma"] = r.sigma;
  j["variant"] = std::string(to_string(cfg.variant));
  j["kind"] = std::string(to_string(cfg.kind));
  j["b"] = cfg.b;
  j["K"] = cfg.K;
  j["jackson"] = cfg.jackson;
  j["N"] = cfg.N;
  j["distribution"] = std::string(to_string(cfg.distribution));
  j["beta"] = cfg.beta;
  j["P"] = cfg.P;
  nlohmann::json th = nlohmann::json::array();
  // JSON has no infinity; an infinite threshold is written as the string "inf".
  for (double t : r.thresholds) th.push_back(std::isinf(t) ? nlohmann::json("inf") : nlohmann::json(t));
  j["thresholds"] = th;
  j["sure"] = r.sure;
  j["cache"] = std::string(to_string(r.cache));
  j["timings_ms"] = {{"weights", r.timings.weights_ms},
                     {"forward", r.timings.forward_ms},
                     {"select", r.timings.select_ms},
                     {"inverse", r.timings.inverse_ms}};
  j["warnings"] = r.warnings;
  return j;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  for (auto field : detail::split_fields(s)) {
    const auto v = detail::parse_double(field);
    if (!v) throw InvalidArgument(std::string(what) + ": '" + std::string(field) + "' is not a number");
    out.push_back(*v);
  }
  if (out.empty()) throw InvalidArgument(std::string(what) + ": empty list");
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Graph signal denoising with SURE-tuned spectral graph wavelet thresholding"};
  app.require_subcommand(1);

  // graph-info
  std::string gi_graph;
  ConfigFlags gi_flags;
  auto* gi = app.add_subcommand("graph-info", "print n, m and the spectral bound of a graph");
  gi->add_option("--graph", gi_graph, "edge list")->required();
  gi->add_option("--variant", gi_flags.variant, "Laplacian variant")->capture_default_str();
  gi->add_option("--bound-tol", gi_flags.bound_tol, "power-iteration relative tolerance")->capture_default_str();

  // gen-graph
  std::string gg_type = "grid", gg_out;
  std::size_t gg_rows = 10, gg_cols = 10, gg_n = 500;
  double gg_radius = 0.1;
  std::uint64_t gg_seed = 0;
  auto* gg = app.add_subcommand("gen-graph", "write a synthetic edge list");
  gg->add_option("--type", gg_type, "grid | rgg")->capture_default_str();
  gg->add_option("--rows", gg_rows)->capture_default_str();
  gg->add_option("--cols", gg_cols)->capture_default_str();
  gg->add_option("--n", gg_n, "node count (rgg)")->capture_default_str();
  gg->add_option("--radius", gg_radius, "connection radius (rgg)")->capture_default_str();
  gg->add_option("--seed", gg_seed)->capture_default_str();
  gg->add_option("--out", gg_out, "output edge list")->required();

  // synth
  std::string sy_graph, sy_out;
  SignalSpec sy_spec;
  auto* sy = app.add_subcommand("synth", "diffused Bernoulli signal W^k x_p");
  sy->add_option("--graph", sy_graph)->required();
  sy->add_option("--p", sy_spec.p, "Bernoulli parameter")->capture_default_str();
  sy->add_option("--k", sy_spec.k, "diffusion power")->capture_default_str();
  sy->add_option("--seed", sy_spec.seed)->capture_default_str();
  sy->add_option("--out", sy_out)->required();

  // sanitize
  std::string sa_in, sa_out, sa_mech = "analytic";
  PrivacyParams sa_priv;
  std::optional<double> sa_sigma;
  std::uint64_t sa_seed = 0;
  auto* sa = app.add_subcommand("sanitize", "add calibrated Gaussian noise");
  sa->add_option("--in", sa_in)->required();
  sa->add_option("--out", sa_out)->required();
  sa->add_option("--epsilon", sa_priv.epsilon)->capture_default_str();
  sa->add_option("--delta", sa_priv.delta)->capture_default_str();
  sa->add_option("--sensitivity", sa_priv.sensitivity, "l2 sensitivity")->capture_default_str();
  sa->add_option("--mechanism", sa_mech, "classical | analytic")->capture_default_str();
  sa->add_option("--sigma", sa_sigma, "noise level; overrides the privacy calibration");
  sa->add_option("--seed", sa_seed)->capture_default_str();

  // weights
  std::string we_graph, we_out;
  ConfigFlags we_flags;
  auto* we = app.add_subcommand("weights", "estimate and cache the SURE weights");
  we->add_option("--graph", we_graph)->required();
  we->add_option("--out", we_out)->required();
  add_transform_flags(we, we_flags);
  add_weight_flags(we, we_flags);

  // denoise
  std::string de_graph, de_in, de_out, de_weights, de_report;
  ConfigFlags de_flags;
  auto* de = app.add_subcommand("denoise", "SURE-thresholded wavelet denoising");
  de->add_option("--graph", de_graph)->required();
  de->add_option("--in", de_in, "noisy signal")->required();
  de->add_option("--out", de_out, "denoised signal")->required();
  de->add_option("--sigma", de_flags.sigma, "noise standard deviation")->required();
  de->add_option("--weights", de_weights, "weight cache to reuse if it matches");
  de->add_option("--report", de_report, "JSON report path");
  add_transform_flags(de, de_flags);
  add_weight_flags(de, de_flags);
  add_threshold_flags(de, de_flags);

  // eval
  std::string ev_ref, ev_est;
  auto* ev = app.add_subcommand("eval", "SNR and MSE of an estimate against a reference");
  ev->add_option("--ref", ev_ref)->required();
  ev->add_option("--est", ev_est)->required();

  // bench
  std::string be_graph, be_signal, be_out, be_eps, be_sig, be_mech = "analytic";
  std::size_t be_reps = 5;
  std::uint64_t be_seed = 0;
  PrivacyParams be_priv;
  ConfigFlags be_flags;
  auto* be = app.add_subcommand("bench", "sweep epsilon or sigma and write a CSV");
  be->add_option("--graph", be_graph)->required();
  be->add_option("--signal", be_signal, "clean signal")->required();
  be->add_option("--out", be_out, "CSV path")->required();
  auto* eps_opt = be->add_option("--epsilons", be_eps, "comma-separated privacy budgets");
  auto* sig_opt = be->add_option("--sigmas", be_sig, "comma-separated noise levels");
  eps_opt->excludes(sig_opt);
  be->add_option("--reps", be_reps)->capture_default_str();
  be->add_option("--seed", be_seed, "noise seed of repetition 0")->capture_default_str();
  be->add_option("--delta", be_priv.delta)->capture_default_str();
  be->add_option("--sensitivity", be_priv.sensitivity)->capture_default_str();
  be->add_option("--mechanism", be_mech)->capture_default_str();
  add_transform_flags(be, be_flags);
  add_weight_flags(be, be_flags);
  add_threshold_flags(be, be_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*gi) {
    PipelineConfig cfg = to_config(gi_flags);
    std::vector<std::string> warnings;
    const auto op = prepare_operator(load_graph(gi_graph), cfg, &warnings);
    print_warnings(warnings);
    const auto pou = make_partition(op, cfg);
    std::cout << "n=" << op.num_nodes() << " m=" << op.graph().num_edges() << " lambda_ub=" << num(op.lambda_ub())
              << " J=" << pou.max_scale() << "\n";
  } else if (*gg) {
    SparseGraph g;
    if (gg_type == "grid")
      g = grid_graph(gg_rows, gg_cols);
    else if (gg_type == "rgg")
      g = random_geometric_graph(gg_n, gg_radius, gg_seed);
    else
      throw InvalidArgument("unknown graph type '" + gg_type + "'");
    write_edge_list(gg_out, g);
    std::cout << "n=" << g.num_nodes() << " m=" << g.num_edges() << "\n";
  } else if (*sy) {
    const auto g = load_graph(sy_graph);
    const Vector f = synth_signal(*g, sy_spec);
    write_signal(sy_out, f,
                 {{"p", num(sy_spec.p)}, {"k", std::to_string(sy_spec.k)}, {"seed", std::to_string(sy_spec.seed)}});
  } else if (*sa) {
    const SignalFile in = read_signal(sa_in);
    std::map<std::string, std::string> meta = {{"seed", std::to_string(sa_seed)}};
    double sigma = 0.0;
    if (sa_sigma) {
      sigma = *sa_sigma;
    } else {
      const auto mech = parse_mechanism(sa_mech);
      if (!mech) throw InvalidArgument("unknown mechanism '" + sa_mech + "'");
      sa_priv.mechanism = *mech;
      sigma = calibrate_sigma(sa_priv);
      meta["epsilon"] = num(sa_priv.epsilon);
      meta["delta"] = num(sa_priv.delta);
      meta["sensitivity"] = num(sa_priv.sensitivity);
      meta["mechanism"] = std::string(to_string(sa_priv.mechanism));
    }
    const SanitizedSignal out = sanitize(in.values, sigma, sa_seed);
    meta["sigma"] = num(out.sigma);
    write_signal(sa_out, out.values, meta, in.labels);
    std::cout << "sigma=" << num(out.sigma) << "\n";
  } else if (*we) {
    PipelineConfig cfg = to_config(we_flags);
    cfg.validate(false);
    std::vector<std::string> warnings;
    const auto op = prepare_operator(load_graph(we_graph), cfg, &warnings);
    print_warnings(warnings);
    const FastSgwt transform = make_transform(op, cfg);
    const WeightEstimate w = compute_weights(transform, cfg);
    write_weight_cache(we_out, w, cache_info(cfg));
    std::cout << "n=" << w.num_nodes << " J=" << w.num_scales - 1 << " N=" << w.num_samples << "\n";
  } else if (*de) {
    PipelineConfig cfg = to_config(de_flags);
    cfg.validate(true);
    const auto graph = load_graph(de_graph);
    const Vector noisy = align_signal(read_signal(de_in), *graph);
    std::vector<std::string> warnings;
    const auto op = prepare_operator(graph, cfg, &warnings);
    std::optional<WeightEstimate> cached;
    if (!de_weights.empty()) cached = read_weight_cache(de_weights);
    PipelineResult res = denoise_pipeline(op, noisy, cfg, cached ? &*cached : nullptr);
    res.report.warnings.insert(res.report.warnings.begin(), warnings.begin(), warnings.end());
    print_warnings(res.report.warnings);
    write_signal(de_out, res.estimate, {{"sigma", num(res.report.sigma)}, {"sure", num(res.report.sure)}});
    if (!de_report.empty()) {
      std::ofstream os(de_report);
      if (!os) throw InvalidArgument("cannot open '" + de_report + "' for writing");
      os << report_json(res.report, cfg).dump(2) << "\n";
    }
    std::cout << "cache=" << to_string(res.report.cache) << " sure=" << num(res.report.sure) << " thresholds=";
    for (std::size_t j = 0; j < res.report.thresholds.size(); ++j)
      std::cout << (j ? "," : "") << num(res.report.thresholds[j]);
    std::cout << "\n";
  } else if (*ev) {
    const SignalFile ref = read_signal(ev_ref);
    const SignalFile est = read_signal(ev_est);
    std::cout << "snr=" << num(snr(ref.values, est.values)) << " mse=" << num(mse(ref.values, est.values)) << "\n";
  } else if (*be) {
    PipelineConfig cfg = to_config(be_flags);
    BenchSpec spec;
    if (!be_sig.empty()) {
      spec.sweep = BenchSpec::Sweep::sigma;
      spec.values = parse_list(be_sig, "--sigmas");
    } else {
      spec.values = parse_list(be_eps.empty() ? std::string("0.2,0.5,1") : be_eps, "--epsilons");
    }
    const auto mech = parse_mechanism(be_mech);
    if (!mech) throw InvalidArgument("unknown mechanism '" + be_mech + "'");
    be_priv.mechanism = *mech;
    spec.privacy = be_priv;
    spec.repetitions = be_reps;
    spec.seed = be_seed;
    const auto graph = load_graph(be_graph);
    const Vector clean = align_signal(read_signal(be_signal), *graph);
    std::vector<std::string> warnings;
    const auto op = prepare_operator(graph, cfg, &warnings);
    print_warnings(warnings);
    const auto rows = run_bench(op, clean, spec, cfg);
    std::ofstream os(be_out);
    if (!os) throw InvalidArgument("cannot open '" + be_out + "' for writing");
    write_bench_csv(os, rows);
    std::cout << "rows=" << rows.size() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const gsure::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  }
}
