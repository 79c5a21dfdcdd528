#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specstat/specstat.hpp"

namespace {

using specstat::ExperimentConfig;
using specstat::ReportFormat;

struct CommonOpts {
  std::vector<int> k_list{1};
  std::string mode = "sliding";
  std::optional<double> trim;
  std::uint64_t seed = 1;
  double fit_lo = 1.0, fit_hi = 60.0, fit_step = 1.0;
  int bins = 100;
  double hist_lo = 0.0, hist_hi = 5.0;
  int threads = 0;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_out = true) {
  cmd->add_option("--k", opts.k_list, "ratio orders, comma separated")
      ->delimiter(',')
      ->required();
  cmd->add_option("--mode", opts.mode, "index mode")
      ->check(CLI::IsMember({"sliding", "strided"}));
  cmd->add_option("--trim", opts.trim,
                  "fraction of levels dropped at each spectral edge");
  cmd->add_option("--seed", opts.seed, "master seed");
  cmd->add_option("--fit-lo", opts.fit_lo, "beta' grid lower edge");
  cmd->add_option("--fit-hi", opts.fit_hi, "beta' grid upper edge");
  cmd->add_option("--fit-step", opts.fit_step, "beta' grid step");
  cmd->add_option("--bins", opts.bins, "histogram bin count");
  cmd->add_option("--hist-lo", opts.hist_lo, "histogram range lower edge");
  cmd->add_option("--hist-hi", opts.hist_hi, "histogram range upper edge");
  cmd->add_option("--threads", opts.threads,
                  "worker threads over realizations (0 = all cores)");
  if (with_out) {
    cmd->add_option("--out", opts.out, "output path")->required();
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
  }
}

ExperimentConfig make_config(const CommonOpts& opts, specstat::SourceSpec source,
                             int realizations) {
  ExperimentConfig cfg;
  cfg.source = std::move(source);
  cfg.realizations = realizations;
  cfg.k_list = opts.k_list;
  cfg.mode = opts.mode == "sliding" ? specstat::RatioMode::sliding
                                    : specstat::RatioMode::strided;
  cfg.master_seed = opts.seed;
  cfg.fit_grid = {opts.fit_lo, opts.fit_hi, opts.fit_step};
  cfg.trim = opts.trim;
  cfg.hist_bins = opts.bins;
  cfg.hist_lo = opts.hist_lo;
  cfg.hist_hi = opts.hist_hi;
  return cfg;
}

specstat::SourceSpec ensemble_source(const std::string& name, int dim) {
  if (name == "goe") return specstat::GaussianEnsembleSpec{1, dim};
  if (name == "gue") return specstat::GaussianEnsembleSpec{2, dim};
  if (name == "gse") return specstat::GaussianEnsembleSpec{4, dim};
  if (name == "coe") return specstat::CircularEnsembleSpec{1, dim};
  if (name == "cue") return specstat::CircularEnsembleSpec{2, dim};
  return specstat::CircularEnsembleSpec{4, dim};
}

int run_and_write(const ExperimentConfig& cfg, const CommonOpts& opts) {
  const specstat::ExperimentReport report = specstat::run_experiment(cfg, opts.threads);
  for (const auto& res : report.per_k) {
    std::printf("k=%d beta_fit=%g", res.k, res.fit.beta_fit);
    if (res.predicted_beta) std::printf(" predicted=%ld", *res.predicted_beta);
    std::printf(" mean_r=%.6f ks_stat=%.5g ks_p=%.5g n=%zu%s\n", res.fit.mean_r,
                res.fit.ks_stat, res.fit.ks_p, res.fit.n,
                res.fit.boundary_hit ? " (grid boundary!)" : "");
  }
  const auto format = opts.format == "json" ? ReportFormat::json : ReportFormat::csv;
  for (const auto& path : specstat::write_report(report, format, opts.out))
    std::printf("wrote %s\n", path.c_str());
  std::fprintf(stderr, "wall time: %.1fs\n", report.wall_seconds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spacing-ratio statistics of random-matrix and quantum-chaotic spectra"};
  app.require_subcommand(1);

  // predict
  int predict_beta = 1, predict_k = 1;
  auto* predict = app.add_subcommand("predict", "effective Dyson index for (beta, k)");
  predict->add_option("--beta", predict_beta, "Dyson index (1, 2 or 4)")->required();
  predict->add_option("--k", predict_k, "spacing-ratio order")->required();

  // sample
  CommonOpts sample_opts;
  std::string sample_ensemble;
  int sample_dim = 1000, sample_realizations = 1;
  auto* sample = app.add_subcommand("sample", "random-matrix ensemble experiment");
  sample->add_option("--ensemble", sample_ensemble, "ensemble name")
      ->check(CLI::IsMember({"goe", "gue", "gse", "coe", "cue", "cse"}))
      ->required();
  sample->add_option("--dim", sample_dim, "number of levels per realization")->required();
  sample->add_option("--realizations", sample_realizations, "realization count")
      ->required();
  add_common(sample, sample_opts);

  // model
  CommonOpts model_opts;
  auto* model = app.add_subcommand("model", "physical-model experiment");
  model->require_subcommand(1);

  specstat::DefectXxzParams xxz;
  auto* defect = model->add_subcommand("defect-xxz", "XXZ chain with one defect");
  defect->add_option("--sites", xxz.sites, "chain length");
  defect->add_option("--omega", xxz.omega, "uniform field");
  defect->add_option("--eps-d", xxz.eps_d, "defect field");
  defect->add_option("--defect-site", xxz.defect_site, "defect position (1-based)");
  defect->add_option("--j-xy", xxz.j_xy, "in-plane coupling");
  defect->add_option("--j-z", xxz.j_z, "z coupling");
  defect->add_option("--n-up", xxz.n_up, "up-spin sector");
  add_common(defect, model_opts);

  specstat::ChiralChainParams chain;
  int chain_realizations = 20;
  auto* chiral = model->add_subcommand("chiral-chain",
                                       "Heisenberg chain with a three-spin term");
  chiral->set_help_flag("--help", "print help and exit");  // frees -h for the field
  chiral->add_option("--sites", chain.sites, "chain length");
  chiral->add_option("--j1", chain.j1, "two-spin coupling");
  chiral->add_option("--j2", chain.j2, "three-spin coupling");
  chiral->add_option("--h", chain.h, "random-field strength");
  chiral->add_option("--n-up", chain.n_up, "up-spin sector");
  chiral->add_option("--realizations", chain_realizations, "disorder realizations");
  add_common(chiral, model_opts);

  specstat::KickedTopParams top;
  auto* kicked = model->add_subcommand("kicked-top", "periodically kicked top");
  kicked->add_option("--j", top.j, "angular momentum");
  kicked->add_option("--p", top.p, "precession angle");
  kicked->add_option("--q", top.q, "kick strength");
  kicked->add_flag("--parity-split,!--no-parity-split", top.parity_split,
                   "diagonalize parity sectors separately");
  add_common(kicked, model_opts);

  specstat::IntermediateMapParams imap;
  int imap_realizations = 20;
  auto* intermediate =
      model->add_subcommand("intermediate-map", "quantized interval-exchange map");
  intermediate->add_option("--dim", imap.dim, "Hilbert-space dimension");
  intermediate->add_option("--gamma", imap.gamma, "map parameter");
  intermediate->add_option("--realizations", imap_realizations, "phase realizations");
  add_common(intermediate, model_opts);

  // ingest
  CommonOpts ingest_opts;
  std::string ingest_file;
  auto* ingest = app.add_subcommand("ingest", "analyze a measured level list");
  ingest->add_option("--file", ingest_file, "level file (one level per line)")
      ->required();
  add_common(ingest, ingest_opts);

  // finite-size
  CommonOpts scan_opts;
  std::string scan_ensemble;
  std::vector<int> scan_dims;
  int scan_realizations = 100;
  auto* scan = app.add_subcommand("finite-size",
                                  "fitted beta' as a function of spectrum size");
  scan->add_option("--ensemble", scan_ensemble, "ensemble name")
      ->check(CLI::IsMember({"goe", "gue", "gse", "coe", "cue", "cse"}))
      ->required();
  scan->add_option("--dims", scan_dims, "spectrum sizes, ascending")
      ->delimiter(',')
      ->required();
  scan->add_option("--realizations", scan_realizations, "realizations per size");
  add_common(scan, scan_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (predict->parsed()) {
      std::printf("%ld\n", specstat::predicted_beta_prime(predict_beta, predict_k));
      return 0;
    }
    if (sample->parsed()) {
      return run_and_write(
          make_config(sample_opts, ensemble_source(sample_ensemble, sample_dim),
                      sample_realizations),
          sample_opts);
    }
    if (defect->parsed())
      return run_and_write(make_config(model_opts, xxz, 1), model_opts);
    if (chiral->parsed())
      return run_and_write(make_config(model_opts, chain, chain_realizations),
                           model_opts);
    if (kicked->parsed())
      return run_and_write(make_config(model_opts, top, 1), model_opts);
    if (intermediate->parsed())
      return run_and_write(make_config(model_opts, imap, imap_realizations),
                           model_opts);
    if (ingest->parsed()) {
      return run_and_write(
          make_config(ingest_opts, specstat::LevelFileSource{ingest_file}, 1),
          ingest_opts);
    }
    if (scan->parsed()) {
      const ExperimentConfig cfg =
          make_config(scan_opts, ensemble_source(scan_ensemble, 0), scan_realizations);
      const auto points = specstat::finite_size_scan(cfg, scan_dims, scan_opts.threads);
      for (const auto& point : points)
        for (const auto& [k, beta_fit] : point.beta_fit_per_k)
          std::printf("dim=%d k=%d beta_fit=%g\n", point.dim, k, beta_fit);
      const auto format =
          scan_opts.format == "json" ? ReportFormat::json : ReportFormat::csv;
      if (format == ReportFormat::json)
        specstat::detail::write_file_atomic(scan_opts.out,
                                            specstat::scan_to_json(cfg, points));
      else
        specstat::detail::write_file_atomic(scan_opts.out,
                                            specstat::scan_to_csv(points));
      std::printf("wrote %s\n", scan_opts.out.c_str());
      return 0;
    }
  } catch (const specstat::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const specstat::DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const specstat::NumericalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  return 0;
}
