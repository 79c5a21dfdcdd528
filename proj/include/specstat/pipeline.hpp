#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "specstat/ensembles.hpp"
#include "specstat/errors.hpp"
#include "specstat/level_file.hpp"
#include "specstat/linalg.hpp"
#include "specstat/models.hpp"
#include "specstat/ratio_stats.hpp"
#include "specstat/rng.hpp"
#include "specstat/spectrum.hpp"

namespace specstat {

struct LevelFileSource {
  std::string path;
};

using SourceSpec =
    std::variant<GaussianEnsembleSpec, CircularEnsembleSpec, DefectXxzParams,
                 ChiralChainParams, KickedTopParams, IntermediateMapParams,
                 LevelFileSource>;

struct FitGrid {
  double lo = 1.0;
  double hi = 60.0;
  double step = 1.0;
};

struct ExperimentConfig {
  SourceSpec source = GaussianEnsembleSpec{};
  int realizations = 1;
  std::vector<int> k_list{1};
  RatioMode mode = RatioMode::sliding;
  std::uint64_t master_seed = 1;
  FitGrid fit_grid;
  std::optional<double> trim;  // fraction trimmed per spectral edge
  int hist_bins = 100;
  double hist_lo = 0.0;
  double hist_hi = 5.0;
};

struct KResult {
  int k = 1;
  FitReport fit;
  std::vector<HistogramBin> hist;
  std::optional<long> predicted_beta;  // absent when the source beta is unknown
  std::size_t pooled_count = 0;
};

struct ExperimentReport {
  ExperimentConfig config;  // echo, with the trim default resolved
  std::vector<KResult> per_k;
  double wall_seconds = 0.0;  // runtime metadata; not serialized
};

namespace detail {

inline std::optional<int> source_beta(const SourceSpec& source) {
  struct Visitor {
    std::optional<int> operator()(const GaussianEnsembleSpec& s) const { return s.beta; }
    std::optional<int> operator()(const CircularEnsembleSpec& s) const { return s.beta; }
    std::optional<int> operator()(const DefectXxzParams&) const { return 1; }
    std::optional<int> operator()(const ChiralChainParams&) const { return 2; }
    std::optional<int> operator()(const KickedTopParams&) const { return 1; }
    std::optional<int> operator()(const IntermediateMapParams&) const { return 2; }
    std::optional<int> operator()(const LevelFileSource&) const { return std::nullopt; }
  };
  return std::visit(Visitor{}, source);
}

// Gaussian-ensemble and Hamiltonian spectra have soft edges that deviate
// from bulk statistics; phases on the circle are homogeneous, and measured
// lists are taken as-is.
inline double default_trim(const SourceSpec& source) {
  struct Visitor {
    double operator()(const GaussianEnsembleSpec&) const { return 0.02; }
    double operator()(const CircularEnsembleSpec&) const { return 0.0; }
    double operator()(const DefectXxzParams&) const { return 0.02; }
    double operator()(const ChiralChainParams&) const { return 0.02; }
    double operator()(const KickedTopParams&) const { return 0.0; }
    double operator()(const IntermediateMapParams&) const { return 0.0; }
    double operator()(const LevelFileSource&) const { return 0.0; }
  };
  return std::visit(Visitor{}, source);
}

// Sources whose spectrum is a fixed object: re-diagonalizing them would
// inflate the pooled sample without adding information.
inline bool deterministic_source(const SourceSpec& source) {
  return std::holds_alternative<DefectXxzParams>(source) ||
         std::holds_alternative<KickedTopParams>(source) ||
         std::holds_alternative<LevelFileSource>(source);
}

inline Spectrum trim_edges(const Spectrum& s, double trim) {
  if (trim <= 0.0) return s;
  const auto drop = static_cast<std::size_t>(
      std::floor(trim * static_cast<double>(s.size())));
  if (2 * drop >= s.size())
    throw TooFewLevelsError("edge trimming would discard the whole spectrum");
  Spectrum out;
  out.kind = s.kind;
  out.levels.assign(s.levels.begin() + static_cast<std::ptrdiff_t>(drop),
                    s.levels.end() - static_cast<std::ptrdiff_t>(drop));
  return out;
}

/// All level sequences of one realization: a single spectrum for most
/// sources, one per parity sector for the desymmetrized kicked top.
inline std::vector<Spectrum> realize_spectra(const SourceSpec& source, RngStream rng,
                                             const Spectrum* file_levels) {
  struct Visitor {
    RngStream& rng;
    const Spectrum* file_levels;

    std::vector<Spectrum> operator()(const GaussianEnsembleSpec& s) const {
      return {sample_gaussian(s, rng)};
    }
    std::vector<Spectrum> operator()(const CircularEnsembleSpec& s) const {
      return {sample_circular(s, rng)};
    }
    std::vector<Spectrum> operator()(const DefectXxzParams& p) const {
      return {eigenvalues_hermitian(build_defect_xxz(p))};
    }
    std::vector<Spectrum> operator()(const ChiralChainParams& p) const {
      return {eigenvalues_hermitian(build_chiral_chain(p, rng))};
    }
    std::vector<Spectrum> operator()(const KickedTopParams& p) const {
      std::vector<Spectrum> out;
      for (const auto& block : build_kicked_top(p).blocks)
        out.push_back(eigenphases_unitary(block));
      return out;
    }
    std::vector<Spectrum> operator()(const IntermediateMapParams& p) const {
      return {eigenphases_unitary(build_intermediate_map(p, rng))};
    }
    std::vector<Spectrum> operator()(const LevelFileSource&) const {
      return {*file_levels};
    }
  };
  return std::visit(Visitor{rng, file_levels}, source);
}

/// Deterministic parallel map: workers pull realization indices from a
/// counter, results land in index-order slots, the first failure wins.
template <class Work>
void parallel_realizations(int realizations, int threads, Work&& work) {
  int n_threads = threads > 0 ? threads
                              : static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  if (n_threads > realizations) n_threads = realizations;

  if (n_threads == 1) {
    for (int i = 0; i < realizations; ++i) work(i);
    return;
  }

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto body = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const int i = next.fetch_add(1);
      if (i >= realizations) break;
      try {
        work(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

/// Runs the configured experiment: per realization i a spectrum is generated
/// with RngStream(master_seed, i), edges are trimmed, and ratios computed
/// for every k; ratios are pooled across realizations in index order (so the
/// report does not depend on thread scheduling) and fitted per k.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg, int threads = 0) {
  const auto t0 = std::chrono::steady_clock::now();

  if (cfg.realizations < 1)
    throw ConfigError("run_experiment: realizations must be >= 1");
  if (cfg.k_list.empty()) throw ConfigError("run_experiment: k list is empty");
  for (int k : cfg.k_list)
    if (k < 1) throw ConfigError("run_experiment: every k must be >= 1");

  const double trim = cfg.trim ? *cfg.trim : detail::default_trim(cfg.source);
  if (trim < 0.0 || trim >= 0.5)
    throw ConfigError("run_experiment: trim fraction must lie in [0, 0.5)");

  if (detail::deterministic_source(cfg.source) && cfg.realizations != 1)
    throw ConfigError(
        "run_experiment: this source is deterministic; rerunning it would only "
        "duplicate the spectrum, set realizations = 1");

  std::optional<Spectrum> file_levels;
  if (const auto* file = std::get_if<LevelFileSource>(&cfg.source))
    file_levels = load_level_file(file->path);

  const std::size_t n_k = cfg.k_list.size();
  std::vector<std::vector<std::vector<double>>> slots(
      static_cast<std::size_t>(cfg.realizations));

  detail::parallel_realizations(cfg.realizations, threads, [&](int i) {
    const auto spectra = detail::realize_spectra(
        cfg.source, RngStream(cfg.master_seed, static_cast<std::uint64_t>(i)),
        file_levels ? &*file_levels : nullptr);
    auto& mine = slots[static_cast<std::size_t>(i)];
    mine.resize(n_k);
    for (const Spectrum& raw : spectra) {
      const Spectrum trimmed = detail::trim_edges(raw, trim);
      for (std::size_t ki = 0; ki < n_k; ++ki) {
        const auto rs = kth_spacing_ratios(trimmed, cfg.k_list[ki], cfg.mode);
        auto& pool = mine[ki];
        pool.insert(pool.end(), rs.values.begin(), rs.values.end());
      }
    }
  });

  ExperimentReport report;
  report.config = cfg;
  report.config.trim = trim;

  const auto beta = detail::source_beta(cfg.source);
  for (std::size_t ki = 0; ki < n_k; ++ki) {
    std::vector<double> pooled;
    for (const auto& slot : slots)
      pooled.insert(pooled.end(), slot[ki].begin(), slot[ki].end());

    KResult res;
    res.k = cfg.k_list[ki];
    res.pooled_count = pooled.size();
    res.fit = fit_beta_prime(pooled, cfg.fit_grid.lo, cfg.fit_grid.hi, cfg.fit_grid.step);
    res.hist = histogram(pooled, cfg.hist_bins, cfg.hist_lo, cfg.hist_hi);
    if (beta) res.predicted_beta = predicted_beta_prime(*beta, res.k);
    report.per_k.push_back(std::move(res));
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

struct FiniteSizePoint {
  int dim = 0;
  std::vector<std::pair<int, double>> beta_fit_per_k;  // (k, fitted beta')
};

namespace detail {

inline SourceSpec with_dimension(const SourceSpec& source, int dim) {
  struct Visitor {
    int dim;
    SourceSpec operator()(GaussianEnsembleSpec s) const {
      s.dim = dim;
      return s;
    }
    SourceSpec operator()(CircularEnsembleSpec s) const {
      s.dim = dim;
      return s;
    }
    SourceSpec operator()(DefectXxzParams p) const {
      p.sites = dim;
      p.n_up = dim / 2;
      p.defect_site = std::max(1, dim / 2);
      return p;
    }
    SourceSpec operator()(ChiralChainParams p) const {
      p.sites = dim;
      p.n_up = dim / 2;
      return p;
    }
    SourceSpec operator()(KickedTopParams p) const {
      p.j = (dim - 1) / 2.0;
      return p;
    }
    SourceSpec operator()(IntermediateMapParams p) const {
      p.dim = dim;
      return p;
    }
    SourceSpec operator()(const LevelFileSource&) const {
      throw ConfigError("finite_size_scan: a fixed level file has no dimension knob");
    }
  };
  return std::visit(Visitor{dim}, source);
}

}  // namespace detail

/// Repeats the experiment over the given spectrum sizes (ascending), fitting
/// on a half-step grid, and returns the fitted beta' trajectory per k. For
/// spin chains the size parameter is the chain length; for the kicked top it
/// is the Hilbert-space dimension 2j + 1.
inline std::vector<FiniteSizePoint> finite_size_scan(const ExperimentConfig& cfg,
                                                     const std::vector<int>& dims,
                                                     int threads = 0) {
  if (dims.empty()) throw ConfigError("finite_size_scan: no dimensions given");
  for (std::size_t i = 0; i + 1 < dims.size(); ++i)
    if (dims[i] >= dims[i + 1])
      throw ConfigError("finite_size_scan: dimensions must be strictly ascending");

  std::vector<FiniteSizePoint> out;
  out.reserve(dims.size());
  for (int dim : dims) {
    ExperimentConfig scaled = cfg;
    scaled.source = detail::with_dimension(cfg.source, dim);
    scaled.fit_grid.step = 0.5;
    const ExperimentReport report = run_experiment(scaled, threads);
    FiniteSizePoint point;
    point.dim = dim;
    for (const auto& res : report.per_k)
      point.beta_fit_per_k.emplace_back(res.k, res.fit.beta_fit);
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace specstat
