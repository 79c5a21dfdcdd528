#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "specstat/errors.hpp"
#include "specstat/pipeline.hpp"
#include "specstat/ratio_stats.hpp"

namespace specstat {

enum class ReportFormat { json, csv };

namespace detail {

// 17 significant digits: lossless for IEEE doubles
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string num(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%llu", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string num(long v) { return std::to_string(v); }
inline std::string num(int v) { return std::to_string(v); }

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

inline std::string source_to_json(const SourceSpec& source) {
  struct Visitor {
    std::string operator()(const GaussianEnsembleSpec& s) const {
      return "{\"type\":\"gaussian\",\"beta\":" + num(s.beta) +
             ",\"dim\":" + num(s.dim) + "}";
    }
    std::string operator()(const CircularEnsembleSpec& s) const {
      return "{\"type\":\"circular\",\"beta\":" + num(s.beta) +
             ",\"dim\":" + num(s.dim) + "}";
    }
    std::string operator()(const DefectXxzParams& p) const {
      return "{\"type\":\"defect-xxz\",\"sites\":" + num(p.sites) +
             ",\"omega\":" + num(p.omega) + ",\"eps_d\":" + num(p.eps_d) +
             ",\"defect_site\":" + num(p.defect_site) + ",\"j_xy\":" + num(p.j_xy) +
             ",\"j_z\":" + num(p.j_z) + ",\"n_up\":" + num(p.n_up) + "}";
    }
    std::string operator()(const ChiralChainParams& p) const {
      return "{\"type\":\"chiral-chain\",\"sites\":" + num(p.sites) +
             ",\"j1\":" + num(p.j1) + ",\"j2\":" + num(p.j2) + ",\"h\":" + num(p.h) +
             ",\"n_up\":" + num(p.n_up) + "}";
    }
    std::string operator()(const KickedTopParams& p) const {
      return "{\"type\":\"kicked-top\",\"j\":" + num(p.j) + ",\"p\":" + num(p.p) +
             ",\"q\":" + num(p.q) +
             ",\"parity_split\":" + (p.parity_split ? "true" : "false") + "}";
    }
    std::string operator()(const IntermediateMapParams& p) const {
      return "{\"type\":\"intermediate-map\",\"dim\":" + num(p.dim) +
             ",\"gamma\":" + num(p.gamma) + "}";
    }
    std::string operator()(const LevelFileSource& f) const {
      return "{\"type\":\"file\",\"path\":\"" + json_escape(f.path) + "\"}";
    }
  };
  return std::visit(Visitor{}, source);
}

inline std::string config_to_json(const ExperimentConfig& cfg) {
  std::string out = "{\"source\":" + source_to_json(cfg.source);
  out += ",\"realizations\":" + num(cfg.realizations);
  out += ",\"k_list\":[";
  for (std::size_t i = 0; i < cfg.k_list.size(); ++i) {
    if (i) out += ',';
    out += num(cfg.k_list[i]);
  }
  out += "],\"mode\":\"";
  out += (cfg.mode == RatioMode::sliding ? "sliding" : "strided");
  out += "\",\"master_seed\":" + num(cfg.master_seed);
  out += ",\"fit_grid\":{\"lo\":" + num(cfg.fit_grid.lo) +
         ",\"hi\":" + num(cfg.fit_grid.hi) + ",\"step\":" + num(cfg.fit_grid.step) + "}";
  out += ",\"trim\":";
  out += cfg.trim ? num(*cfg.trim) : "null";
  out += ",\"histogram_bins\":" + num(cfg.hist_bins);
  out += ",\"histogram_lo\":" + num(cfg.hist_lo);
  out += ",\"histogram_hi\":" + num(cfg.hist_hi);
  out += "}";
  return out;
}

inline void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out << content;
    if (!out) throw IoError("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot move '" + tmp + "' to '" + path + "'");
  }
}

inline std::string per_k_path(const std::string& dest, int k) {
  const auto slash = dest.find_last_of('/');
  const auto dot = dest.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return dest + "_k" + std::to_string(k);
  return dest.substr(0, dot) + "_k" + std::to_string(k) + dest.substr(dot);
}

}  // namespace detail

/// Serializes the full report (config echo, per-k fit, D curve, histogram)
/// as one JSON document. Numbers carry 17 significant digits so a reparse
/// reproduces every double bitwise.
inline std::string report_to_json(const ExperimentReport& report) {
  using detail::num;
  std::string out = "{\"config\":" + detail::config_to_json(report.config);
  out += ",\"results\":[";
  for (std::size_t i = 0; i < report.per_k.size(); ++i) {
    const KResult& res = report.per_k[i];
    if (i) out += ',';
    out += "{\"k\":" + num(res.k);
    if (res.predicted_beta) out += ",\"predicted_beta\":" + num(*res.predicted_beta);
    out += ",\"pooled_count\":" + num(res.pooled_count);
    out += ",\"fit\":{\"beta_fit\":" + num(res.fit.beta_fit);
    out += ",\"ks_stat\":" + num(res.fit.ks_stat);
    out += ",\"ks_p\":" + num(res.fit.ks_p);
    out += ",\"mean_r\":" + num(res.fit.mean_r);
    out += ",\"n\":" + num(res.fit.n);
    out += ",\"boundary_hit\":";
    out += res.fit.boundary_hit ? "true" : "false";
    out += ",\"d_curve\":[";
    for (std::size_t d = 0; d < res.fit.d_curve.size(); ++d) {
      if (d) out += ',';
      out += '[' + num(res.fit.d_curve[d].first) + ',' + num(res.fit.d_curve[d].second) + ']';
    }
    out += "]},\"histogram\":{\"centers\":[";
    for (std::size_t b = 0; b < res.hist.size(); ++b) {
      if (b) out += ',';
      out += num(res.hist[b].center);
    }
    out += "],\"densities\":[";
    for (std::size_t b = 0; b < res.hist.size(); ++b) {
      if (b) out += ',';
      out += num(res.hist[b].density);
    }
    out += "]}}";
  }
  out += "]}\n";
  return out;
}

/// CSV rendering of one per-k result: bin centers with the empirical density
/// and the surmise density at the fitted and at the predicted beta'
/// (nan when the source beta is unknown).
inline std::string k_result_to_csv(const KResult& res) {
  using detail::num;
  const SurmiseParams fit_params = surmise_params(res.fit.beta_fit);
  const bool have_predicted = res.predicted_beta.has_value();
  SurmiseParams predicted_params;
  if (have_predicted)
    predicted_params = surmise_params(static_cast<double>(*res.predicted_beta));

  std::string out =
      "bin_center,empirical_density,surmise_density_at_fit,surmise_density_at_predicted\n";
  for (const HistogramBin& bin : res.hist) {
    out += num(bin.center);
    out += ',';
    out += num(bin.density);
    out += ',';
    out += num(surmise_pdf(bin.center, fit_params));
    out += ',';
    out += have_predicted ? num(surmise_pdf(bin.center, predicted_params)) : "nan";
    out += '\n';
  }
  return out;
}

/// Writes the report to dest. JSON produces a single document; CSV produces
/// one file per k (suffix _k<k> before the extension). Writes go through a
/// temp file and a rename. Returns the written paths.
inline std::vector<std::string> write_report(const ExperimentReport& report,
                                             ReportFormat format,
                                             const std::string& dest) {
  std::vector<std::string> written;
  if (format == ReportFormat::json) {
    detail::write_file_atomic(dest, report_to_json(report));
    written.push_back(dest);
    return written;
  }
  for (const KResult& res : report.per_k) {
    const std::string path = detail::per_k_path(dest, res.k);
    detail::write_file_atomic(path, k_result_to_csv(res));
    written.push_back(path);
  }
  return written;
}

/// Finite-size trajectories as JSON.
inline std::string scan_to_json(const ExperimentConfig& cfg,
                                const std::vector<FiniteSizePoint>& points) {
  using detail::num;
  std::string out = "{\"config\":" + detail::config_to_json(cfg);
  out += ",\"trajectory\":[";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) out += ',';
    out += "{\"dim\":" + num(points[i].dim) + ",\"fits\":[";
    for (std::size_t f = 0; f < points[i].beta_fit_per_k.size(); ++f) {
      if (f) out += ',';
      out += "{\"k\":" + num(points[i].beta_fit_per_k[f].first) +
             ",\"beta_fit\":" + num(points[i].beta_fit_per_k[f].second) + "}";
    }
    out += "]}";
  }
  out += "]}\n";
  return out;
}

/// Finite-size trajectories as CSV rows (dim, k, beta_fit).
inline std::string scan_to_csv(const std::vector<FiniteSizePoint>& points) {
  using detail::num;
  std::string out = "dim,k,beta_fit\n";
  for (const auto& point : points)
    for (const auto& [k, beta_fit] : point.beta_fit_per_k) {
      out += num(point.dim);
      out += ',';
      out += num(k);
      out += ',';
      out += num(beta_fit);
      out += '\n';
    }
  return out;
}

inline void write_scan(const ExperimentConfig& cfg,
                       const std::vector<FiniteSizePoint>& points, ReportFormat format,
                       const std::string& dest) {
  detail::write_file_atomic(
      dest, format == ReportFormat::json ? scan_to_json(cfg, points) : scan_to_csv(points));
}

}  // namespace specstat
