#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "specstat/errors.hpp"
#include "specstat/quadrature.hpp"
#include "specstat/spectrum.hpp"

namespace specstat {

// ---------------------------------------------------------------------------
// k-th order non-overlapping spacing ratios
// ---------------------------------------------------------------------------

enum class RatioMode { sliding, strided };

/// Output of the ratio transform together with the parameters that made it.
struct RatioSequence {
  std::vector<double> values;
  int k = 1;
  RatioMode mode = RatioMode::sliding;
  std::size_t source_len = 0;
};

/// k-th order spacing ratios r_i = (E_{i+2k} - E_{i+k}) / (E_{i+k} - E_i).
///
/// sliding: i advances by 1, giving len - 2k ratios.
/// strided: i advances by k, giving floor((len-1)/k) - 1 ratios; consecutive
///          ratios share one k-spacing (numerator of one is the denominator
///          of the next), so no spacing is reused inside a ratio window.
///
/// For circle spectra the sorted phases are used as-is; with cyclic = true
/// the sequence is closed by re-appending the first 2k phases shifted by
/// 2pi, so the wraparound spacings contribute as well.
inline RatioSequence kth_spacing_ratios(const Spectrum& s, int k,
                                        RatioMode mode = RatioMode::sliding,
                                        bool cyclic = false) {
  if (k < 1) throw ConfigError("kth_spacing_ratios: k must be >= 1");
  s.validate();
  const std::size_t n = s.size();
  if (n < static_cast<std::size_t>(2 * k + 1))
    throw TooFewLevelsError("kth_spacing_ratios: need at least 2k+1 levels, got " +
                            std::to_string(n));

  std::vector<double> levels = s.levels;
  if (cyclic && s.kind == SpectrumKind::circle) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i < 2 * k; ++i)
      levels.push_back(s.levels[static_cast<std::size_t>(i)] + two_pi);
  }

  const double width = levels.back() - levels.front();
  const double threshold = 1e-12 * width;
  if (!(width > 0.0))
    throw DegenerateSpacingError("kth_spacing_ratios: spectrum has zero width");

  RatioSequence out;
  out.k = k;
  out.mode = mode;
  out.source_len = n;

  const std::size_t uk = static_cast<std::size_t>(k);
  const std::size_t last_i = levels.size() - 2 * uk;  // one past the last i
  const std::size_t step = mode == RatioMode::sliding ? 1 : uk;
  out.values.reserve((last_i + step - 1) / step);
  for (std::size_t i = 0; i < last_i; i += step) {
    const double den = levels[i + uk] - levels[i];
    const double num = levels[i + 2 * uk] - levels[i + uk];
    if (den < threshold || num < threshold)
      throw DegenerateSpacingError(
          "kth_spacing_ratios: degenerate spacing near level " + std::to_string(i) +
          " (deduplicate degeneracies first)");
    out.values.push_back(num / den);
  }
  return out;
}

/// Effective Dyson index of the k-th order ratio distribution:
/// beta' = k(k+1)/2 * beta + (k - 1).
inline long predicted_beta_prime(int beta, int k) {
  if (beta != 1 && beta != 2 && beta != 4)
    throw ConfigError("predicted_beta_prime: beta must be 1, 2 or 4");
  if (k < 1) throw ConfigError("predicted_beta_prime: k must be >= 1");
  const long lk = k;
  return lk * (lk + 1) / 2 * beta + (lk - 1);
}

// ---------------------------------------------------------------------------
// Generalized ratio surmise P(r, beta') = C (r + r^2)^b / (1 + r + r^2)^(1+3b/2)
// ---------------------------------------------------------------------------

namespace detail {

// log of the unnormalized density; -inf at r = 0.
inline double surmise_log_kernel(double r, double beta_eff) {
  return beta_eff * std::log(r + r * r) -
         (1.0 + 1.5 * beta_eff) * std::log1p(r + r * r);
}

}  // namespace detail

/// Effective index with its normalization, kept in log form so that large
/// beta' (where the raw normalization over/underflows) stays representable.
struct SurmiseParams {
  double beta_eff = 1.0;
  double log_norm = 0.0;

  double norm() const { return std::exp(log_norm); }
};

/// Computes the normalization constant 1 / int_0^inf (r+r^2)^b (1+r+r^2)^-(1+3b/2) dr.
/// The integrand is rescaled by its value at r = 1 before quadrature so the
/// absolute tolerance of 1e-12 acts as a relative one for any beta'.
inline SurmiseParams surmise_params(double beta_eff) {
  if (!(beta_eff > 0.0)) throw ConfigError("surmise_params: beta' must be positive");
  const double shift = -detail::surmise_log_kernel(1.0, beta_eff);
  auto shifted = [beta_eff, shift](double r) {
    return r <= 0.0 ? 0.0 : std::exp(detail::surmise_log_kernel(r, beta_eff) + shift);
  };
  const double scaled_integral =
      integrate(shifted, 0.0, std::numeric_limits<double>::infinity(), 1e-12);
  if (!(scaled_integral > 0.0) || !std::isfinite(scaled_integral))
    throw NoConvergenceError("surmise_params: normalization integral failed");
  return SurmiseParams{beta_eff, shift - std::log(scaled_integral)};
}

inline double surmise_pdf(double r, const SurmiseParams& p) {
  if (r <= 0.0) return 0.0;
  return std::exp(p.log_norm + detail::surmise_log_kernel(r, p.beta_eff));
}

/// CDF by quadrature. The tail is folded back with the identity
/// P(1/r) = r^2 P(r), which gives int_r^inf P = int_0^{1/r} P, so only
/// finite intervals inside [0, 1] are ever integrated.
inline double surmise_cdf(double r, const SurmiseParams& p) {
  if (r <= 0.0) return 0.0;
  if (std::isinf(r)) return 1.0;
  auto pdf = [&p](double x) { return surmise_pdf(x, p); };
  if (r <= 1.0) return integrate(pdf, 0.0, r, 1e-10);
  return 1.0 - integrate(pdf, 0.0, 1.0 / r, 1e-10);
}

/// Mean of the surmise distribution.
inline double surmise_mean(const SurmiseParams& p) {
  auto weighted = [&p](double r) { return r * surmise_pdf(r, p); };
  return integrate(weighted, 0.0, std::numeric_limits<double>::infinity(), 1e-10);
}

namespace detail {

/// Cumulative table of the surmise CDF on [0,1] with cubic Hermite
/// interpolation (the pdf supplies exact slopes). Values above 1 use the
/// reflection cdf(r) = 1 - cdf(1/r). Interpolation error is below 1e-10
/// for beta' up to a few hundred, far under the statistical scales of the
/// D and KS statistics it feeds.
class SurmiseCdfTable {
 public:
  explicit SurmiseCdfTable(const SurmiseParams& p, int panels = 2048)
      : panels_(panels), cum_(static_cast<std::size_t>(panels) + 1),
        pdf_(static_cast<std::size_t>(panels) + 1) {
    const double h = 1.0 / panels;
    auto pdf = [&p](double x) { return surmise_pdf(x, p); };
    cum_[0] = 0.0;
    pdf_[0] = 0.0;
    for (int i = 0; i < panels; ++i) {
      const double a = i * h;
      const double b = (i + 1) * h;
      cum_[static_cast<std::size_t>(i) + 1] =
          cum_[static_cast<std::size_t>(i)] + kronrod15(pdf, a, b).first;
      pdf_[static_cast<std::size_t>(i) + 1] = pdf(b);
    }
  }

  double operator()(double r) const {
    if (r <= 0.0) return 0.0;
    if (r >= 1.0) return r == 1.0 ? cum_.back() : 1.0 - eval_unit(1.0 / r);
    return eval_unit(r);
  }

 private:
  double eval_unit(double r) const {
    const double x = r * panels_;
    int i = static_cast<int>(x);
    if (i >= panels_) i = panels_ - 1;
    const double t = x - i;
    const double h = 1.0 / panels_;
    const std::size_t u = static_cast<std::size_t>(i);
    const double t2 = t * t, t3 = t2 * t;
    return cum_[u] * (2 * t3 - 3 * t2 + 1) + h * pdf_[u] * (t3 - 2 * t2 + t) +
           cum_[u + 1] * (-2 * t3 + 3 * t2) + h * pdf_[u + 1] * (t3 - t2);
  }

  int panels_;
  std::vector<double> cum_;
  std::vector<double> pdf_;
};

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 lambda^2}.
inline double kolmogorov_p(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j < 100000; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    if (term < 1e-12) break;
    sum += sign * term;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Fitting: D statistic, KS test, beta' scan
// ---------------------------------------------------------------------------

/// Mean absolute gap between the empirical CDF (convention F(r_(i)) = i/n at
/// the sorted sample points) and the surmise CDF:
/// D = (1/n) sum_i |i/n - F(r_(i), beta')|.
inline double cdf_distance(const std::vector<double>& ratios, const SurmiseParams& p) {
  const std::size_t n = ratios.size();
  if (n == 0) throw EmptySampleError("cdf_distance: empty sample");
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const detail::SurmiseCdfTable cdf(p);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    sum += std::fabs(static_cast<double>(i + 1) / n - cdf(sorted[i]));
  return sum / static_cast<double>(n);
}

inline double cdf_distance(const RatioSequence& rs, const SurmiseParams& p) {
  return cdf_distance(rs.values, p);
}

/// One-sample Kolmogorov-Smirnov statistic and asymptotic p-value against
/// the surmise CDF at p.beta_eff.
inline std::pair<double, double> ks_test(const std::vector<double>& ratios,
                                         const SurmiseParams& p) {
  const std::size_t n = ratios.size();
  if (n == 0) throw EmptySampleError("ks_test: empty sample");
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const detail::SurmiseCdfTable cdf(p);
  double stat = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(sorted[i]);
    stat = std::max(stat, std::max(static_cast<double>(i + 1) / n - f,
                                   f - static_cast<double>(i) / n));
  }
  const double lambda = std::sqrt(static_cast<double>(n)) * stat;
  return {stat, detail::kolmogorov_p(lambda)};
}

inline std::pair<double, double> ks_test(const RatioSequence& rs, const SurmiseParams& p) {
  return ks_test(rs.values, p);
}

/// Result of a beta' grid scan plus the summary statistics of the sample.
struct FitReport {
  double beta_fit = 0.0;
  std::vector<std::pair<double, double>> d_curve;  // (beta', D)
  double ks_stat = 0.0;
  double ks_p = 0.0;
  double mean_r = 0.0;
  std::size_t n = 0;
  bool boundary_hit = false;  // argmin landed on a grid edge
};

/// Scans beta' over [search_lo, search_hi] in steps of `step`, fills the
/// D(beta') curve and picks the grid argmin (ties break toward smaller
/// beta'). The KS test is evaluated at the fitted beta'.
inline FitReport fit_beta_prime(const std::vector<double>& ratios, double search_lo,
                                double search_hi, double step) {
  if (!(search_lo > 0.0) || !(search_lo < search_hi) || !(step > 0.0))
    throw ConfigError("fit_beta_prime: need 0 < lo < hi and step > 0");
  const std::size_t n = ratios.size();
  if (n == 0) throw EmptySampleError("fit_beta_prime: empty sample");

  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());

  const int points = static_cast<int>((search_hi - search_lo) / step + 1e-9) + 1;
  FitReport report;
  report.d_curve.reserve(static_cast<std::size_t>(points));
  report.n = n;

  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int idx = 0; idx < points; ++idx) {
    const double b = search_lo + idx * step;
    const SurmiseParams p = surmise_params(b);
    const detail::SurmiseCdfTable cdf(p);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      sum += std::fabs(static_cast<double>(i + 1) / n - cdf(sorted[i]));
    const double d = sum / static_cast<double>(n);
    report.d_curve.emplace_back(b, d);
    if (d < best_d) {
      best_d = d;
      best = idx;
    }
  }

  report.beta_fit = search_lo + best * step;
  report.boundary_hit = (best == 0 || best == points - 1);

  const auto [stat, pval] = ks_test(ratios, surmise_params(report.beta_fit));
  report.ks_stat = stat;
  report.ks_p = pval;

  double sum = 0.0;
  for (double v : ratios) sum += v;
  report.mean_r = sum / static_cast<double>(n);
  return report;
}

inline FitReport fit_beta_prime(const RatioSequence& rs, double search_lo,
                                double search_hi, double step) {
  return fit_beta_prime(rs.values, search_lo, search_hi, step);
}

// ---------------------------------------------------------------------------
// Histogram
// ---------------------------------------------------------------------------

struct HistogramBin {
  double center = 0.0;
  double density = 0.0;
};

/// Density histogram over [lo, hi): sum of density * binwidth equals the
/// fraction of the sample inside the range; out-of-range values count toward
/// the total but are not binned.
inline std::vector<HistogramBin> histogram(const std::vector<double>& values, int bins,
                                           double lo, double hi) {
  if (bins < 1 || !(lo < hi)) throw ConfigError("histogram: need bins >= 1 and lo < hi");
  if (values.empty()) throw EmptySampleError("histogram: empty sample");

  const double w = (hi - lo) / bins;
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    if (v < lo || v >= hi) continue;
    int idx = static_cast<int>((v - lo) / w);
    if (idx >= bins) idx = bins - 1;
    ++counts[static_cast<std::size_t>(idx)];
  }

  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  const double scale = 1.0 / (static_cast<double>(values.size()) * w);
  for (int i = 0; i < bins; ++i) {
    out[static_cast<std::size_t>(i)].center = lo + (i + 0.5) * w;
    out[static_cast<std::size_t>(i)].density =
        static_cast<double>(counts[static_cast<std::size_t>(i)]) * scale;
  }
  return out;
}

inline std::vector<HistogramBin> histogram(const RatioSequence& rs, int bins, double lo,
                                           double hi) {
  return histogram(rs.values, bins, lo, hi);
}

}  // namespace specstat
