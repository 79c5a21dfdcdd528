#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "specstat/errors.hpp"

namespace specstat {

namespace detail {

// Nodes and weights of the 15-point Kronrod rule with embedded 7-point
// Gauss rule on [-1,1] (QUADPACK dqk15 values). Even-index nodes carry the
// Gauss rule.
inline constexpr double kGk15Node[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};

inline constexpr double kGk15WeightK[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};

inline constexpr double kGk15WeightG[4] = {
    0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
    0.41795918367346938776};

// One Kronrod 15 panel; returns {integral, error estimate}.
template <class F>
std::pair<double, double> kronrod15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double fv[15];
  const double fc = f(center);
  fv[14] = fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kGk15Node[i];
    fv[2 * i] = f(center - dx);
    fv[2 * i + 1] = f(center + dx);
  }

  double resk = kGk15WeightK[7] * fc;
  double resg = kGk15WeightG[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double sum = fv[2 * i] + fv[2 * i + 1];
    resk += kGk15WeightK[i] * sum;
    if (i % 2 == 1) resg += kGk15WeightG[i / 2] * sum;
  }

  const double reskh = 0.5 * resk;
  double resasc = kGk15WeightK[7] * std::fabs(fc - reskh);
  for (int i = 0; i < 7; ++i)
    resasc += kGk15WeightK[i] * (std::fabs(fv[2 * i] - reskh) +
                                 std::fabs(fv[2 * i + 1] - reskh));
  resasc *= half;

  double err = std::fabs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));

  return {resk * half, err};
}

// Adaptive bisection on a finite interval with an absolute tolerance.
template <class F>
double adaptive_finite(F&& f, double a, double b, double tol) {
  struct Interval {
    double a, b;
  };
  constexpr int kMaxPanels = 20000;

  const double total_len = b - a;
  std::vector<Interval> stack{{a, b}};
  double sum = 0.0;
  int panels = 0;

  while (!stack.empty()) {
    const Interval iv = stack.back();
    stack.pop_back();
    if (++panels > kMaxPanels)
      throw NoConvergenceError("quadrature: interval budget exhausted");

    const auto [value, err] = kronrod15(f, iv.a, iv.b);
    const double local_tol = tol * ((iv.b - iv.a) / total_len);
    const double mid = 0.5 * (iv.a + iv.b);
    if (err <= local_tol || mid <= iv.a || mid >= iv.b) {
      if (!std::isfinite(value))
        throw NonFiniteError("quadrature: integrand produced a non-finite panel");
      sum += value;
    } else {
      stack.push_back({mid, iv.b});
      stack.push_back({iv.a, mid});
    }
  }
  return sum;
}

}  // namespace detail

/// Adaptive integration of f over [lower, upper] to absolute tolerance tol.
/// An infinite upper limit is handled by splitting at max(lower, 1) and
/// mapping the tail with r -> 1/u, which turns [s, inf) into (0, 1/s]:
///
///   int_s^inf f(r) dr = int_0^{1/s} f(1/u) / u^2 du
///
/// valid for integrands with polynomial decay. Deterministic for identical
/// inputs; throws NoConvergenceError when the panel budget cannot reach tol.
template <class F>
double integrate(F&& f, double lower, double upper, double tol = 1e-10) {
  if (!(tol > 0.0)) throw ConfigError("integrate: tol must be positive");
  if (!std::isfinite(lower)) throw ConfigError("integrate: lower limit must be finite");

  if (std::isinf(upper)) {
    const double split = std::max(lower, 1.0);
    auto tail = [&f](double u) { return f(1.0 / u) / (u * u); };
    if (lower < split) {
      return detail::adaptive_finite(f, lower, split, 0.5 * tol) +
             detail::adaptive_finite(tail, 0.0, 1.0 / split, 0.5 * tol);
    }
    return detail::adaptive_finite(tail, 0.0, 1.0 / split, tol);
  }

  if (!(lower < upper)) {
    if (lower == upper) return 0.0;
    throw ConfigError("integrate: lower must not exceed upper");
  }
  return detail::adaptive_finite(f, lower, upper, tol);
}

}  // namespace specstat
