#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "specstat/errors.hpp"
#include "specstat/linalg.hpp"
#include "specstat/rng.hpp"
#include "specstat/spectrum.hpp"

namespace specstat {

/// Gaussian ensemble: Dyson index beta in {1,2,4}, dim distinct levels.
struct GaussianEnsembleSpec {
  int beta = 1;
  int dim = 2;
};

/// Circular ensemble: Dyson index beta in {1,2,4}, dim distinct eigenphases.
struct CircularEnsembleSpec {
  int beta = 2;
  int dim = 2;
};

namespace detail {

inline void validate_ensemble(int beta, int dim, const char* who) {
  if (beta != 1 && beta != 2 && beta != 4)
    throw ConfigError(std::string(who) + ": beta must be 1, 2 or 4");
  if (dim < 1) throw ConfigError(std::string(who) + ": dim must be positive");
}

/// Symmetrized real Gaussian matrix (M + M^T)/2 with M iid standard normal.
inline Eigen::MatrixXd goe_matrix(int dim, RngStream& rng) {
  Eigen::MatrixXd m(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) m(i, j) = rng.gaussian();
  return 0.5 * (m + m.transpose()).eval();
}

/// Standard complex Gaussian entry: real and imaginary parts each of
/// variance 1/2.
inline std::complex<double> standard_complex_normal(RngStream& rng) {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  const double re = rng.gaussian();
  const double im = rng.gaussian();
  return {re * inv_sqrt2, im * inv_sqrt2};
}

/// Hermitized complex Gaussian matrix (M + M^dag)/2.
inline Eigen::MatrixXcd gue_matrix(int dim, RngStream& rng) {
  Eigen::MatrixXcd m(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) m(i, j) = standard_complex_normal(rng);
  return 0.5 * (m + m.adjoint()).eval();
}

/// Quaternion-self-dual Hermitian matrix [[A, B], [-conj(B), conj(A)]] of
/// size 2*dim with A Hermitian and B complex antisymmetric; its spectrum is
/// doubly degenerate (Kramers).
inline Eigen::MatrixXcd gse_matrix(int dim, RngStream& rng) {
  const Eigen::MatrixXcd a = gue_matrix(dim, rng);
  Eigen::MatrixXcd m(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) m(i, j) = standard_complex_normal(rng);
  const Eigen::MatrixXcd b = 0.5 * (m - m.transpose()).eval();

  Eigen::MatrixXcd h(2 * dim, 2 * dim);
  h.topLeftCorner(dim, dim) = a;
  h.topRightCorner(dim, dim) = b;
  h.bottomLeftCorner(dim, dim) = -b.conjugate();
  h.bottomRightCorner(dim, dim) = a.conjugate();
  return h;
}

/// Collapses a doubly degenerate sorted line spectrum of length 2N to its N
/// Kramers representatives (pair midpoints). Pairs must match within
/// rel_tol of the spectral width.
inline std::vector<double> dedupe_kramers_line(const std::vector<double>& levels,
                                               double rel_tol = 1e-8) {
  if (levels.size() % 2 != 0)
    throw KramersPairingError("Kramers deduplication needs an even level count");
  const double width = levels.back() - levels.front();
  std::vector<double> out;
  out.reserve(levels.size() / 2);
  for (std::size_t i = 0; i < levels.size(); i += 2) {
    const double gap = levels[i + 1] - levels[i];
    if (gap > rel_tol * width)
      throw KramersPairingError("Kramers pair gap " + std::to_string(gap) +
                                " exceeds tolerance");
    out.push_back(0.5 * (levels[i] + levels[i + 1]));
  }
  return out;
}

/// Kramers deduplication on the circle: a degenerate pair may straddle the
/// 0/2pi seam, so both pairing offsets are tried and the tighter one kept.
inline std::vector<double> dedupe_kramers_circle(const std::vector<double>& phases,
                                                 double rel_tol = 1e-8) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const std::size_t n2 = phases.size();
  if (n2 % 2 != 0)
    throw KramersPairingError("Kramers deduplication needs an even phase count");

  auto max_gap = [&](std::size_t offset) {
    double worst = 0.0;
    for (std::size_t i = offset; i + 1 < n2 + offset; i += 2) {
      const double a = phases[i % n2];
      double b = phases[(i + 1) % n2];
      if ((i + 1) % n2 == 0) b += two_pi;  // wrap pair
      worst = std::max(worst, b - a);
    }
    return worst;
  };

  const std::size_t offset = max_gap(0) <= max_gap(1) ? 0 : 1;
  if (max_gap(offset) > rel_tol * two_pi)
    throw KramersPairingError("Kramers phase pair gap exceeds tolerance");

  std::vector<double> out;
  out.reserve(n2 / 2);
  for (std::size_t i = offset; i + 1 < n2 + offset; i += 2) {
    const double a = phases[i % n2];
    double b = phases[(i + 1) % n2];
    if ((i + 1) % n2 == 0) b += two_pi;
    double mid = 0.5 * (a + b);
    if (mid >= two_pi) mid -= two_pi;
    out.push_back(mid);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Haar-distributed unitary: QR factorization of a complex Ginibre matrix
/// with the triangular factor's diagonal phases folded back into Q, which
/// makes the distribution exactly Haar rather than QR-convention dependent.
inline Eigen::MatrixXcd haar_unitary(int dim, RngStream& rng) {
  if (dim < 1) throw ConfigError("haar_unitary: dim must be positive");
  detail::pin_blas_threads();

  Eigen::MatrixXcd g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) g(i, j) = detail::standard_complex_normal(rng);

  std::vector<std::complex<double>> tau(static_cast<std::size_t>(dim));
  lapack_int info = LAPACKE_zgeqrf(LAPACK_COL_MAJOR, dim, dim, detail::lp(g.data()),
                                   dim, detail::lp(tau.data()));
  if (info != 0) throw EigenSolverError("zgeqrf failed with info " + std::to_string(info));

  std::vector<std::complex<double>> diag_phase(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) {
    const std::complex<double> r = g(j, j);
    const double mod = std::abs(r);
    diag_phase[static_cast<std::size_t>(j)] = mod > 0.0 ? r / mod : 1.0;
  }

  info = LAPACKE_zungqr(LAPACK_COL_MAJOR, dim, dim, dim, detail::lp(g.data()), dim,
                        detail::lp(tau.data()));
  if (info != 0) throw EigenSolverError("zungqr failed with info " + std::to_string(info));

  for (int j = 0; j < dim; ++j) g.col(j) *= diag_phase[static_cast<std::size_t>(j)];
  return g;
}

/// Spectrum of one Gaussian-ensemble realization, sorted ascending, length
/// spec.dim. beta = 4 is built at doubled size and Kramers-deduplicated.
inline Spectrum sample_gaussian(const GaussianEnsembleSpec& spec, RngStream& rng) {
  detail::validate_ensemble(spec.beta, spec.dim, "sample_gaussian");
  switch (spec.beta) {
    case 1:
      return eigenvalues_hermitian(detail::goe_matrix(spec.dim, rng));
    case 2:
      return eigenvalues_hermitian(detail::gue_matrix(spec.dim, rng));
    default: {
      Spectrum doubled = eigenvalues_hermitian(detail::gse_matrix(spec.dim, rng));
      return Spectrum{detail::dedupe_kramers_line(doubled.levels), SpectrumKind::line};
    }
  }
}

/// Eigenphases of one circular-ensemble realization, sorted in [0, 2pi).
/// beta = 1 uses W = U^T U; beta = 4 uses the self-dual W = U^R U at doubled
/// size with Kramers deduplication; beta = 2 is the Haar unitary itself.
inline Spectrum sample_circular(const CircularEnsembleSpec& spec, RngStream& rng) {
  detail::validate_ensemble(spec.beta, spec.dim, "sample_circular");
  switch (spec.beta) {
    case 2:
      return eigenphases_unitary(haar_unitary(spec.dim, rng));
    case 1: {
      const Eigen::MatrixXcd u = haar_unitary(spec.dim, rng);
      Eigen::MatrixXcd w = u.transpose() * u;
      // enforce the exact symmetry of U^T U
      for (int j = 0; j < spec.dim; ++j)
        for (int i = j + 1; i < spec.dim; ++i) w(i, j) = w(j, i);
      return eigenphases_unitary(w);
    }
    default: {
      const int n = spec.dim;
      const Eigen::MatrixXcd u = haar_unitary(2 * n, rng);
      // dual U^R = J U^T J^-1 with J the standard symplectic form,
      // assembled blockwise from U^T = [[P, Q], [R, S]] as [[S, -R], [-Q, P]]
      const Eigen::MatrixXcd ut = u.transpose();
      Eigen::MatrixXcd ur(2 * n, 2 * n);
      ur.topLeftCorner(n, n) = ut.bottomRightCorner(n, n);
      ur.topRightCorner(n, n) = -ut.bottomLeftCorner(n, n);
      ur.bottomLeftCorner(n, n) = -ut.topRightCorner(n, n);
      ur.bottomRightCorner(n, n) = ut.topLeftCorner(n, n);
      const Spectrum doubled = eigenphases_unitary(ur * u);
      return Spectrum{detail::dedupe_kramers_circle(doubled.levels),
                      SpectrumKind::circle};
    }
  }
}

}  // namespace specstat
