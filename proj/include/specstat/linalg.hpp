#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "specstat/errors.hpp"
#include "specstat/spectrum.hpp"

extern "C" void openblas_set_num_threads(int);

namespace specstat {

namespace detail {

// Decompositions run on a single BLAS thread so that results do not depend
// on how many worker threads the caller uses.
inline void pin_blas_threads() {
  static std::once_flag flag;
  std::call_once(flag, [] { openblas_set_num_threads(1); });
}

inline lapack_complex_double* lp(std::complex<double>* p) {
  return reinterpret_cast<lapack_complex_double*>(p);
}

template <class Mat>
void require_finite(const Mat& m, const char* who) {
  if (!m.allFinite()) throw NonFiniteError(std::string(who) + ": matrix has non-finite entries");
}

template <class Mat>
void require_square(const Mat& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw ConfigError(std::string(who) + ": matrix must be square and non-empty");
}

inline void check_eigenvalue_sum(double sum, double trace, Eigen::Index dim,
                                 double max_abs_entry) {
  const double tol = 1e-8 * static_cast<double>(dim) * std::max(max_abs_entry, 1.0);
  if (std::fabs(sum - trace) > tol)
    throw EigenSolverError("hermitian eigensolver: eigenvalue sum deviates from trace");
}

}  // namespace detail

/// All eigenvalues of a real symmetric matrix, sorted ascending.
/// Input must be symmetric within 1e-10 per entry.
inline Spectrum eigenvalues_hermitian(const Eigen::MatrixXd& m) {
  detail::require_square(m, "eigenvalues_hermitian");
  detail::require_finite(m, "eigenvalues_hermitian");
  const Eigen::Index n = m.rows();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw NotHermitianError("eigenvalues_hermitian: matrix is not symmetric");

  detail::pin_blas_threads();
  Eigen::MatrixXd a = m;
  std::vector<double> w(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'L',
                                        static_cast<lapack_int>(n), a.data(),
                                        static_cast<lapack_int>(n), w.data());
  if (info != 0)
    throw EigenSolverError("dsyev failed with info " + std::to_string(info));

  double sum = 0.0;
  for (double v : w) sum += v;
  detail::check_eigenvalue_sum(sum, m.trace(), n, m.cwiseAbs().maxCoeff());
  return Spectrum{std::move(w), SpectrumKind::line};
}

/// All eigenvalues of a complex Hermitian matrix, sorted ascending.
/// Input must be Hermitian within 1e-10 per entry.
inline Spectrum eigenvalues_hermitian(const Eigen::MatrixXcd& m) {
  detail::require_square(m, "eigenvalues_hermitian");
  detail::require_finite(m, "eigenvalues_hermitian");
  const Eigen::Index n = m.rows();
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw NotHermitianError("eigenvalues_hermitian: matrix is not Hermitian");

  detail::pin_blas_threads();
  Eigen::MatrixXcd a = m;
  std::vector<double> w(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zheev(LAPACK_COL_MAJOR, 'N', 'L',
                                        static_cast<lapack_int>(n),
                                        detail::lp(a.data()),
                                        static_cast<lapack_int>(n), w.data());
  if (info != 0)
    throw EigenSolverError("zheev failed with info " + std::to_string(info));

  double sum = 0.0;
  for (double v : w) sum += v;
  detail::check_eigenvalue_sum(sum, m.trace().real(), n, m.cwiseAbs().maxCoeff());
  return Spectrum{std::move(w), SpectrumKind::line};
}

struct HermitianEigensystem {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // columns
};

/// Eigenvalues and eigenvectors of a complex Hermitian matrix.
inline HermitianEigensystem hermitian_eigensystem(const Eigen::MatrixXcd& m) {
  detail::require_square(m, "hermitian_eigensystem");
  detail::require_finite(m, "hermitian_eigensystem");
  const Eigen::Index n = m.rows();
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw NotHermitianError("hermitian_eigensystem: matrix is not Hermitian");

  detail::pin_blas_threads();
  HermitianEigensystem out;
  out.vectors = m;
  out.values.resize(n);
  const lapack_int info = LAPACKE_zheev(LAPACK_COL_MAJOR, 'V', 'L',
                                        static_cast<lapack_int>(n),
                                        detail::lp(out.vectors.data()),
                                        static_cast<lapack_int>(n),
                                        out.values.data());
  if (info != 0)
    throw EigenSolverError("zheev failed with info " + std::to_string(info));
  return out;
}

/// Eigenphases of a unitary matrix: arg of each eigenvalue mapped to
/// [0, 2pi), sorted ascending. Unitarity is verified exactly (U^dag U = I
/// within 1e-8 per entry) for dim <= 512; for larger matrices the check is
/// carried by the eigenvalue moduli, which must lie within 1e-8 of 1.
inline Spectrum eigenphases_unitary(const Eigen::MatrixXcd& m) {
  detail::require_square(m, "eigenphases_unitary");
  detail::require_finite(m, "eigenphases_unitary");
  const Eigen::Index n = m.rows();

  if (n <= 512) {
    Eigen::MatrixXcd gram = m.adjoint() * m;
    gram.diagonal().array() -= 1.0;
    if (gram.cwiseAbs().maxCoeff() > 1e-8)
      throw NotUnitaryError("eigenphases_unitary: U^dag U deviates from identity");
  }

  detail::pin_blas_threads();
  Eigen::MatrixXcd a = m;
  std::vector<std::complex<double>> lambda(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'N', static_cast<lapack_int>(n),
      detail::lp(a.data()), static_cast<lapack_int>(n),
      detail::lp(lambda.data()), nullptr, 1, nullptr, 1);
  if (info != 0)
    throw EigenSolverError("zgeev failed with info " + std::to_string(info));

  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> phases;
  phases.reserve(lambda.size());
  for (const auto& ev : lambda) {
    if (std::fabs(std::abs(ev) - 1.0) > 1e-8)
      throw NotUnitaryError("eigenphases_unitary: eigenvalue modulus deviates from 1");
    double theta = std::arg(ev);
    if (theta < 0.0) theta += two_pi;
    if (theta >= two_pi) theta = 0.0;
    phases.push_back(theta);
  }
  std::sort(phases.begin(), phases.end());
  return Spectrum{std::move(phases), SpectrumKind::circle};
}

}  // namespace specstat
