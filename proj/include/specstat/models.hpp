#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specstat/errors.hpp"
#include "specstat/linalg.hpp"
#include "specstat/rng.hpp"

namespace specstat {

/// Hard cap on magnetization-sector dimensions; builders refuse larger bases.
inline constexpr std::size_t kBasisDimCap = 65536;

/// Spin-1/2 XXZ chain with a Zeeman field and one defect site (open chain).
/// Site indices are 1-based; n_up selects the conserved-magnetization sector.
struct DefectXxzParams {
  int sites = 14;
  double omega = 0.0;
  double eps_d = 0.5;
  int defect_site = 7;
  double j_xy = 1.0;
  double j_z = 0.5;
  int n_up = 7;
};

/// Heisenberg chain with Gaussian random z fields and a chirality-breaking
/// three-spin term (open chain). Couplings multiply spin-1/2 operators;
/// studies quoting Pauli-matrix couplings translate as j2 -> 2 j2/j1 and
/// h -> h/(2 j1) in these units, which is where the defaults come from.
struct ChiralChainParams {
  int sites = 12;
  double j1 = 1.0;
  double j2 = 2.0;
  double h = 0.5;
  int n_up = 6;
};

/// Periodically kicked top: torsion strength q, precession angle p, angular
/// momentum j (dimension 2j + 1).
struct KickedTopParams {
  double j = 200.0;
  double p = 1.7;
  double q = 10.0;
  bool parity_split = true;
};

/// One or two unitary blocks: the full Floquet operator, or its two parity
/// sectors when the top is desymmetrized.
struct KickedTopOperator {
  std::vector<Eigen::MatrixXcd> blocks;
};

/// Quantized interval-exchange ("intermediate") map of dimension N with
/// irrational parameter gamma and random row phases.
struct IntermediateMapParams {
  int dim = 2000;
  double gamma = 0.61803398874989484820;  // (sqrt(5) - 1) / 2
};

namespace detail {

// Basis states are bit masks: bit i set means site i+1 carries spin up
// (m = +1/2). Masks are enumerated in increasing numeric order.

inline std::vector<std::uint32_t> sector_basis(int sites, int n_up) {
  if (sites < 1 || sites > 24)
    throw ConfigError("spin basis: sites must be between 1 and 24");
  if (n_up < 0 || n_up > sites)
    throw SectorEmptyError("spin basis: magnetization sector " + std::to_string(n_up) +
                           " of " + std::to_string(sites) + " sites is empty");
  std::vector<std::uint32_t> basis;
  const std::uint32_t limit = 1u << sites;
  for (std::uint32_t m = 0; m < limit; ++m)
    if (std::popcount(m) == n_up) basis.push_back(m);
  return basis;
}

inline std::vector<std::uint32_t> full_basis(int sites) {
  if (sites < 1 || sites > 24)
    throw ConfigError("spin basis: sites must be between 1 and 24");
  std::vector<std::uint32_t> basis(std::size_t{1} << sites);
  for (std::size_t m = 0; m < basis.size(); ++m)
    basis[m] = static_cast<std::uint32_t>(m);
  return basis;
}

inline void check_basis_cap(std::size_t dim, std::size_t cap) {
  if (dim > cap)
    throw DimensionOverflowError("spin basis dimension " + std::to_string(dim) +
                                 " exceeds the cap of " + std::to_string(cap));
}

// index_of[mask] = basis position, or -1 outside the basis
inline std::vector<std::int32_t> invert_basis(const std::vector<std::uint32_t>& basis,
                                              int sites) {
  std::vector<std::int32_t> index_of(std::size_t{1} << sites, -1);
  for (std::size_t i = 0; i < basis.size(); ++i)
    index_of[basis[i]] = static_cast<std::int32_t>(i);
  return index_of;
}

/// Defect-XXZ Hamiltonian on an explicit basis. Matrix elements are exact
/// multiples of 1/4 (z-z bonds), 1/2 (flip-flops, fields); integer counts
/// are accumulated first and scaled by the couplings once.
inline Eigen::MatrixXd build_xxz_on_basis(const DefectXxzParams& p,
                                          const std::vector<std::uint32_t>& basis) {
  const int L = p.sites;
  const auto index_of = invert_basis(basis, L);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd ham = Eigen::MatrixXd::Zero(dim, dim);

  const std::uint32_t defect_bit = 1u << (p.defect_site - 1);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const std::uint32_t state = basis[static_cast<std::size_t>(col)];

    int zz_quarters = 0;        // sum of 4 m_i m_{i+1} over bonds
    for (int i = 0; i + 1 < L; ++i) {
      const bool up_a = state & (1u << i);
      const bool up_b = state & (1u << (i + 1));
      zz_quarters += (up_a == up_b) ? 1 : -1;
    }
    const int total_sz_halves = 2 * std::popcount(state) - L;  // 2 sum m_i
    const int defect_halves = (state & defect_bit) ? 1 : -1;   // 2 m_d
    ham(col, col) = p.j_z * zz_quarters / 4.0 + p.omega * total_sz_halves / 2.0 +
                    p.eps_d * defect_halves / 2.0;

    for (int i = 0; i + 1 < L; ++i) {
      const std::uint32_t pair = (1u << i) | (1u << (i + 1));
      const std::uint32_t bits = state & pair;
      if (bits == 0 || bits == pair) continue;  // needs opposite spins
      const std::uint32_t flipped = state ^ pair;
      const std::int32_t row = index_of[flipped];
      if (row >= 0) ham(row, col) += p.j_xy / 2.0;
    }
  }
  return ham;
}

/// Chiral-chain Hamiltonian on an explicit basis with fields supplied
/// outright. The three-spin term expands into flip-flop pairs weighted by
/// the z projection of the third site, each contribution +-i/4; integer
/// counts are kept per entry and scaled by j2 once.
inline Eigen::MatrixXcd build_chiral_on_basis(const ChiralChainParams& p,
                                              const std::vector<double>& fields,
                                              const std::vector<std::uint32_t>& basis) {
  const int L = p.sites;
  if (static_cast<int>(fields.size()) != L)
    throw ConfigError("chiral chain: need one field per site");
  const auto index_of = invert_basis(basis, L);
  const auto dim = static_cast<Eigen::Index>(basis.size());

  Eigen::MatrixXd real_part = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXi chi_quarters = Eigen::MatrixXi::Zero(dim, dim);

  auto sz_halves = [](std::uint32_t state, int site) {
    return (state & (1u << site)) ? 1 : -1;  // 2 m_site
  };

  for (Eigen::Index col = 0; col < dim; ++col) {
    const std::uint32_t state = basis[static_cast<std::size_t>(col)];

    int zz_quarters = 0;
    for (int i = 0; i + 1 < L; ++i)
      zz_quarters += (sz_halves(state, i) == sz_halves(state, i + 1)) ? 1 : -1;
    double diag = p.j1 * zz_quarters / 4.0;
    for (int i = 0; i < L; ++i) diag += fields[static_cast<std::size_t>(i)] *
                                        sz_halves(state, i) / 2.0;
    real_part(col, col) += diag;

    // Heisenberg flip-flops
    for (int i = 0; i + 1 < L; ++i) {
      const std::uint32_t pair = (1u << i) | (1u << (i + 1));
      const std::uint32_t bits = state & pair;
      if (bits == 0 || bits == pair) continue;
      const std::int32_t row = index_of[state ^ pair];
      if (row >= 0) real_part(row, col) += p.j1 / 2.0;
    }

    // chirality: S_i . (S_{i+1} x S_{i+2}) as flip-flops on two of the three
    // sites times S^z on the remaining one,
    //   (i/2) [ (S_a+ S_b- - S_a- S_b+) S_c^z ]  for (a,b,c) in
    //   (i, i+1, i+2), (i+1, i+2, i), and -(i, i+2, i+1)
    for (int i = 0; i + 2 < L; ++i) {
      const struct {
        int a, b, c, sign;
      } pieces[3] = {{i, i + 1, i + 2, +1}, {i + 1, i + 2, i, +1}, {i, i + 2, i + 1, -1}};
      for (const auto& t : pieces) {
        const std::uint32_t pair = (1u << t.a) | (1u << t.b);
        const std::uint32_t bits = state & pair;
        if (bits == 0 || bits == pair) continue;
        const std::int32_t row = index_of[state ^ pair];
        if (row < 0) continue;
        // S_a+ S_b- acts when a is down and b is up in |state>; the reverse
        // term carries the opposite sign
        const bool raising_a = !(state & (1u << t.a));
        const int orientation = raising_a ? 1 : -1;
        chi_quarters(row, col) += t.sign * orientation * sz_halves(state, t.c);
      }
    }
  }

  Eigen::MatrixXcd ham = real_part.cast<std::complex<double>>();
  const std::complex<double> chi_unit(0.0, p.j2 / 4.0);
  for (Eigen::Index col = 0; col < dim; ++col)
    for (Eigen::Index row = 0; row < dim; ++row)
      if (chi_quarters(row, col) != 0)
        ham(row, col) += chi_unit * static_cast<double>(chi_quarters(row, col));
  return ham;
}

}  // namespace detail

/// Defect-XXZ Hamiltonian in the n_up magnetization sector (open chain).
inline Eigen::MatrixXd build_defect_xxz(const DefectXxzParams& p,
                                        std::size_t max_dim = kBasisDimCap) {
  if (p.sites < 2) throw ConfigError("defect XXZ: need at least two sites");
  if (p.defect_site < 1 || p.defect_site > p.sites)
    throw ConfigError("defect XXZ: defect site out of range");
  const auto basis = detail::sector_basis(p.sites, p.n_up);
  detail::check_basis_cap(basis.size(), max_dim);
  return detail::build_xxz_on_basis(p, basis);
}

/// Chiral-chain Hamiltonian in the n_up sector; the Gaussian z fields
/// (mean 0, standard deviation h) are drawn from the given stream, one per
/// site in site order.
inline Eigen::MatrixXcd build_chiral_chain(const ChiralChainParams& p,
                                           RngStream& field_stream,
                                           std::size_t max_dim = kBasisDimCap) {
  if (p.sites < 3) throw ConfigError("chiral chain: need at least three sites");
  const auto basis = detail::sector_basis(p.sites, p.n_up);
  detail::check_basis_cap(basis.size(), max_dim);
  std::vector<double> fields(static_cast<std::size_t>(p.sites));
  for (double& f : fields) f = p.h * field_stream.gaussian();
  return detail::build_chiral_on_basis(p, fields, basis);
}

namespace detail {

// parity of (-1)^n for integer-valued double n
inline double parity_sign(double n) {
  return std::llround(n) % 2 == 0 ? 1.0 : -1.0;
}

/// Splits a (2j+1)-dimensional operator into the two eigenspaces of the
/// parity rotation R = exp(-i pi J_y), which acts as
/// R |m> = (-1)^{j-m} |-m>. Throws NotBlockCommutingError when the operator
/// fails to block-commute with R within 1e-8.
inline std::vector<Eigen::MatrixXcd> parity_project(const Eigen::MatrixXcd& u, double j) {
  const int dim = static_cast<int>(u.rows());
  const bool integer_j = std::llround(2.0 * j) % 2 == 0;
  const std::complex<double> sigma_plus = integer_j ? 1.0 : std::complex<double>(0, 1);

  auto m_of = [j](int idx) { return -j + idx; };

  auto sector_basis = [&](std::complex<double> sigma) {
    int n = 0;
    for (int idx = 0; idx < dim; ++idx) {
      const double m = m_of(idx);
      if (m > 0.0 || (m == 0.0 && parity_sign(j) == sigma.real())) ++n;
    }
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(dim, n);
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    int col = 0;
    for (int idx = 0; idx < dim; ++idx) {
      const double m = m_of(idx);
      if (m > 0.0) {
        const int idx_neg = static_cast<int>(std::llround(-m + j));
        b(idx, col) = inv_sqrt2;
        b(idx_neg, col) = std::conj(sigma) * parity_sign(j - m) * inv_sqrt2;
        ++col;
      } else if (m == 0.0 && parity_sign(j) == sigma.real()) {
        b(idx, col) = 1.0;
        ++col;
      }
    }
    return b;
  };

  const Eigen::MatrixXcd b_plus = sector_basis(sigma_plus);
  const Eigen::MatrixXcd b_minus = sector_basis(-sigma_plus);

  const double off_residual =
      std::max((b_plus.adjoint() * u * b_minus).cwiseAbs().maxCoeff(),
               (b_minus.adjoint() * u * b_plus).cwiseAbs().maxCoeff());
  if (off_residual > 1e-8)
    throw NotBlockCommutingError("parity projection residual " +
                                 std::to_string(off_residual));

  return {b_plus.adjoint() * u * b_plus, b_minus.adjoint() * u * b_minus};
}

}  // namespace detail

/// Floquet operator U = exp(-i q J_z^2 / 2) exp(-i p J_y) on the |j, m>
/// basis (m ascending). With parity_split the two sectors of the rotation
/// R = exp(-i pi J_y) are returned as separate unitaries; the projection is
/// rejected if U fails to block-commute with R within 1e-8.
inline KickedTopOperator build_kicked_top(const KickedTopParams& params) {
  const double twoj = 2.0 * params.j;
  if (params.j < 0.0 || std::fabs(twoj - std::llround(twoj)) > 1e-9)
    throw ConfigError("kicked top: 2j must be a non-negative integer");
  const int dim = static_cast<int>(std::llround(twoj)) + 1;
  const double j = params.j;

  auto m_of = [j](int idx) { return -j + idx; };

  // J_y is tridiagonal with purely imaginary couplings
  Eigen::MatrixXcd jy = Eigen::MatrixXcd::Zero(dim, dim);
  for (int idx = 0; idx + 1 < dim; ++idx) {
    const double m = m_of(idx);
    const double c = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    jy(idx + 1, idx) = std::complex<double>(0.0, -0.5 * c);
    jy(idx, idx + 1) = std::complex<double>(0.0, 0.5 * c);
  }

  const HermitianEigensystem es = hermitian_eigensystem(jy);
  Eigen::VectorXcd rot_phases(dim);
  for (int i = 0; i < dim; ++i)
    rot_phases(i) = std::exp(std::complex<double>(0.0, -params.p * es.values(i)));
  Eigen::MatrixXcd u = es.vectors * rot_phases.asDiagonal() * es.vectors.adjoint();

  for (int idx = 0; idx < dim; ++idx) {
    const double m = m_of(idx);
    u.row(idx) *= std::exp(std::complex<double>(0.0, -0.5 * params.q * m * m));
  }

  if (!params.parity_split) return KickedTopOperator{{std::move(u)}};
  return KickedTopOperator{detail::parity_project(u, j)};
}

namespace detail {

inline Eigen::MatrixXcd intermediate_map_from_phases(int n, double gamma,
                                                     const std::vector<double>& phases) {
  if (n < 2) throw ConfigError("intermediate map: dim must be at least 2");
  if (static_cast<int>(phases.size()) != n)
    throw ConfigError("intermediate map: need one phase per row");
  const double gamma_n = gamma * n;
  if (std::fabs(gamma_n - std::round(gamma_n)) <= 1e-9)
    throw DegenerateGammaError("intermediate map: gamma * N is within 1e-9 of an integer");

  constexpr double two_pi = 2.0 * std::numbers::pi;
  const std::complex<double> numerator =
      1.0 - std::exp(std::complex<double>(0.0, two_pi * gamma_n));

  // denominator depends only on (a - b); precompute the 2N-1 values
  std::vector<std::complex<double>> kernel(static_cast<std::size_t>(2 * n - 1));
  for (int d = -(n - 1); d <= n - 1; ++d) {
    const std::complex<double> den =
        1.0 - std::exp(std::complex<double>(0.0, two_pi * (d + gamma_n) / n));
    kernel[static_cast<std::size_t>(d + n - 1)] = numerator / (den * static_cast<double>(n));
  }

  Eigen::MatrixXcd u(n, n);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      u(a, b) = std::exp(std::complex<double>(0.0, -phases[static_cast<std::size_t>(a)])) *
                kernel[static_cast<std::size_t>(a - b + n - 1)];

  for (int a = 0; a < n; ++a) {
    const double norm = u.row(a).norm();
    if (std::fabs(norm - 1.0) > 1e-8)
      throw NotUnitaryError("intermediate map: row norm deviates from 1 by " +
                            std::to_string(std::fabs(norm - 1.0)));
  }
  return u;
}

}  // namespace detail

/// Unitary of the intermediate map,
/// U_ab = e^{-i phi_a} / N * (1 - e^{i 2 pi gamma N}) / (1 - e^{i 2 pi (a - b + gamma N)/N}),
/// with phi_a drawn uniformly on [0, 2pi) from the given stream. gamma N must
/// stay clear of integers or the formula degenerates to 0/0.
inline Eigen::MatrixXcd build_intermediate_map(const IntermediateMapParams& params,
                                               RngStream& phase_stream) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const int n = params.dim;
  if (n < 2) throw ConfigError("intermediate map: dim must be at least 2");
  std::vector<double> phases(static_cast<std::size_t>(n));
  for (double& phi : phases) phi = phase_stream.uniform(0.0, two_pi);
  return detail::intermediate_map_from_phases(n, params.gamma, phases);
}

}  // namespace specstat
