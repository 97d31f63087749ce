#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "radpml/error.hpp"

namespace radpml {

enum class BasisKind { OnePole, TwoPole };

struct RadialBasisSpec {
  BasisKind kind = BasisKind::OnePole;
  double eta0 = 1.0;
  double eta1 = 1.0;
  int n_order = 0;

  static RadialBasisSpec one_pole(int n) { return {BasisKind::OnePole, 1.0, 1.0, n}; }
  static RadialBasisSpec two_pole(double eta, int n) { return {BasisKind::TwoPole, 1.0, eta, n}; }

  int dimension() const { return 2 * (n_order + 1); }

  void validate() const {
    require(n_order >= 0, "RadialBasisSpec: N must be nonnegative");
    require(eta0 == 1.0, "RadialBasisSpec: eta0 is fixed to 1");
    if (kind == BasisKind::TwoPole)
      require(eta1 > 0.0 && eta1 != 1.0, "RadialBasisSpec: two-pole needs eta > 0, eta != 1");
  }
};

// Matrices acting on coefficient vectors. Columns of t_minus / t_plus are indexed by
// beta_{-1}, beta_0, ..., rows by the Psi basis; column n of d_tilde holds the Psi
// coefficients of D_p Psi_n with D_p = 1 - d/dp.
struct HardyMatrices {
  Eigen::MatrixXd t_minus, t_plus, q, d_tilde;

  // int_1^inf phi_n phi_m dr
  Eigen::MatrixXd mass() const { return t_minus.transpose() * q * t_minus; }
  // int_1^inf r phi_n phi_m dr
  Eigen::MatrixXd r_mass() const { return t_minus.transpose() * d_tilde.transpose() * q * t_minus; }
  // entry (n, m) = int_1^inf r phi_n' phi_m dr
  Eigen::MatrixXd r_deriv() const { return t_plus.transpose() * d_tilde.transpose() * q * t_minus; }
  // entry (n, m) = int_1^inf phi_n' phi_m dr
  Eigen::MatrixXd deriv() const { return t_plus.transpose() * q * t_minus; }
};

// Generalized Laguerre polynomial L_n^{(-1)}(x) by the forward three-term recurrence.
inline double laguerre_l_minus1(int n, double x) {
  require(n >= 0, "laguerre_l_minus1: n must be nonnegative");
  if (n == 0) return 1.0;
  double l0 = 1.0, l1 = -x;
  for (int k = 1; k < n; ++k) {
    const double l2 = ((2.0 * k - x) * l1 - (k - 1.0) * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

// One-pole spatial basis exp(1-r) L_n^{(-1)}(2r-2).
inline double phi_n(int n, double r) {
  require(r >= 1.0, "phi_n: r must be at least 1");
  return std::exp(1.0 - r) * laguerre_l_minus1(n, 2.0 * r - 2.0);
}

// Ordinary Laguerre polynomial L_n(x).
inline double laguerre_l0(int n, double x) {
  if (n == 0) return 1.0;
  double l0 = 1.0, l1 = 1.0 - x;
  for (int k = 1; k < n; ++k) {
    const double l2 = ((2.0 * k + 1.0 - x) * l1 - k * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

// d/dr of phi_n, using d/dx L_n^{(-1)} = -L_{n-1}.
inline double phi_n_derivative(int n, double r) {
  require(r >= 1.0, "phi_n: r must be at least 1");
  const double x = 2.0 * r - 2.0;
  const double dl = n == 0 ? 0.0 : -laguerre_l0(n - 1, x);
  return std::exp(1.0 - r) * (2.0 * dl - laguerre_l_minus1(n, x));
}

namespace detail {
using cd = std::complex<double>;
inline cd ipow(cd z, int k) {
  cd out = 1.0;
  for (int i = 0; i < k; ++i) out *= z;
  return out;
}
}  // namespace detail

// Laplace-domain basis: Phi_n(p), the transform of phi_n(1 + .).
inline std::complex<double> laplace_phi(int n, std::complex<double> p, const RadialBasisSpec& spec) {
  using detail::cd;
  require(n >= 0, "laplace_phi: n must be nonnegative");
  if (std::abs(p + 1.0) == 0.0) throw InvalidInput("laplace_phi: pole at p = -1");
  if (n == 0) return 1.0 / (p + 1.0);
  if (spec.kind == BasisKind::OnePole)
    return -2.0 / ((p + 1.0) * (p + 1.0)) * detail::ipow((p - 1.0) / (p + 1.0), n - 1);
  const double eta = spec.eta1;
  if (std::abs(p + eta) == 0.0) throw InvalidInput("laplace_phi: pole at p = -eta");
  const int m = n - 1;
  return -(1.0 + eta) / ((p + eta) * (p + 1.0)) * detail::ipow((p - 1.0) / (p + 1.0), (m + 1) / 2) *
         detail::ipow((p - eta) / (p + eta), m / 2);
}

// Psi_n(p); Psi_{-1} = 0.
inline std::complex<double> laplace_psi(int n, std::complex<double> p, const RadialBasisSpec& spec) {
  require(n >= -1, "laplace_psi: n must be at least -1");
  if (n == -1) return 0.0;
  if (spec.kind == BasisKind::OnePole) return -2.0 / (p + 1.0) * detail::ipow((p - 1.0) / (p + 1.0), n);
  const double eta = spec.eta1;
  return -(1.0 + eta) / (p + eta) * detail::ipow((p - 1.0) / (p + 1.0), (n + 1) / 2) *
         detail::ipow((p - eta) / (p + eta), n / 2);
}

// Two-pole companion basis with the roles of 1 and eta swapped.
inline std::complex<double> laplace_psi_tilde(int n, std::complex<double> p, double eta) {
  require(n >= -1, "laplace_psi_tilde: n must be at least -1");
  if (n == -1) return 0.0;
  return -(1.0 + eta) / (p + 1.0) * detail::ipow((p - eta) / (p + eta), (n + 1) / 2) *
         detail::ipow((p - 1.0) / (p + 1.0), n / 2);
}

inline HardyMatrices one_pole_matrices(int M) {
  require(M >= 0, "one_pole_matrices: M must be nonnegative");
  const int n = M + 1;
  HardyMatrices h;
  h.t_minus = Eigen::MatrixXd::Zero(n, n);
  h.t_plus = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    h.t_minus(i, i) = -0.5;
    h.t_plus(i, i) = 0.5;
    if (i + 1 < n) h.t_minus(i, i + 1) = h.t_plus(i, i + 1) = 0.5;
  }
  h.q = 2.0 * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    tri(i, i) = -(2.0 * i + 1.0);
    if (i > 0) tri(i, i - 1) = i;
    if (i + 1 < n) tri(i, i + 1) = i + 1.0;
  }
  h.d_tilde = Eigen::MatrixXd::Identity(n, n) - 0.5 * tri;
  return h;
}

// Two-pole matrices on 2(N+1) functions, eta0 = 1 and eta1 = eta.
inline HardyMatrices two_pole_matrices(double eta, int N) {
  require(N >= 0, "two_pole_matrices: N must be nonnegative");
  require(eta > 0.0 && eta != 1.0, "two_pole_matrices: eta must be positive and different from 1");
  const int nb = N + 1, n = 2 * nb;
  const double rho = (1.0 - eta) / (1.0 + eta);
  Eigen::MatrixXd calt = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < nb; ++b) {
    calt(2 * b, 2 * b) = rho;
    calt(2 * b, 2 * b + 1) = 1.0;
    if (b + 1 < nb) {
      calt(2 * b, 2 * b + 2) = -rho;
      calt(2 * b + 1, 2 * b + 2) = 1.0;
    }
  }
  HardyMatrices h;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  h.t_minus = (-id + calt) / (2.0 * eta);
  h.t_plus = 0.5 * (id + calt);
  h.q = Eigen::MatrixXd::Zero(n, n);
  const double qs = 0.5 * (1.0 + eta) * (1.0 + eta);
  for (int b = 0; b < nb; ++b) {
    h.q(2 * b, 2 * b) = h.q(2 * b + 1, 2 * b + 1) = qs;
    h.q(2 * b, 2 * b + 1) = h.q(2 * b + 1, 2 * b) = qs * rho;
  }
  // D_p acting on the companion basis: pentadiagonal, one pattern for even and one
  // for odd columns
  h.d_tilde = Eigen::MatrixXd::Zero(n, n);
  const double e = eta, den = 2.0 * e * (e + 1.0);
  auto put = [&](int r, int c, double v) {
    if (r >= 0 && r < n) h.d_tilde(r, c) = v;
  };
  for (int c = 0; c < n; ++c) {
    const double b = c / 2;
    if (c % 2 == 0) {
      put(c - 2, c, -b * (e - 1.0) / den);
      put(c - 1, c, -b * (e + 1.0) / (2.0 * e));
      put(c, c, ((b + 2.0) * e * e + (6.0 * b + 4.0) * e + b) / den);
      put(c + 1, c, -((b + 1.0) * e + b) / (2.0 * e));
      put(c + 2, c, (b + 1.0) * (e - 1.0) / (2.0 * (e + 1.0)));
    } else {
      put(c - 2, c, b * (e - 1.0) / (2.0 * (e + 1.0)));
      put(c - 1, c, -(b * e + b + 1.0) / (2.0 * e));
      put(c, c, ((b + 3.0) * e * e + (6.0 * b + 6.0) * e + b + 1.0) / den);
      put(c + 1, c, -(b + 1.0) * (e + 1.0) / (2.0 * e));
      put(c + 2, c, -(b + 1.0) * (e - 1.0) / den);
    }
  }
  return h;
}

inline HardyMatrices hardy_matrices(const RadialBasisSpec& spec) {
  spec.validate();
  if (spec.kind == BasisKind::OnePole) return one_pole_matrices(2 * spec.n_order + 1);
  return two_pole_matrices(spec.eta1, spec.n_order);
}

}  // namespace radpml
