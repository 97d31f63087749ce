#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "radpml/error.hpp"

namespace radpml {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

// Legendre P_n and its derivative at x.
inline std::pair<double, double> legendre_p(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

// n-point Gauss-Legendre rule on [-1, 1], ascending nodes.
inline Rule gauss_legendre(int n) {
  require(n >= 1, "gauss_legendre: n >= 1");
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      auto [p, d] = legendre_p(n, x);
      dp = d;
      const double dx = p / d;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    dp = legendre_p(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

// n-point Gauss-Lobatto rule on [-1, 1] (endpoints included), n >= 2.
inline Rule gauss_lobatto(int n) {
  require(n >= 2, "gauss_lobatto: n >= 2");
  const int m = n - 1;
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  r.x[0] = -1.0;
  r.x[m] = 1.0;
  r.w[0] = r.w[m] = 2.0 / (m * (m + 1.0));
  for (int i = 1; i < m; ++i) {
    // interior nodes are roots of P'_m; Newton on P'_m using the Legendre ODE
    double x = -std::cos(std::numbers::pi * i / m);
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = legendre_p(m, x);
      const double d2p = (2.0 * x * dp - m * (m + 1.0) * p) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double p = legendre_p(m, x).first;
    r.x[i] = x;
    r.w[i] = 2.0 / (m * (m + 1.0) * p * p);
  }
  return r;
}

// Laguerre L_n(x) and L_{n+1}(x).
inline std::pair<double, double> laguerre_pair(int n, double x) {
  double l0 = 1.0, l1 = 1.0 - x;
  if (n == 0) return {l0, l1};
  for (int k = 1; k < n; ++k) {
    const double l2 = ((2.0 * k + 1.0 - x) * l1 - k * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
  }
  const double l2 = ((2.0 * n + 1.0 - x) * l1 - n * l0) / (n + 1.0);
  return {l1, l2};
}

// n-point Gauss-Laguerre rule for weight exp(-x) on [0, inf). Nodes start from the
// Jacobi-matrix eigenvalues and are polished by Newton; weights use the closed form
// x / ((n+1) L_{n+1}(x))^2, which keeps relative accuracy at large nodes.
inline Rule gauss_laguerre(int n) {
  require(n >= 1, "gauss_laguerre: n >= 1");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    j(k, k) = 2.0 * k + 1.0;
    if (k + 1 < n) j(k, k + 1) = j(k + 1, k) = k + 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j, Eigen::EigenvaluesOnly);
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int k = 0; k < n; ++k) {
    double x = es.eigenvalues()(k);
    for (int it = 0; it < 8; ++it) {
      const double lm1 = n >= 1 ? laguerre_pair(n - 1, x).first : 0.0;
      const double ln = laguerre_pair(n, x).first;
      const double dl = n * (ln - lm1) / x;
      const double dx = ln / dl;
      x -= dx;
      if (std::abs(dx) <= 1e-16 * x) break;
    }
    const double l1 = laguerre_pair(n, x).second;
    r.x[k] = x;
    r.w[k] = x / ((n + 1.0) * (n + 1.0) * l1 * l1);
  }
  return r;
}

}  // namespace radpml
