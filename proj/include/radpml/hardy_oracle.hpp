#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "radpml/error.hpp"
#include "radpml/hardy.hpp"
#include "radpml/quadrature.hpp"

namespace radpml {

using mpfloat = boost::multiprecision::cpp_bin_float_50;
using mpcomplex = boost::multiprecision::cpp_complex_50;

// phi(1 + xi) = exp(-xi) sum_k a_k xi^k + exp(-eta xi) sum_k b_k xi^k
struct TwoPoleSpatial {
  double eta = 2.0;
  std::vector<mpfloat> a, b;

  mpfloat value_mp(const mpfloat& xi) const {
    return horner(a, xi) * exp(-xi) + horner(b, xi) * exp(-mpfloat(eta) * xi);
  }
  mpfloat derivative_mp(const mpfloat& xi) const {
    return (horner(deriv(a), xi) - horner(a, xi)) * exp(-xi) +
           (horner(deriv(b), xi) - mpfloat(eta) * horner(b, xi)) * exp(-mpfloat(eta) * xi);
  }
  double value(double r) const { return static_cast<double>(value_mp(mpfloat(r) - 1)); }
  double derivative(double r) const { return static_cast<double>(derivative_mp(mpfloat(r) - 1)); }

  // Forward Laplace transform in xi, from the exponential-polynomial form.
  std::complex<double> laplace(std::complex<double> p) const {
    const mpcomplex pp(mpfloat(p.real()), mpfloat(p.imag()));
    mpcomplex s(0);
    mpfloat fact(1);
    for (std::size_t k = 0; k < std::max(a.size(), b.size()); ++k) {
      if (k > 0) fact *= k;
      if (k < a.size()) s += a[k] * fact / pow(pp + mpfloat(1), int(k + 1));
      if (k < b.size()) s += b[k] * fact / pow(pp + mpfloat(eta), int(k + 1));
    }
    return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
  }

  static mpfloat horner(const std::vector<mpfloat>& c, const mpfloat& x) {
    mpfloat s(0);
    for (std::size_t i = c.size(); i-- > 0;) s = s * x + c[i];
    return s;
  }
  static std::vector<mpfloat> deriv(const std::vector<mpfloat>& c) {
    std::vector<mpfloat> d;
    for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * int(i));
    return d;
  }
};

namespace detail {

using Poly = std::vector<mpfloat>;

inline Poly poly_mul(const Poly& x, const Poly& y, std::size_t keep) {
  Poly out(std::min(keep, x.size() + y.size() - 1), mpfloat(0));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size() && i + j < out.size(); ++j) out[i + j] += x[i] * y[j];
  return out;
}

// Taylor coefficients (up to degree keep-1) of (u + c)^m for integer m of either sign.
inline Poly binomial_series(const mpfloat& c, int m, std::size_t keep) {
  Poly out(keep, mpfloat(0));
  mpfloat coef = pow(c, m);
  for (std::size_t k = 0; k < keep; ++k) {
    out[k] = coef;
    coef = coef * mpfloat(m - int(k)) / mpfloat(int(k) + 1) / c;
  }
  return out;
}

}  // namespace detail

// Exact partial fractions of Phi_n^eta, whose poles sit at -1 and -eta only.
inline TwoPoleSpatial two_pole_spatial(int n, double eta) {
  require(n >= 0, "phi_two_pole: n must be nonnegative");
  require(eta > 0.0 && eta != 1.0, "phi_two_pole: eta must be positive and different from 1");
  TwoPoleSpatial out;
  out.eta = eta;
  if (n == 0) {
    out.a = {mpfloat(1)};
    return out;
  }
  const mpfloat e(eta);
  const int ap = n / 2, bp = (n - 1) / 2;  // powers of (p-1) and (p-eta) in the numerator
  const int pa = ap + 1, pb = bp + 1;      // pole orders at -1 and -eta
  const mpfloat cst = -(1 + e);
  {
    // around p = -1 with u = p + 1
    detail::Poly g = detail::binomial_series(mpfloat(-2), ap, pa);
    g = detail::poly_mul(g, detail::binomial_series(-1 - e, bp, pa), pa);
    g = detail::poly_mul(g, detail::binomial_series(e - 1, -pb, pa), pa);
    out.a.assign(pa, mpfloat(0));
    mpfloat fact(1);
    for (int j = 1; j <= pa; ++j) {
      if (j > 1) fact *= (j - 1);
      out.a[j - 1] = cst * g[pa - j] / fact;
    }
  }
  {
    // around p = -eta with v = p + eta
    detail::Poly h = detail::binomial_series(-e - 1, ap, pb);
    h = detail::poly_mul(h, detail::binomial_series(-2 * e, bp, pb), pb);
    h = detail::poly_mul(h, detail::binomial_series(1 - e, -pa, pb), pb);
    out.b.assign(pb, mpfloat(0));
    mpfloat fact(1);
    for (int j = 1; j <= pb; ++j) {
      if (j > 1) fact *= (j - 1);
      out.b[j - 1] = cst * h[pb - j] / fact;
    }
  }
  return out;
}

inline double phi_two_pole(int n, double eta, double r) {
  require(r >= 1.0, "phi_two_pole: r must be at least 1");
  return two_pole_spatial(n, eta).value(r);
}

struct OracleMatrices {
  Eigen::MatrixXd mass, r_mass, r_deriv, deriv;
};

namespace detail {

// int_0^inf (1 + xi)^w xi^k exp(-c xi) for the polynomial product x*y, exactly.
inline mpfloat exp_poly_integral(const Poly& prod, const mpfloat& c, bool r_weight) {
  Poly p = prod;
  if (r_weight) {
    Poly q(p.size() + 1, mpfloat(0));
    for (std::size_t i = 0; i < p.size(); ++i) {
      q[i] += p[i];
      q[i + 1] += p[i];
    }
    p = q;
  }
  mpfloat s(0), fact(1), cp = c;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k > 0) {
      fact *= int(k);
      cp *= c;
    }
    s += p[k] * fact / cp;
  }
  return s;
}

inline Poly poly_full_mul(const Poly& x, const Poly& y) {
  if (x.empty() || y.empty()) return {};
  return poly_mul(x, y, x.size() + y.size() - 1);
}

}  // namespace detail

// Mass, r-weighted mass and r-weighted derivative coupling over the spatial basis.
// One-pole: Gauss-Laguerre quadrature on the Laguerre form. Two-pole: exact
// exponential moments of the partial-fraction form in 50-digit arithmetic.
inline OracleMatrices quadrature_oracle(const RadialBasisSpec& spec) {
  spec.validate();
  const int n = spec.dimension();
  OracleMatrices out;
  out.mass = out.r_mass = out.r_deriv = out.deriv = Eigen::MatrixXd::Zero(n, n);
  if (spec.kind == BasisKind::OnePole) {
    // phi_n(1 + t/2) = exp(-t/2) L_n^{(-1)}(t), integrals over xi = t/2
    const Rule rule = gauss_laguerre(n + 4);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = rule.x[q], w = 0.5 * rule.w[q], r = 1.0 + 0.5 * t;
      std::vector<double> v(n), d(n);
      for (int i = 0; i < n; ++i) {
        v[i] = laguerre_l_minus1(i, t);
        d[i] = (i == 0 ? 0.0 : -2.0 * laguerre_l0(i - 1, t)) - v[i];
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          out.mass(i, j) += w * v[i] * v[j];
          out.r_mass(i, j) += w * r * v[i] * v[j];
          out.r_deriv(i, j) += w * r * d[i] * v[j];
          out.deriv(i, j) += w * d[i] * v[j];
        }
    }
    return out;
  }
  const double eta = spec.eta1;
  const mpfloat e(eta);
  std::vector<TwoPoleSpatial> basis;
  for (int i = 0; i < n; ++i) basis.push_back(two_pole_spatial(i, eta));
  auto dpart = [&](const std::vector<mpfloat>& c, const mpfloat& rate) {
    detail::Poly d = TwoPoleSpatial::deriv(c);
    d.resize(std::max(d.size(), c.size()), mpfloat(0));
    for (std::size_t k = 0; k < c.size(); ++k) d[k] -= rate * c[k];
    return d;
  };
  auto integrate = [&](const detail::Poly& xa, const detail::Poly& xb, const detail::Poly& ya,
                       const detail::Poly& yb, bool rw) {
    mpfloat s(0);
    s += detail::exp_poly_integral(detail::poly_full_mul(xa, ya), mpfloat(2), rw);
    s += detail::exp_poly_integral(detail::poly_full_mul(xa, yb), 1 + e, rw);
    s += detail::exp_poly_integral(detail::poly_full_mul(xb, ya), 1 + e, rw);
    s += detail::exp_poly_integral(detail::poly_full_mul(xb, yb), 2 * e, rw);
    return static_cast<double>(s);
  };
  for (int i = 0; i < n; ++i) {
    const auto& bi = basis[i];
    const detail::Poly dia = dpart(bi.a, mpfloat(1)), dib = dpart(bi.b, e);
    for (int j = 0; j < n; ++j) {
      const auto& bj = basis[j];
      out.mass(i, j) = integrate(bi.a, bi.b, bj.a, bj.b, false);
      out.r_mass(i, j) = integrate(bi.a, bi.b, bj.a, bj.b, true);
      out.r_deriv(i, j) = integrate(dia, dib, bj.a, bj.b, true);
      out.deriv(i, j) = integrate(dia, dib, bj.a, bj.b, false);
    }
  }
  return out;
}

}  // namespace radpml
