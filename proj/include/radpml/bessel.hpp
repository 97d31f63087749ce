#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "radpml/error.hpp"

namespace radpml {

namespace detail {

using cd = std::complex<double>;

inline constexpr double kEulerGamma = 0.57721566490153286061;

// I0 and I1 from the ascending series; fine for |z| <= 2 or real z.
inline void bessel_i01_series(cd z, cd& i0, cd& i1) {
  const cd q = 0.25 * z * z;
  cd t0 = 1.0, t1 = 0.5 * z;
  i0 = t0;
  i1 = t1;
  for (int k = 1; k < 500; ++k) {
    t0 *= q / double(k * k);
    t1 *= q / double(k * (k + 1));
    i0 += t0;
    i1 += t1;
    if (std::abs(t0) <= 1e-17 * std::abs(i0) && std::abs(t1) <= 1e-17 * std::abs(i1)) break;
  }
}

// I_n(z) = (1/pi) int_0^pi exp(z cos t) cos(n t) dt with the trapezoidal rule,
// which is spectrally accurate for this periodic integrand.
inline void bessel_i01_trapezoid(cd z, cd& i0, cd& i1) {
  const int n = static_cast<int>(std::abs(z)) + 40;
  const double h = std::numbers::pi / n;
  cd s0 = 0.0, s1 = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double t = j * h;
    const double w = (j == 0 || j == n) ? 0.5 : 1.0;
    const cd e = std::exp(z * std::cos(t));
    s0 += w * e;
    s1 += w * e * std::cos(t);
  }
  i0 = s0 * h / std::numbers::pi;
  i1 = s1 * h / std::numbers::pi;
}

inline void bessel_k01_series(cd z, cd& k0, cd& k1) {
  const cd q = 0.25 * z * z;
  const cd lg = std::log(0.5 * z);
  cd i0, i1;
  bessel_i01_series(z, i0, i1);
  // K0 = -(log(z/2)+gamma) I0 + sum q^k/(k!)^2 H_k
  cd term = 1.0, s0 = 0.0;
  double hk = 0.0;
  // K1 = 1/z + I1 log(z/2) - (z/4) sum (psi(k+1)+psi(k+2)) q^k/(k!(k+1)!)
  cd term1 = 1.0, s1 = 0.0;
  double psi1 = -kEulerGamma, psi2 = 1.0 - kEulerGamma;
  s1 += (psi1 + psi2) * term1;
  for (int k = 1; k < 500; ++k) {
    term *= q / double(k * k);
    hk += 1.0 / k;
    s0 += term * hk;
    term1 *= q / double(k * (k + 1));
    psi1 += 1.0 / k;
    psi2 += 1.0 / (k + 1);
    const cd add1 = (psi1 + psi2) * term1;
    s1 += add1;
    if (std::abs(term) * (hk + 1.0) <= 1e-17 * std::abs(s0) && std::abs(add1) <= 1e-17 * std::abs(s1))
      break;
  }
  k0 = -(lg + kEulerGamma) * i0 + s0;
  k1 = 1.0 / z + i1 * lg - 0.25 * z * s1;
}

// Steed's continued fraction (Temme's CF2) for K0, K1 with Re z >= 0, |z| > 2.
inline void bessel_k01_cf2(cd z, cd& k0, cd& k1) {
  cd b = 2.0 * (1.0 + z);
  cd d = 1.0 / b;
  cd h = d, delh = d;
  cd q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  cd q = a1, c = a1;
  double a = -a1;
  cd s = 1.0 + q * delh;
  int i = 1;
  for (; i < 100000; ++i) {
    a -= 2 * i;
    c = -a * c / double(i + 1);
    const cd qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const cd dels = q * delh;
    s += dels;
    if (std::abs(dels) < 1e-17 * std::abs(s)) break;
  }
  if (i >= 100000) throw NumericalFailure("bessel_k: continued fraction did not converge");
  h = a1 * h;
  k0 = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z) / s;
  k1 = k0 * (z + 0.5 - h) / z;
}

// Hankel expansion; accurate for |z| >= 25 and |arg z| < pi.
inline void bessel_k01_asymptotic(cd z, cd& k0, cd& k1) {
  const cd pref = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z);
  cd t0 = 1.0, t1 = 1.0, s0 = 1.0, s1 = 1.0;
  double last0 = 1.0, last1 = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = (2.0 * k - 1.0) * (2.0 * k - 1.0);
    const cd n0 = t0 * ((0.0 - odd) / (8.0 * k)) / z;
    const cd n1 = t1 * ((4.0 - odd) / (8.0 * k)) / z;
    const double m0 = std::abs(n0), m1 = std::abs(n1);
    bool grow0 = m0 > last0, grow1 = m1 > last1;
    if (!grow0) { s0 += n0; t0 = n0; last0 = m0; }
    if (!grow1) { s1 += n1; t1 = n1; last1 = m1; }
    if ((grow0 || m0 < 1e-18) && (grow1 || m1 < 1e-18)) break;
  }
  k0 = pref * s0;
  k1 = pref * s1;
}

inline void check_range(cd z) {
  if (z.imag() == 0.0 && z.real() <= 0.0)
    throw BranchCut("bessel_k: argument on the branch cut (-inf, 0]");
  if (std::abs(z.real()) > 705.0)
    throw NumericalFailure("bessel_k: |Re z| beyond double exponent range");
}

}  // namespace detail

// Modified Bessel functions I0, I1 for complex argument.
inline void bessel_i01(std::complex<double> z, std::complex<double>& i0, std::complex<double>& i1) {
  if (std::abs(z.real()) > 705.0) throw NumericalFailure("bessel_i: overflow");
  if (std::abs(z) <= 2.0 || z.imag() == 0.0)
    detail::bessel_i01_series(z, i0, i1);
  else
    detail::bessel_i01_trapezoid(z, i0, i1);
}

// K0 and K1 on the principal branch, cut along (-inf, 0].
inline void bessel_k01(std::complex<double> z, std::complex<double>& k0, std::complex<double>& k1) {
  using detail::cd;
  detail::check_range(z);
  const double az = std::abs(z);
  if (az <= 2.0) {
    detail::bessel_k01_series(z, k0, k1);
  } else if (az >= 25.0) {
    detail::bessel_k01_asymptotic(z, k0, k1);
  } else if (z.real() >= 0.0) {
    detail::bessel_k01_cf2(z, k0, k1);
  } else {
    // continuation through K(w e^{+-i pi}) with Re w > 0
    const cd w = -z;
    cd kw0, kw1, iw0, iw1;
    detail::bessel_k01_cf2(w, kw0, kw1);
    bessel_i01(w, iw0, iw1);
    const cd ipi(0.0, std::numbers::pi);
    if (z.imag() > 0.0) {
      k0 = kw0 - ipi * iw0;
      k1 = -kw1 - ipi * iw1;
    } else {
      k0 = kw0 + ipi * iw0;
      k1 = -kw1 + ipi * iw1;
    }
  }
}

inline std::complex<double> bessel_k0(std::complex<double> z) {
  std::complex<double> k0, k1;
  bessel_k01(z, k0, k1);
  return k0;
}

inline std::complex<double> bessel_k1(std::complex<double> z) {
  std::complex<double> k0, k1;
  bessel_k01(z, k0, k1);
  return k1;
}

// exp(-x) I1(x) for real x >= 0.
inline double bessel_i1_scaled(double x) {
  require(x >= 0.0, "bessel_i1: argument must be nonnegative");
  if (x <= 30.0) {
    const double q = 0.25 * x * x;
    double t = 0.5 * x, s = t;
    for (int k = 1; k < 1000 && t > 1e-18 * s; ++k) {
      t *= q / double(k * (k + 1));
      s += t;
    }
    return s * std::exp(-x);
  }
  double t = 1.0, s = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = (2.0 * k - 1.0) * (2.0 * k - 1.0);
    const double nt = -t * (4.0 - odd) / (8.0 * k * x);
    if (std::abs(nt) > std::abs(t)) break;
    s += nt;
    t = nt;
    if (std::abs(t) < 1e-18 * std::abs(s)) break;
  }
  return s / std::sqrt(2.0 * std::numbers::pi * x);
}

inline double bessel_i1(double x) {
  require(x >= 0.0, "bessel_i1: argument must be nonnegative");
  if (x > 709.0) throw NumericalFailure("bessel_i1: overflow");
  return bessel_i1_scaled(x) * std::exp(x);
}

}  // namespace radpml
