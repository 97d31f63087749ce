#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>

#include <boost/math/tools/roots.hpp>

#include "radpml/anisotropy.hpp"
#include "radpml/bessel.hpp"
#include "radpml/error.hpp"
#include "radpml/scaling.hpp"

namespace radpml {

struct GammaCoeffs {
  double g11 = 0.0;  // c^ B c^
  double g12 = 0.0;  // x^ B c^
  double g22 = 0.0;  // x^ B x^
  Vec2 c = Vec2::Zero();  // R x^ - y
  double xi = 0.0;        // |x| - R
};

inline GammaCoeffs gamma_coeffs(const Anisotropy& an, double radius_pml, const Vec2& x, const Vec2& y) {
  const double r = x.norm();
  require(r > 0.0, "gamma_coeffs: x must be nonzero");
  const Vec2 xh = x / r;
  GammaCoeffs g;
  g.c = radius_pml * xh - y;
  const double cn = g.c.norm();
  require(cn > 0.0, "gamma_coeffs: y lies on the interface");
  const Vec2 ch = g.c / cn;
  g.g11 = ch.dot(an.b * ch);
  g.g12 = xh.dot(an.b * ch);
  g.g22 = xh.dot(an.b * xh);
  g.xi = r - radius_pml;
  return g;
}

enum class Verdict { Stable, Unstable };

struct PointClass {
  Verdict verdict = Verdict::Stable;
  std::optional<Vec2> witness_direction;
  double min_g12 = 0.0;
  double min_angle = 0.0;
};

namespace detail {
inline double g12_at_angle(const Anisotropy& an, double radius_pml, const Vec2& y, double th) {
  const Vec2 xh(std::cos(th), std::sin(th));
  const Vec2 c = radius_pml * xh - y;
  return xh.dot(an.b * c) / c.norm();
}
}  // namespace detail

// Unstable iff gamma12(x^, y) < 0 for some direction x^ on the circle.
inline PointClass classify_point(const Anisotropy& an, const DampingProfile& prof, const Vec2& y,
                                 int angular_samples = 256) {
  require(angular_samples >= 64, "classify_point: need at least 64 angular samples");
  require(y.norm() < prof.radius_pml, "classify_point: y must lie inside the interface circle");
  const double R = prof.radius_pml;
  const double dth = 2.0 * std::numbers::pi / angular_samples;
  double best = std::numeric_limits<double>::infinity(), best_th = 0.0;
  for (int i = 0; i < angular_samples; ++i) {
    const double th = i * dth;
    const double v = detail::g12_at_angle(an, R, y, th);
    if (v < best) {
      best = v;
      best_th = th;
    }
  }
  // golden-section refinement on the bracketing cell pair
  double a = best_th - dth, b = best_th + dth;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = detail::g12_at_angle(an, R, y, c), fd = detail::g12_at_angle(an, R, y, d);
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = detail::g12_at_angle(an, R, y, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = detail::g12_at_angle(an, R, y, d);
    }
  }
  const double th = fc < fd ? c : d;
  const double v = std::min(fc, fd);
  if (v < best) {
    best = v;
    best_th = th;
  }
  PointClass out;
  out.min_g12 = best;
  out.min_angle = best_th;
  if (best < -1e-12) {
    out.verdict = Verdict::Unstable;
    out.witness_direction = Vec2(std::cos(best_th), std::sin(best_th));
  }
  return out;
}

// (x_s - y_s)^T B (x_s - y_s) with both points complex-scaled.
inline cd h_sigma(const Anisotropy& an, const ShiftedScaling& sc, ComplexFreq s, const Vec2& x,
                  const Vec2& y) {
  const Vec2c dz = scaled_coordinate(sc, s, x) - scaled_coordinate(sc, s, y);
  return dz.transpose() * an.b.cast<cd>() * dz;
}

struct InstabilityWitness {
  cd s;
  Vec2 x;
  cd h;
};

// A frequency s in C+ and a layer point x with h_sigma(s; x, y) = 0, for the
// classical (unshifted) layer.
inline InstabilityWitness instability_witness(const Anisotropy& an, const DampingProfile& prof,
                                              const Vec2& y, int angular_samples = 256) {
  require(prof.sigma_c > 0.0, "instability_witness: sigma_c must be positive");
  const PointClass pc = classify_point(an, prof, y, angular_samples);
  if (pc.verdict == Verdict::Stable)
    throw NoWitness("instability_witness: gamma12 >= 0 in every direction");
  const Vec2 xh = *pc.witness_direction;
  const double R = prof.radius_pml;
  const GammaCoeffs g = gamma_coeffs(an, R, R * xh, y);
  const double cn = g.c.norm();
  // arg d must equal the argument of the root z = d xi of g22 z^2 + 2|c| g12 z + |c|^2 g11
  const double tan_th = std::sqrt(std::max(0.0, g.g11 * g.g22 - g.g12 * g.g12)) / std::abs(g.g12);
  const cd d(2.0, 2.0 * tan_th);
  const cd s = prof.sigma_c / (d - 1.0);
  const double rho = R - cn * g.g12 / (d.real() * g.g22);
  InstabilityWitness out;
  out.s = s;
  out.x = rho * xh;
  out.h = h_sigma(an, ShiftedScaling(prof, 0.0), s, out.x, y);
  return out;
}

// K0(s sqrt(h)) / (2 pi sqrt(det A)), principal square root.
inline cd green(const Anisotropy& an, const ShiftedScaling& sc, ComplexFreq s, const Vec2& x,
                const Vec2& y) {
  require((x - y).norm() > 0.0, "green: x and y coincide");
  const cd h = h_sigma(an, sc, s, x, y);
  const double scale = (x - y).dot(an.b * (x - y));
  if (std::abs(h) <= 1e-9 * scale || (h.real() <= 0.0 && std::abs(h.imag()) <= 1e-14 * std::abs(h)))
    throw BranchCut("green: h_sigma = " + std::to_string(h.real()) + " + " +
                    std::to_string(h.imag()) + "i lies on (-inf, 0]");
  const double deta = an.a.determinant();
  return bessel_k0(s.value * std::sqrt(h)) / (2.0 * std::numbers::pi * std::sqrt(deta));
}

struct SpectrumWitness {
  cd s0;
  Vec2 x0;
  Vec2 xi0;
  double residual = 0.0;
  double phi = 0.0;
  double a0 = 0.0;
  double tau = 0.0;
};

// A^phi = R_phi^T A R_phi and a0 = |A12| / sqrt(A11 A22).
inline double a0_at_angle(const Anisotropy& an, double phi) {
  const Eigen::Rotation2Dd rot(phi);
  const Mat2 ap = rot.toRotationMatrix().transpose() * an.a * rot.toRotationMatrix();
  return std::abs(ap(0, 1)) / std::sqrt(ap(0, 0) * ap(1, 1));
}

// Triple (s0, x0, xi0) annihilating xi^T A_sigma xi for the classical layer.
inline SpectrumWitness essential_spectrum_witness(const Anisotropy& an, const DampingProfile& prof,
                                                  std::optional<double> phi_in = std::nullopt) {
  if (an.is_isotropic(1e-12))
    throw NoWitness("essential_spectrum_witness: isotropic medium has no witness");
  require(prof.sigma_c > 0.0, "essential_spectrum_witness: sigma_c must be positive");
  double phi = 0.0, a0 = 0.0;
  if (phi_in) {
    phi = *phi_in;
    a0 = a0_at_angle(an, phi);
  } else {
    const int n = 720;
    for (int i = 0; i < n; ++i) {
      const double p = std::numbers::pi * i / n;
      const double v = a0_at_angle(an, p);
      if (v > a0) {
        a0 = v;
        phi = p;
      }
    }
  }
  if (a0 <= 1e-12) throw NoWitness("essential_spectrum_witness: A12 vanishes in this direction");
  const double R = prof.radius_pml;
  const double sig = prof.sigma_c;
  // at eta = 0 the smallest cos arg z over omega is reached at omega = sqrt(sig sig~);
  // walk r toward R until that minimum drops below a0
  auto cos_arg = [&](double eta, double om, double sigt) {
    const cd z(eta * eta + om * om + (sigt + sig) * eta + sig * sigt, (sigt - sig) * om);
    return z.real() / std::abs(z);
  };
  double r0 = 2.0 * R, sigt = 0.0, om = 0.0;
  bool found = false;
  for (int it = 0; it < 200; ++it) {
    sigt = prof.sigma_tilde(r0);
    om = std::sqrt(sig * sigt);
    if (cos_arg(0.0, om, sigt) < a0 - 1e-6) {
      found = true;
      break;
    }
    r0 = R + 0.5 * (r0 - R);
  }
  if (!found) throw NumericalFailure("essential_spectrum_witness: no bracket in r");
  double hi = sig;
  while (cos_arg(hi, om, sigt) <= a0) {
    hi *= 2.0;
    if (hi > 1e12) throw NumericalFailure("essential_spectrum_witness: no bracket in eta");
  }
  boost::uintmax_t iters = 200;
  auto f = [&](double eta) { return cos_arg(eta, om, sigt) - a0; };
  auto br = boost::math::tools::toms748_solve(f, 0.0, hi, boost::math::tools::eps_tolerance<double>(52),
                                              iters);
  const double eta = 0.5 * (br.first + br.second);
  const ShiftedScaling sc(prof, 0.0);
  const cd s0(eta, om);
  const Eigen::Rotation2Dd rot(phi);
  const Mat2 rm = rot.toRotationMatrix();
  const Mat2 ap = rm.transpose() * an.a * rm;
  auto [d, dt] = d_pair(sc, s0, r0);
  const cd ratio = d / dt;
  const double cdm = std::abs(ratio);
  const double sgn = ap(0, 1) >= 0.0 ? 1.0 : -1.0;
  const Vec2 xi(std::sqrt(cdm) * std::sqrt(ap(1, 1)), -sgn * std::sqrt(ap(0, 0)) / std::sqrt(cdm));
  SpectrumWitness out;
  out.s0 = s0;
  out.x0 = r0 * Vec2(std::cos(phi), std::sin(phi));
  out.xi0 = rm * xi;
  out.phi = phi;
  out.a0 = a0;
  out.tau = std::arg(ratio);
  const Mat2c as = a_sigma(an, sc, s0, out.x0);
  const Vec2c xc = out.xi0.cast<cd>();
  out.residual = std::abs(cd(xc.transpose() * as * xc));
  return out;
}

struct CircleIntegral {
  cd quadrature;
  cd closed_form;
};

// Periodic trapezoidal quadrature of the unit-circle integral of 1/(z^T J^T B J z)
// next to its closed form 2 pi sqrt(det A) / det J.
inline CircleIntegral circle_integral_check(const Anisotropy& an, const ShiftedScaling& sc,
                                            ComplexFreq s, const Vec2& x) {
  const Mat2c j = jacobian(sc, s, x);
  const Mat2c c = j.transpose() * an.b.cast<cd>() * j;
  auto trap = [&](int n) {
    cd sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double th = 2.0 * std::numbers::pi * i / n;
      const Vec2c z(std::cos(th), std::sin(th));
      sum += 1.0 / cd(z.transpose() * c * z);
    }
    return sum * (2.0 * std::numbers::pi / n);
  };
  int n = 64;
  cd prev = trap(n);
  for (;;) {
    n *= 2;
    const cd cur = trap(n);
    if (std::abs(cur - prev) <= 1e-14 * std::abs(cur) || n > (1 << 20)) {
      prev = cur;
      break;
    }
    prev = cur;
  }
  CircleIntegral out;
  out.quadrature = prev;
  out.closed_form = 2.0 * std::numbers::pi * std::sqrt(an.a.determinant()) / j.determinant();
  return out;
}

}  // namespace radpml
