#pragma once

#include <cmath>
#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "radpml/anisotropy.hpp"
#include "radpml/error.hpp"

namespace radpml {

using cd = std::complex<double>;
using Vec2c = Eigen::Vector2cd;
using Mat2c = Eigen::Matrix2cd;

// Laplace variable restricted to the open right half-plane.
struct ComplexFreq {
  cd value;
  ComplexFreq(cd s) : value(s) {  // NOLINT: implicit on purpose
    require(s.real() > 0.0 && std::isfinite(s.imag()), "ComplexFreq: Re s must be positive");
  }
  ComplexFreq(double s) : ComplexFreq(cd(s, 0.0)) {}  // NOLINT
  operator cd() const { return value; }
};

// Piecewise-constant absorption: 0 inside radius R, sigma_c outside.
struct DampingProfile {
  double radius_pml = 1.0;
  double sigma_c = 0.0;

  DampingProfile() = default;
  DampingProfile(double r, double sc) : radius_pml(r), sigma_c(sc) {
    require(r > 0.0, "DampingProfile: R must be positive");
    require(sc >= 0.0, "DampingProfile: sigma_c must be nonnegative");
  }

  double sigma(double r) const { return r > radius_pml ? sigma_c : 0.0; }

  // r^{-1} times the integral of sigma from R to r.
  double sigma_tilde(double r) const {
    require(r > 0.0, "sigma_tilde: radius must be positive");
    return r > radius_pml ? sigma_c * (r - radius_pml) / r : 0.0;
  }
};

struct ShiftedScaling {
  DampingProfile profile;
  double gamma = 0.0;

  ShiftedScaling() = default;
  ShiftedScaling(DampingProfile p, double g) : profile(p), gamma(g) {
    require(g >= 0.0, "ShiftedScaling: gamma must be nonnegative");
  }

  std::optional<double> nu() const {
    if (gamma == 0.0) return std::nullopt;
    return profile.sigma_c / gamma;
  }
};

inline double sigma_tilde(const DampingProfile& p, double r) { return p.sigma_tilde(r); }

// (d, d~) at radius r, both evaluated at the shifted frequency s + gamma.
inline std::pair<cd, cd> d_pair(const ShiftedScaling& sc, ComplexFreq s, double r) {
  require(r > 0.0, "d_pair: radius must be positive");
  const cd sg = s.value + sc.gamma;
  return {1.0 + sc.profile.sigma(r) / sg, 1.0 + sc.profile.sigma_tilde(r) / sg};
}

inline Vec2c scaled_coordinate(const ShiftedScaling& sc, ComplexFreq s, const Vec2& x) {
  const double r = x.norm();
  if (r <= sc.profile.radius_pml) return x.cast<cd>();
  return x.cast<cd>() * d_pair(sc, s, r).second;
}

inline std::pair<Mat2, Mat2> radial_projectors(const Vec2& x) {
  const double r = x.norm();
  require(r >= 1e-300, "radial projectors: point at the origin");
  const Vec2 xh = x / r;
  const Mat2 par = xh * xh.transpose();
  return {par, Mat2::Identity() - par};
}

inline Mat2c jacobian(const ShiftedScaling& sc, ComplexFreq s, const Vec2& x) {
  const double r = x.norm();
  if (r <= sc.profile.radius_pml) return Mat2c::Identity();
  auto [d, dt] = d_pair(sc, s, r);
  auto [par, perp] = radial_projectors(x);
  return d * par.cast<cd>() + dt * perp.cast<cd>();
}

inline Mat2c a_sigma(const Anisotropy& an, const ShiftedScaling& sc, ComplexFreq s, const Vec2& x) {
  const double r = x.norm();
  if (r <= sc.profile.radius_pml || sc.profile.sigma_c == 0.0) return an.a.cast<cd>();
  auto [d, dt] = d_pair(sc, s, r);
  auto [par, perp] = radial_projectors(x);
  const Mat2c jinv = par.cast<cd>() / d + perp.cast<cd>() / dt;
  return jinv * an.a.cast<cd>() * jinv.transpose() * (d * dt);
}

struct SddCoefficients {
  cd s_d_dt;        // s d d~
  cd s_d_over_dt;   // s d / d~
  cd s_dt_over_d;   // s d~ / d
};

// Partial-fraction forms of the three products, with the shift folded in.
inline SddCoefficients sdd_coefficients(const ShiftedScaling& sc, ComplexFreq sf, double r) {
  require(r > 0.0, "sdd_coefficients: radius must be positive");
  const cd s = sf.value;
  const double g = sc.gamma;
  const double sig = sc.profile.sigma(r);
  const double sigt = sc.profile.sigma_tilde(r);
  const double diff = sig - sigt;
  SddCoefficients out;
  out.s_d_dt = s + sig + sigt + (sig * sigt - g * (sig + sigt)) / (s + g) -
               g * sig * sigt / ((s + g) * (s + g));
  out.s_d_over_dt = s + diff - diff * (g + sigt) / (s + g + sigt);
  out.s_dt_over_d = s - diff + diff * (g + sig) / (s + g + sig);
  return out;
}

// Finite-to-infinite radial map f_L(r) = R L / (R + L - r) on [R, R+L).
struct MappedLayer {
  double radius_pml = 1.0;
  double width = 1.0;

  MappedLayer() = default;
  MappedLayer(double r, double l) : radius_pml(r), width(l) {
    require(r > 0.0, "MappedLayer: R must be positive");
    require(l > 0.0, "MappedLayer: width must be positive");
  }

  double map(double r) const {
    require(r >= radius_pml && r < radius_pml + width, "mapped_radius: r outside [R, R+L)");
    return radius_pml * width / (radius_pml + width - r);
  }
  double derivative(double r) const {
    const double del = radius_pml + width - r;
    return radius_pml * width / (del * del);
  }
};

inline double mapped_radius(const MappedLayer& layer, double r) { return layer.map(r); }

}  // namespace radpml
