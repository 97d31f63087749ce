#pragma once

#include <cmath>
#include <numbers>
#include <limits>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "radpml/error.hpp"

namespace radpml {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Symmetric 2x2 eigen-decomposition in closed form. Returns (lmax, lmin, angle of
// the lmax eigenvector).
inline std::tuple<double, double, double> sym_eig2(const Mat2& m) {
  const double a = m(0, 0), b = 0.5 * (m(0, 1) + m(1, 0)), c = m(1, 1);
  const double mean = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  const double lmax = mean + rad;
  const double det = a * c - b * b;
  const double lmin = lmax != 0.0 ? det / lmax : mean - rad;
  const double angle = 0.5 * std::atan2(2.0 * b, a - c);
  return {lmax, lmin, angle};
}

struct Anisotropy {
  Mat2 a;  // wave-speed tensor A
  Mat2 b;  // B = A^{-1}
  double lambda_max = 1.0;
  double lambda_min = 1.0;
  double rotation = 0.0;  // B = R diag(lmax, lmin) R^T with R the rotation by this angle

  static Anisotropy from_a(const Mat2& a_in) {
    require(std::isfinite(a_in.sum()), "anisotropy: non-finite entries");
    require(std::abs(a_in(0, 1) - a_in(1, 0)) <= 1e-14 * a_in.cwiseAbs().maxCoeff(),
            "anisotropy: A must be symmetric");
    Mat2 a = a_in;
    a(1, 0) = a(0, 1);
    auto [amax, amin, ang] = sym_eig2(a);
    require(amin > 0.0, "anisotropy: A must be positive definite");
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(0, 1);
    Mat2 b;
    b << a(1, 1) / det, -a(0, 1) / det, -a(0, 1) / det, a(0, 0) / det;
    Anisotropy out;
    out.a = a;
    out.b = b;
    auto [lmax, lmin, bang] = sym_eig2(b);
    out.lambda_max = lmax;
    out.lambda_min = lmin;
    out.rotation = bang;
    (void)amax;
    (void)ang;
    return out;
  }

  static Anisotropy from_b(const Mat2& b_in) {
    auto [bmax, bmin, ang] = sym_eig2(b_in);
    require(bmin > 0.0, "anisotropy: B must be positive definite");
    (void)bmax;
    (void)ang;
    const double det = b_in(0, 0) * b_in(1, 1) - b_in(0, 1) * b_in(0, 1);
    Mat2 a;
    a << b_in(1, 1) / det, -b_in(0, 1) / det, -b_in(0, 1) / det, b_in(0, 0) / det;
    Anisotropy out = from_a(a);
    out.b = b_in;
    out.b(1, 0) = out.b(0, 1);
    return out;
  }

  static Anisotropy diagonal(double a11, double a22) {
    Mat2 a;
    a << a11, 0.0, 0.0, a22;
    return from_a(a);
  }

  static Anisotropy isotropic(double a = 1.0) { return diagonal(a, a); }

  bool is_isotropic(double tol = 1e-14) const {
    return lambda_max - lambda_min <= tol * lambda_max;
  }
};

inline double mu_star(const Anisotropy& an) {
  return (an.lambda_max + an.lambda_min) / (2.0 * std::sqrt(an.lambda_max * an.lambda_min));
}

inline double beta(const Anisotropy& an) {
  return (an.lambda_max - an.lambda_min) / (an.lambda_max + an.lambda_min);
}

// Empty optional stands for an unbounded threshold.
inline std::optional<double> nu_star_from_beta(double b) {
  require(b >= 0.0 && b < 1.0, "nu_star: beta must lie in [0,1)");
  if (b == 0.0) return std::nullopt;
  const double t = std::sqrt(1.0 / (b * b) - 1.0);
  return 2.0 * t * (t + 1.0 / b);
}

inline std::optional<double> nu_star(const Anisotropy& an) {
  return nu_star_from_beta(beta(an));
}

// The two branches (+w, -w) of w^2 = k^T A k.
inline std::pair<double, double> dispersion_omega(const Anisotropy& an, const Vec2& k) {
  const double w = std::sqrt(k.dot(an.a * k));
  return {w, -w};
}

struct Velocities {
  Vec2 group;
  Vec2 phase;
};

inline Velocities group_phase_velocity(const Anisotropy& an, const Vec2& k) {
  const double kk = k.squaredNorm();
  require(kk > 0.0, "group_phase_velocity: zero wave vector");
  const double w = std::sqrt(k.dot(an.a * k));
  return {an.a * k / w, (w / kk) * k};
}

struct BackwardScan {
  bool backward = false;
  Vec2 worst_k = Vec2::Zero();
  double worst_product = 0.0;
  int samples = 0;
};

// Scans unit wave vectors for (v_g.e)(v_p.e) < 0.
inline BackwardScan backward_wave_in_direction(const Anisotropy& an, const Vec2& e,
                                               int sample_count = 720) {
  require(sample_count >= 8, "backward_wave_in_direction: need at least 8 samples");
  require(std::abs(e.norm() - 1.0) <= 1e-12, "backward_wave_in_direction: e must be a unit vector");
  BackwardScan out;
  out.samples = sample_count;
  out.worst_product = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sample_count; ++i) {
    const double th = 2.0 * std::numbers::pi * i / sample_count;
    const Vec2 k(std::cos(th), std::sin(th));
    const auto v = group_phase_velocity(an, k);
    const double prod = v.group.dot(e) * v.phase.dot(e);
    if (prod < out.worst_product) {
      out.worst_product = prod;
      out.worst_k = k;
    }
  }
  out.backward = out.worst_product < 0.0;
  return out;
}

// Same test with e taken along k itself, i.e. the radial direction of each mode.
inline BackwardScan backward_wave_radial(const Anisotropy& an, int sample_count = 720) {
  require(sample_count >= 8, "backward_wave_radial: need at least 8 samples");
  BackwardScan out;
  out.samples = sample_count;
  out.worst_product = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sample_count; ++i) {
    const double th = 2.0 * std::numbers::pi * i / sample_count;
    const Vec2 k(std::cos(th), std::sin(th));
    const auto v = group_phase_velocity(an, k);
    const double prod = v.group.dot(k) * v.phase.dot(k);
    if (prod < out.worst_product) {
      out.worst_product = prod;
      out.worst_k = k;
    }
  }
  out.backward = out.worst_product < 0.0;
  return out;
}

// Points p with p^T A p = 1, one per equally spaced polar angle.
inline std::vector<Vec2> slowness_curve(const Anisotropy& an, int n) {
  require(n >= 3, "slowness_curve: need at least 3 points");
  std::vector<Vec2> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * std::numbers::pi * i / n;
    const Vec2 u(std::cos(th), std::sin(th));
    pts.push_back(u / std::sqrt(u.dot(an.a * u)));
  }
  return pts;
}

}  // namespace radpml
