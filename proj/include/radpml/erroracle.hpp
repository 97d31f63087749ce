#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <thread>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/FFT>

#include "radpml/bessel.hpp"
#include "radpml/error.hpp"
#include "radpml/signal.hpp"

namespace radpml {

// Half-line model: u_tt = u_xx on x > 0, u(0, t) = g(t), shifted PML on (R, R+L).
struct ErrorSeriesParams {
  double radius_pml = 0.2;
  double width = 1.0;
  double sigma_c = 1.0;
  double gamma = 1.0;
  Signal g;
  double x = 0.1;

  void validate() const {
    require(radius_pml > 0.0 && width >= 0.0, "ErrorSeriesParams: need R > 0, L >= 0");
    require(sigma_c >= 0.0 && gamma >= 0.0, "ErrorSeriesParams: sigma_c and gamma must be nonnegative");
    require(x > 0.0 && x < radius_pml, "ErrorSeriesParams: observation point must lie in (0, R)");
    require(static_cast<bool>(g), "ErrorSeriesParams: signal missing");
  }
};

enum class CQKind { BDF2, Trapezoidal };

struct CQScheme {
  CQKind kind = CQKind::BDF2;
  double dt = 1e-3;
  int n_steps = 1000;
};

// E(s) = exp(-2 s x*) / (1 - exp(-2 s x*)), x* = R + L + sigma_c L / (s + gamma).
inline std::complex<double> laplace_error_factor(const ErrorSeriesParams& p, std::complex<double> s) {
  require(s.real() > 0.0, "laplace_error_factor: Re s must be positive");
  const std::complex<double> xs = p.radius_pml + p.width + p.sigma_c * p.width / (s + p.gamma);
  const std::complex<double> q = std::exp(-2.0 * s * xs);
  return q / (1.0 - q);
}

// Full transfer function from g to the error at x: E(s) (e^{-sx} - e^{sx}), written
// without growing exponentials.
inline std::complex<double> error_transfer(const ErrorSeriesParams& p, std::complex<double> s) {
  const std::complex<double> xs = p.radius_pml + p.width + p.sigma_c * p.width / (s + p.gamma);
  const std::complex<double> q = std::exp(-2.0 * s * xs);
  return (std::exp(-s * (2.0 * xs + p.x)) - std::exp(-s * (2.0 * xs - p.x))) / (1.0 - q);
}

// Number of terms with a nonzero contribution at time t.
inline int error_series_terms(const ErrorSeriesParams& p, double t) {
  const double period = 2.0 * (p.radius_pml + p.width);
  int n = 0;
  while ((n + 1) < (t + p.radius_pml) / period) ++n;
  return n;
}

// e(t) = sum_l e^{-a_l} T_l g(t) + sum_l e^{-a_l} alpha_l int_0^t e^{-gamma tau} I1(2 alpha_l sqrt(tau))
//        tau^{-1/2} T_l g(t - tau) dtau,
// a_l = 2 sigma_c L l, alpha_l = sqrt(2 L gamma sigma_c l), T_l g(t) = g(t - x - c_l) - g(t + x - c_l),
// c_l = 2 (R + L) l.
inline double error_series(const ErrorSeriesParams& p, double t, double tol = 1e-10, int extra_terms = 0) {
  p.validate();
  require(t >= 0.0, "error_series: t must be nonnegative");
  const int nl = error_series_terms(p, t) + extra_terms;
  const double period = 2.0 * (p.radius_pml + p.width);
  double direct = 0.0, convol = 0.0;
  for (int l = 1; l <= nl; ++l) {
    const double c = period * l;
    const double a = 2.0 * p.sigma_c * p.width * l;
    auto tg = [&](double s) { return p.g(s - p.x - c) - p.g(s + p.x - c); };
    direct += std::exp(-a) * tg(t);
    if (p.gamma == 0.0 || p.sigma_c == 0.0) continue;
    const double alpha = std::sqrt(2.0 * p.width * p.gamma * p.sigma_c * l);
    const double upper = t + p.x - c;
    if (upper <= 0.0) continue;
    const double sa = std::sqrt(a), sg = std::sqrt(p.gamma);
    // tau = u^2; e^{-a - gamma u^2} I1(2 alpha u) = e^{-(sqrt(a) - sqrt(gamma) u)^2} I1e(2 alpha u)
    auto f = [&](double u) {
      const double e = sa - sg * u;
      return 2.0 * alpha * std::exp(-e * e) * bessel_i1_scaled(2.0 * alpha * u) * tg(t - u * u);
    };
    std::vector<double> br{0.0, std::sqrt(upper)};
    if (t - p.x - c > 0.0) br.push_back(std::sqrt(t - p.x - c));
    const double peak = sa / sg;
    if (peak < br[1]) {
      br.push_back(peak);
      const double wid = 4.0 / sg;
      if (peak - wid > 0.0) br.push_back(peak - wid);
      if (peak + wid < br[1]) br.push_back(peak + wid);
    }
    std::sort(br.begin(), br.end());
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      if (br[i + 1] <= br[i]) continue;
      double err = 0.0;
      const double v =
          boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, br[i], br[i + 1], 15, 1e-11, &err);
      if (!(err <= std::max(tol, 1e-12 * std::abs(v))) || !std::isfinite(v))
        throw NumericalFailure("error_series: quadrature did not reach the tolerance");
      convol += v;
    }
  }
  return direct + convol;
}

namespace detail {

inline std::complex<double> cq_delta(CQKind kind, std::complex<double> z) {
  if (kind == CQKind::BDF2) return (1.0 - z) + 0.5 * (1.0 - z) * (1.0 - z);
  return 2.0 * (1.0 - z) / (1.0 + z);
}

}  // namespace detail

// First n+1 convolution weights of K(delta(zeta)/dt), from samples on |zeta| = lambda.
inline std::vector<double> cq_weights(const std::function<std::complex<double>(std::complex<double>)>& transfer,
                                      const CQScheme& sc) {
  require(sc.dt > 0.0, "cq_weights: dt must be positive");
  require(sc.n_steps >= 1, "cq_weights: need at least one step");
  std::size_t len = 1;
  while (len < static_cast<std::size_t>(sc.n_steps) + 1) len <<= 1;
  len <<= 1;
  const double lambda = std::pow(std::sqrt(std::numeric_limits<double>::epsilon()), 1.0 / static_cast<double>(len));
  std::vector<std::complex<double>> vals(len), coef;
  const double pi = std::acos(-1.0);
  for (std::size_t j = 0; j < len; ++j) {
    const std::complex<double> z = lambda * std::polar(1.0, 2.0 * pi * static_cast<double>(j) / len);
    const std::complex<double> s = detail::cq_delta(sc.kind, z) / sc.dt;
    if (!(s.real() > 0.0)) throw NumericalFailure("cq_weights: contour point left the right half-plane");
    vals[j] = transfer(s);
    if (!std::isfinite(vals[j].real()) || !std::isfinite(vals[j].imag()))
      throw NumericalFailure("cq_weights: transfer function not finite on the contour");
  }
  Eigen::FFT<double> fft;
  fft.fwd(coef, vals);
  std::vector<double> w(sc.n_steps + 1);
  double scale = 1.0;
  for (int n = 0; n <= sc.n_steps; ++n) {
    w[n] = coef[n].real() / static_cast<double>(len) / scale;
    scale *= lambda;
  }
  return w;
}

inline std::vector<double> cq_apply(const std::vector<double>& w, const std::vector<double>& g) {
  const std::size_t n = std::min(w.size(), g.size());
  std::vector<double> out(n, 0.0);
  if (n <= 2048) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j <= i; ++j) acc += w[i - j] * g[j];
      out[i] = acc;
    }
    return out;
  }
  std::size_t len = 1;
  while (len < 2 * n) len <<= 1;
  std::vector<double> a(len, 0.0), b(len, 0.0), c;
  std::copy(w.begin(), w.begin() + n, a.begin());
  std::copy(g.begin(), g.begin() + n, b.begin());
  std::vector<std::complex<double>> fa, fb;
  Eigen::FFT<double> fft;
  fft.fwd(fa, a);
  fft.fwd(fb, b);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  fft.inv(c, fa);
  std::copy(c.begin(), c.begin() + n, out.begin());
  return out;
}

// Samples e(n dt), n = 0..n_steps, of the inverse Laplace transform of E(s)(e^{-sx} - e^{sx}) g^(s).
inline std::vector<double> cq_invert(const ErrorSeriesParams& p, const CQScheme& sc) {
  p.validate();
  const auto w = cq_weights([&p](std::complex<double> s) { return error_transfer(p, s); }, sc);
  std::vector<double> g(sc.n_steps + 1);
  for (int n = 0; n <= sc.n_steps; ++n) g[n] = p.g(n * sc.dt);
  return cq_apply(w, g);
}

struct SweepPoint {
  double sigma_c = 0.0;
  double abs_error = 0.0;
};

// |e(t, x)| for each sigma_c, with nu = sigma_c / gamma fixed by the template.
inline std::vector<SweepPoint> sigma_sweep(const ErrorSeriesParams& tmpl, const std::vector<double>& sigmas, double t,
                                           double x, unsigned threads = 1) {
  require(tmpl.gamma > 0.0, "sigma_sweep: template gamma must be positive");
  const double nu = tmpl.sigma_c / tmpl.gamma;
  require(nu > 0.0, "sigma_sweep: template sigma_c must be positive");
  std::vector<SweepPoint> out(sigmas.size());
  auto run = [&](std::size_t i) {
    ErrorSeriesParams p = tmpl;
    p.sigma_c = sigmas[i];
    p.gamma = sigmas[i] / nu;
    p.x = x;
    out[i] = {sigmas[i], std::abs(error_series(p, t))};
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(sigmas.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < sigmas.size(); ++i) run(i);
    return out;
  }
  std::vector<std::exception_ptr> errs(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < sigmas.size(); i += threads) run(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

inline double attenuation_factor(double sigma_c, double gamma, double omega, double k, double depth) {
  require(depth >= 0.0, "attenuation_factor: depth must be nonnegative");
  return std::exp(-k * omega * sigma_c * depth / (omega * omega + gamma * gamma));
}

}  // namespace radpml
