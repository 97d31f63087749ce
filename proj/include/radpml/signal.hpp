#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "radpml/error.hpp"

namespace radpml {

// Causal scalar signal of time: evaluates to 0 for t <= 0.
struct Signal {
  std::function<double(double)> fn;

  Signal() = default;
  explicit Signal(std::function<double(double)> f) : fn(std::move(f)) {}

  explicit operator bool() const { return static_cast<bool>(fn); }
  double operator()(double t) const { return t <= 0.0 ? 0.0 : fn(t); }

  // Piecewise-linear interpolation of samples values[i] at t = i*dt, zero beyond the last sample.
  static Signal from_samples(double dt, std::vector<double> values) {
    require(dt > 0.0, "Signal: sample spacing must be positive");
    require(!values.empty(), "Signal: empty sample array");
    auto data = std::make_shared<const std::vector<double>>(std::move(values));
    return Signal([dt, data](double t) {
      const auto& v = *data;
      const double x = t / dt;
      const auto i = static_cast<std::size_t>(std::floor(x));
      if (i + 1 >= v.size()) return i + 1 == v.size() && x == static_cast<double>(i) ? v[i] : 0.0;
      const double th = x - static_cast<double>(i);
      return (1.0 - th) * v[i] + th * v[i + 1];
    });
  }

  static Signal zero() {
    return Signal([](double) { return 0.0; });
  }
};

// g(t) = t^2 exp(-t^2), t > 0
inline Signal bump_signal() {
  return Signal([](double t) { return t * t * std::exp(-t * t); });
}

// Separable body source f(t, r) = time(t) * space(r).
struct Source {
  Signal time;
  std::function<double(double)> space;
};

inline Source sine_burst() {
  return {Signal([](double t) { return 1200.0 * std::sin(10.0 * t); }),
          [](double r) { return std::exp(-200.0 * r * r); }};
}

inline std::function<double(double)> gaussian_pulse_profile() {
  return [](double r) { return 120.0 * std::exp(-50.0 * r); };
}

inline Signal named_signal(const std::string& name) {
  if (name == "bump") return bump_signal();
  if (name == "sine-burst") return sine_burst().time;
  if (name == "zero") return Signal::zero();
  throw InvalidInput("unknown signal '" + name + "'");
}

}  // namespace radpml
