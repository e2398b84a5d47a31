// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#include "vpctl/bumps.hpp"

#include <cmath>
#include <stdexcept>

namespace vpctl {

double mollifier(double u) {
  const double u2 = u * u;
  if (u2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u2));
}

double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  // exp(-1/u) / (exp(-1/u) + exp(-1/(1-u))) is flat at both ends
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

namespace {

// integral of mollifier over [-1,1], fixed Simpson quadrature
double mollifier_mass_1d() {
  static const double val = [] {
    const int n = 4096;
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      const double a = -1.0 + 2.0 * k / n;
      const double b = -1.0 + 2.0 * (k + 1) / n;
      s += (mollifier(a) + 4.0 * mollifier(0.5 * (a + b)) + mollifier(b)) * (b - a) / 6.0;
    }
    return s;
  }();
  return val;
}

// 2D radial mass of mollifier(|v|): 2 pi int_0^1 m(r) r dr
double mollifier_mass_2d() {
  static const double val = [] {
    const int n = 4096;
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      const double a = static_cast<double>(k) / n;
      const double b = static_cast<double>(k + 1) / n;
      auto f = [](double r) { return mollifier(r) * r; };
      s += (f(a) + 4.0 * f(0.5 * (a + b)) + f(b)) * (b - a) / 6.0;
    }
    return 2.0 * M_PI * s;
  }();
  return val;
}

}  // namespace

BumpProfile BumpProfile::z_velocity() {
  const double c = 1.0 / mollifier_mass_2d();
  return BumpProfile(Kind::kZ, 0.0, 1.0, [c](double r) { return c * mollifier(r); });
}

BumpProfile BumpProfile::lambda_window() {
  const double c = 2.0 / mollifier_mass_1d();  // maps (0,1) onto (-1,1)
  return BumpProfile(Kind::kLambda, 0.0, 1.0,
                     [c](double t) { return c * mollifier(2.0 * t - 1.0); });
}

BumpProfile BumpProfile::upsilon(double T) {
  if (T <= 0) throw std::invalid_argument("upsilon: T <= 0");
  return BumpProfile(Kind::kUpsilon, T / 48.0, 47.0 * T / 48.0, [T](double t) {
    const double up = smoothstep((t - T / 48.0) / (T / 24.0 - T / 48.0));
    const double dn = smoothstep((47.0 * T / 48.0 - t) / (47.0 * T / 48.0 - 23.0 * T / 24.0));
    return up * dn;
  });
}

BumpProfile BumpProfile::upsilon_tilde(double T) {
  if (T <= 0) throw std::invalid_argument("upsilon_tilde: T <= 0");
  return BumpProfile(Kind::kUpsilonTilde, T / 100.0, T, [T](double t) {
    return smoothstep((t - T / 100.0) / (T / 48.0 - T / 100.0));
  });
}

BumpProfile BumpProfile::y_window(double T) {
  if (T <= 0) throw std::invalid_argument("y_window: T <= 0");
  const double c = 2.0 / mollifier_mass_1d() / (T / 3.0);
  return BumpProfile(Kind::kY, T / 3.0, 2.0 * T / 3.0, [T, c](double t) {
    const double u = (t - T / 3.0) / (T / 3.0);
    return c * mollifier(2.0 * u - 1.0);
  });
}

BumpProfile BumpProfile::window(double a, double b, double rise) {
  if (!(b > a) || rise <= 0 || 2 * rise > (b - a))
    throw std::invalid_argument("window: degenerate interval");
  return BumpProfile(Kind::kWindow, a, b, [a, b, rise](double t) {
    return smoothstep((t - a) / rise) * smoothstep((b - t) / rise);
  });
}

double BumpProfile::integral() const {
  if (kind_ == Kind::kZ) {
    const int n = 8192;
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      const double a = lo_ + (hi_ - lo_) * k / n;
      const double b = lo_ + (hi_ - lo_) * (k + 1) / n;
      auto f = [this](double r) { return eval_(r) * r; };
      s += (f(a) + 4.0 * f(0.5 * (a + b)) + f(b)) * (b - a) / 6.0;
    }
    return 2.0 * M_PI * s;
  }
  const int n = 8192;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = lo_ + (hi_ - lo_) * k / n;
    const double b = lo_ + (hi_ - lo_) * (k + 1) / n;
    s += (eval_(a) + 4.0 * eval_(0.5 * (a + b)) + eval_(b)) * (b - a) / 6.0;
  }
  return s;
}

double z_value(const BumpProfile& z, const Vec2& v) { return z(v.norm()); }

}  // namespace vpctl
