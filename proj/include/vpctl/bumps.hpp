// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>

#include "vpctl/vec2.hpp"

namespace vpctl {

// C-infinity building blocks. All profiles are exact-zero outside their
// support and flat (all derivatives vanish) at the endpoints.

// exp(-1/(1-u^2)) on |u|<1, else 0
double mollifier(double u);
// monotone C-infinity step: 0 for u<=0, 1 for u>=1
double smoothstep(double u);

// Smooth profile on a 1D window with optional unit integral.
class BumpProfile {
 public:
  enum class Kind { kZ, kLambda, kUpsilon, kUpsilonTilde, kY, kWindow };

  // Z: radial bump on R^2 supported in |v| < 1 with integral 1 (2D).
  static BumpProfile z_velocity();
  // Lambda: C_0^inf((0,1)), >= 0, integral 1 (1D).
  static BumpProfile lambda_window();
  // Upsilon: 0 on [0,T/48] u [47T/48,T], 1 on [T/24, 23T/24].
  static BumpProfile upsilon(double T);
  // UpsilonTilde: 0 on [0,T/100], 1 on [T/48, T].
  static BumpProfile upsilon_tilde(double T);
  // Y: supp in (T/3, 2T/3), >= 0, integral over [0,T] = 1.
  static BumpProfile y_window(double T);
  // generic plateau window: 0 outside (a,b), 1 on [a+rise, b-rise]
  static BumpProfile window(double a, double b, double rise);

  double operator()(double u) const { return eval_(u); }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  Kind kind() const { return kind_; }

  // numeric integral over the support (1D; for Z the 2D radial integral)
  double integral() const;

 private:
  BumpProfile(Kind k, double lo, double hi, std::function<double(double)> f)
      : kind_(k), lo_(lo), hi_(hi), eval_(std::move(f)) {}
  Kind kind_;
  double lo_, hi_;
  std::function<double(double)> eval_;
};

// Z evaluated at a velocity vector (radial).
double z_value(const BumpProfile& z, const Vec2& v);

}  // namespace vpctl
