// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vpctl/bumps.hpp"
#include "vpctl/characteristics.hpp"
#include "vpctl/fields.hpp"
#include "vpctl/sweep.hpp"
#include "vpctl/torus.hpp"

namespace vpctl {

// Accelerator stage (middle third): impulsive field C/tau' Lambda(t/tau') W(x)
// kicking every velocity in B(0,M) into the annulus (M+1, M_tilde].
struct AcceleratorResult {
  double C = 0.0;
  double tau_prime = 0.0;
  double M_tilde = 0.0;
  double tau = 0.0;
  bool ok = false;
  std::string failure;
  // schedule pieces in local time [0, tau]
  ScheduledVectorGrid::Piece field;
  ScheduledGrid::Piece phi;
  ScheduledGrid::Piece charge;
};

// H is the bounded background force on local time [0, tau]; b_mag non-null
// selects the magnetic variant (certified against any |F_extra| <= 1).
AcceleratorResult build_accelerator(const SweepField& sweep, double tau, double M,
                                    const ForceField& H, const MagneticProfile* b_mag);

// High-velocity pulse (PropGV-style contract): time-compressed sweep pulse
// such that every |v| >= m_lower visits B(x0, r0/4) during (tau/3, 2tau/3)
// with |V| >= |v|/2, certified by sampling speeds {m, 2m}.
struct PulseResult {
  double m_lower = 0.0;
  double amplitude = 0.0;   // effective field amplitude A/tau'^2
  double tau = 0.0;
  double tau_prime = 0.0;
  bool ok = false;
  std::string failure;
  double sup_phi = 0.0;        // sup_t,x |phi|
  double grad_integral = 0.0;  // int_0^tau sup_x |grad phi(t)| dt
  ScheduledGrid::Piece phi;
  ScheduledGrid::Piece charge;
  ScheduledVectorGrid::Piece grad;
};

PulseResult build_high_velocity_pulse(const SweepField& sweep, double tau, const ForceField& H,
                                      double m_restart = 1.0);

// Compression of a base pulse: phi_tau'(t,x) = phi1(t/tau', x)/tau'^2,
// centered in [0, tau]. Exposed for the scaling-law check.
ScheduledGrid::Piece compress_pulse(const ScheduledGrid::Piece& base, double tau,
                                    double tau_prime);

struct ReferenceControl {
  enum class Variant { kBounded, kMagnetic, kHyperplane };
  Variant variant = Variant::kBounded;
  TorusPoint x0;
  double r0 = 0.0;
  double T = 0.0;

  std::shared_ptr<ScheduledGrid> phi;           // phi-bar
  std::shared_ptr<ScheduledVectorGrid> E;       // E-bar
  std::shared_ptr<ScheduledGrid> charge;        // Lap phi-bar (f-bar = Z(v) charge)

  // thresholds
  double m_lower = 0.0;
  double M = 0.0;
  double M_tilde = 0.0;
  double alpha = 0.0;
  double C_r0 = 0.0;
  double C_kick = 0.0;
  double tau_prime = 0.0;
  double eps_margin = 0.0;  // certified rendezvous perturbation margin

  SweepField sweep;
  BumpProfile z = BumpProfile::z_velocity();

  // hyperplane variant extras
  Vec2 n_hat;
  int hp = 0, hq = 0;
  double slab_d = 0.0;
  double spacing = 0.0;
  double mu = 0.0;

  // E-bar as a force field
  ForceField reference_force() const;
  // E-bar - grad phi-bar (vanishes outside the ball)
  ForceField control_correction() const;
  // f-bar value
  double f_bar(double t, const TorusPoint& x, const Vec2& v) const;
  // rho of f-bar at time t on an n-grid
  ScalarGrid f_bar_density(double t, int n) const;

  void save(const std::string& dir) const;
};

// Bounded external field case: pulse thirds + accelerator (two-pass alpha).
ReferenceControl compose_reference_bounded(double T, const ForceField& F, const TorusPoint& x0,
                                           double r0, int n_grid = 256);

// Magnetic case: zero outer thirds, magnetic accelerator in the middle.
ReferenceControl compose_reference_magnetic(double T, const MagneticProfile& b,
                                            const TorusPoint& x0, double r0,
                                            const GccCertificate& gcc, int n_grid = 256);

struct HyperplaneControl {
  int p = 1, q = 0;
  Vec2 n_hat;
  double d = 0.0;
  double spacing = 0.0;
  double mu = 0.0;
  double T = 0.0;
  PotentialGrid phi_H;
  BumpProfile y = BumpProfile::y_window(1.0);
  // reference pieces: phi-bar = mu Y(t) phi_H, E-bar = mu Y(t) n_hat
  ForceField reference_force() const;
  SurfaceSpec slab_surface() const;
};

HyperplaneControl build_hyperplane_control(int p, int q, double d, double T, const ForceField& F,
                                           int n_grid = 256);

// Magnetic high-velocity certification (PropSolRefCM): doubling search for
// m_lower such that sampled fast states visit B(x0, r0/2) during
// (T/4, 3T/4) under b v-perp + F_extra for each probe field, with
// |v|/2 <= |V| <= 2|v| throughout.
struct MagneticGvResult {
  double m_lower = 0.0;
  bool ok = false;
  std::string failure;
};
MagneticGvResult certify_magnetic_gv(const MagneticProfile& b, const TorusPoint& x0, double r0,
                                     double T, double m_restart = 1.0);

}  // namespace vpctl
