// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vpctl/fields.hpp"
#include "vpctl/grid.hpp"
#include "vpctl/torus.hpp"
#include "vpctl/vec2.hpp"

namespace vpctl {

struct PhaseState {
  TorusPoint x;
  Vec2 v;
};

enum class Scheme { kRk4, kRotationSplitting };

enum class BoundaryClass { kNone, kGammaPlus, kGammaMinus, kGamma2Minus, kGamma3Minus };

std::string to_string(BoundaryClass c);

// Event surface: sphere S(center, r) or the lifted-hyperplane pair
// Gamma = {u = offset - d} u {u = offset + d} (mod spacing), u = x . n_H
// along the unwrapped normal coordinate.
struct SurfaceSpec {
  enum class Kind { kSphere, kSlab } kind = Kind::kSphere;
  // sphere
  TorusPoint center;
  double r = 0.1;
  // slab
  Vec2 n_hat;       // unit normal
  double offset = 0.0;
  double d = 0.0;
  double spacing = 1.0;  // distance between lifted hyperplanes

  static SurfaceSpec sphere(const TorusPoint& c, double r);
  static SurfaceSpec slab(const Vec2& n_hat, double offset, double d, double spacing);
};

// Ball-case thresholds (sphere): gamma- { |v| > 1/2, v.nu < -|v|/10 },
// gamma2- { |v| >= 1, v.nu <= -|v|/8 }, gamma3- { |v| >= 2, v.nu <= -|v|/5 }.
// Slab case uses absolute incidence: gamma- { v.nu < -1 },
// gamma2- { |v| >= 1, v.nu <= -3/2 }, gamma3- { |v| >= 2, v.nu <= -2 }.
BoundaryClass classify_boundary(const SurfaceSpec& surf, const TorusPoint& x, const Vec2& v,
                                const Vec2& nu);

// Outward unit normal at a sphere crossing point.
Vec2 sphere_normal(const SurfaceSpec& surf, const TorusPoint& x);

struct CrossingEvent {
  double t = 0.0;
  PhaseState state;
  int surface = 0;  // index into the trace's surface list
  BoundaryClass cls = BoundaryClass::kNone;
  double incidence = 0.0;  // v.nu / |v|
  Vec2 nu;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> samples;
  double dt = 0.0;
  std::vector<CrossingEvent> events;
};

// One integrator step of size h (h may be negative). raw_disp receives the
// unwrapped displacement when non-null.
PhaseState step_rk4(const PhaseState& s, const ForceField& force, double t, double h,
                    Vec2* raw_disp = nullptr);
// Strang splitting: half kick by `extra`, exact cyclotron arc with b sampled
// at the drift midpoint, half kick.
PhaseState step_rotsplit(const PhaseState& s, const ForceField& extra, const MagneticProfile& b,
                         double t, double h, Vec2* raw_disp = nullptr);

// Fixed-step integration from t0 to t1 (either direction); the last partial
// step is shortened. For kRotationSplitting, `force` is the non-magnetic part
// and `b` must be non-null; for kRk4 `force` is the total force.
PhaseState advance(const PhaseState& s, const ForceField& force, const MagneticProfile* b,
                   double t0, double t1, double dt, Scheme scheme);

// Per-run step rule: 0.1 / (b_max + force_sup + |v|).
double suggest_dt(double dt_user, double force_sup, double b_max, double speed);

// Dense trace with surface-crossing events located by bisection to ~1e-10
// in time. sample_stride > 1 keeps every k-th sample (events are exact).
Trajectory trace(const PhaseState& s, const ForceField& force, const MagneticProfile* b,
                 double t0, double t1, double dt, Scheme scheme,
                 const std::vector<SurfaceSpec>& surfaces, int sample_stride = 1);

// Event-driven walk without sample storage. on_event may return false to
// stop early (e.g. after a particle is fully absorbed); on_step (optional)
// sees every accepted step. Returns the final state (at t1 or the stop time).
struct WalkResult {
  PhaseState state;
  double t = 0.0;
  bool stopped = false;
};
WalkResult walk_events(const PhaseState& s, const ForceField& force, const MagneticProfile* b,
                       double t0, double t1, double dt, Scheme scheme,
                       const std::vector<SurfaceSpec>& surfaces,
                       const std::function<bool(const CrossingEvent&)>& on_event,
                       const std::function<void(double, const PhaseState&)>& on_step = {});

// max over samples of |finite-difference theta' - b(X)|; theta unwrapped by
// accumulated increments. Skips samples with |V| < 1e-9.
struct AngleDiagnostic {
  double max_defect = 0.0;
  int skipped = 0;
};
AngleDiagnostic angle_diagnostic(const Trajectory& traj, const MagneticProfile& b);

// max over samples of |d|V|/dt - extra.V/|V||.
double speed_diagnostic(const Trajectory& traj, const ForceField& extra);

//

// sup over shared sample times of (torus position gap, velocity gap).
std::pair<double, double> compare_trajectories(const PhaseState& s, const ForceField& force_a,
                                               const MagneticProfile* b_a,
                                               const ForceField& force_b,
                                               const MagneticProfile* b_b, double t0, double t1,
                                               double dt, Scheme scheme);

// Scaling-family check: integrates (X,V) under `force` on [0,T] from s, and
// the lambda-scaled field on [0, T/lambda] from (x, lambda v); returns
// sup_t |X^l(t/l) - X(t)| + |V^l(t/l)/l - V(t)|.
double verify_scaling(const PhaseState& s, const ForceField& force, double lambda, double T,
                      double dt);

// Round trip: forward under `force` on [0,T], then the lambda = -1 reversed
// field from the mirrored end state; returns distance back to the start.
double reversal_round_trip(const PhaseState& s, const ForceField& force, double T, double dt);

void save_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace vpctl
