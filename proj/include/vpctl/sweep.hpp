// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "vpctl/grid.hpp"
#include "vpctl/spectral.hpp"
#include "vpctl/torus.hpp"

namespace vpctl {

// Harmonic sweep potential: theta with Lap theta = 0 outside B(x0, r0) and
// grad theta nonvanishing there; W extends grad theta into the ball as a
// smooth nonvanishing field (possible since the boundary winding is zero),
// magnitude-capped so the interior never exceeds the exterior maximum.
struct SweepField {
  TorusPoint x0;
  double r0 = 0.0;
  int n = 0;
  PotentialGrid theta;
  DensityGrid charge;  // = Lap theta, supported in the ball
  VectorGrid W;

  double min_norm = 0.0;          // min |W| over all of T^2
  double min_norm_outside = 0.0;  // min |grad theta| outside the ball
  double max_norm_outside = 0.0;  // == 1 after normalization
  double harmonic_residual = 0.0; // sup |Lap theta| outside the ball
  double boundary_winding = 0.0;  // winding of grad theta around the sphere

  struct Flux {
    int p = 0, q = 0;          // closed direction (q, p)/|(p,q)|
    double value = 0.0;        // loop integral of dtheta/dn over an avoiding line
    double clearance = 0.0;    // distance of that line from x0
  };
  std::vector<Flux> fluxes;
  double min_flux_abs = 0.0;

  // fraction of sampled positions whose straight ray along W(x) meets
  // B(x0, r0/4) within aim_length
  double aim_fraction = 0.0;
  double aim_length = 0.0;
  double aim_worst_hit = 0.0;  // longest first-hit among the hitting rays

  std::string candidate;  // which construction passed certification
};

// Certification floor on min |W| (field normalized to max-outside 1).
inline constexpr double kSweepMinNorm = 1e-3;

// Build and certify the ball sweep at grid size n_grid. Tries the frozen
// ring-harmonic recipe first, then a dipole pair; throws std::runtime_error
// listing measured minima if every candidate fails certification.
SweepField build_sweep(const TorusPoint& x0, double r0, int n_grid = 256);

// Slab variant: W == n_hat everywhere; theta linear across the slab
// (min_norm = 1). n_int = integer normal direction (p, q).
SweepField build_sweep_slab(int p, int q, double d, int n_grid = 256);

// internals exposed for tests
DensityGrid sweep_recipe_charge(const TorusPoint& x0, double r0, int n_grid);
DensityGrid sweep_dipole_charge(const TorusPoint& x0, double r0, int n_grid);
SweepField certify_sweep(const TorusPoint& x0, double r0, const DensityGrid& charge,
                         const std::string& name);

}  // namespace vpctl
