// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vpctl/bumps.hpp"
#include "vpctl/characteristics.hpp"
#include "vpctl/fields.hpp"

namespace vpctl {

// Boundary geometry plus the class thresholds implied by its kind.
struct BoundaryAtlas {
  SurfaceSpec surface;
  static BoundaryAtlas ball(const TorusPoint& x0, double r0);
  static BoundaryAtlas slab(int p, int q, double d);
  // locator tolerance for classify()
  double tolerance = 1e-6;
};

// Most specific class whose inequalities hold at (x, v); throws if x is not
// on the surface within tolerance.
BoundaryClass classify(const BoundaryAtlas& atlas, const TorusPoint& x, const Vec2& v);

// Smooth opacity: U = 1 off gamma2-, U = 0 on gamma3-, smoothstep blend in
// (|v|, incidence) between. 0 <= U <= 1 everywhere.
double opacity_u(const SurfaceSpec& surf, const Vec2& v, const Vec2& nu);

// Full crossing factor (1 - Upsilon(t)) + Upsilon(t) U(x, v).
double opacity(const BoundaryAtlas& atlas, const BumpProfile& upsilon, double t,
               const TorusPoint& x, const Vec2& v);

struct WeightedParticle {
  PhaseState state;
  double weight = 0.0;
  int crossings = 0;
  bool alive = true;
  std::int64_t id = 0;
};

struct WeightedEnsemble {
  std::vector<WeightedParticle> particles;
  double t = 0.0;
  double culled_mass = 0.0;  // ledger for weights dropped below the floor

  double total_mass() const;
  std::size_t alive_count() const;
};

inline constexpr double kCullThreshold = 1e-14;

struct TransportParams {
  double dt = 1e-3;
  Scheme scheme = Scheme::kRk4;
  const MagneticProfile* b = nullptr;  // magnetic part for rotation splitting
  bool parallel = true;
};

// Advance every particle from t0 to t1 under `force`; at each gamma- family
// crossing multiply the weight by the opacity factor and bump the counter.
// Weights below kCullThreshold are culled into the ledger.
void transport_absorb(WeightedEnsemble& ens, const ForceField& force, double t0, double t1,
                      const BoundaryAtlas& atlas, const BumpProfile& upsilon,
                      const TransportParams& params);

// Serial reference twin (same arithmetic, no threading).
void transport_absorb_serial(WeightedEnsemble& ens, const ForceField& force, double t0, double t1,
                             const BoundaryAtlas& atlas, const BumpProfile& upsilon,
                             const TransportParams& params);

// max over particles of crossings / (1 + |v0|); holds iff <= c_probe.
// speeds0 are the initial speeds (indexed by particle id).
std::pair<double, bool> verify_crossing_bound(const WeightedEnsemble& ens,
                                              const std::vector<double>& speeds0, double c_probe);

// Region descriptor for residual-mass checks.
struct RegionSpec {
  enum class Kind { kDisk, kSlab, kAll } kind = Kind::kDisk;
  TorusPoint center;
  double radius = 0.0;
  // slab
  Vec2 n_hat;
  double d = 0.0;
  double spacing = 1.0;
  bool contains(const TorusPoint& p) const;
  double area() const;
};

double residual_mass_outside(const WeightedEnsemble& ens, const RegionSpec& omega);

void save_ensemble_csv(const WeightedEnsemble& ens, const std::string& path);

}  // namespace vpctl
