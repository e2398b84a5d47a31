// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vpctl/absorption.hpp"
#include "vpctl/control.hpp"
#include "vpctl/fields.hpp"
#include "vpctl/grid.hpp"

namespace vpctl {

// Mass-preserving restriction/extension: particles inside the cutoff region
// are dropped and the deficit is re-injected as a fixed nonnegative bump of
// unit mass supported in B(x0, r0) x R^2.
struct ExtensionOperator {
  RegionSpec cutoff;          // B(x0, 2 r0) or the slab H_{2d}
  DensityGrid correction;     // rho_u, unit mass, supported in B(x0, r0)
  RegionSpec correction_box;  // support of u (inside omega)

  static ExtensionOperator ball(const TorusPoint& x0, double r0, int n);
  static ExtensionOperator slab(int p, int q, double d, int n);
};

// density history over uniform time knots (the only functional of g the
// operator consumes is phi^g)
struct IterationState {
  int iter = 0;
  double T = 0.0;
  std::vector<DensityGrid> rho;  // one per knot t_k = k T / (n_knots-1)
  double gap_to_prev = 0.0;      // sup over knots of sup-norm density change
  std::vector<double> mass;      // per-knot total mass
  double weighted_sup = 0.0;     // diagnostic: sup (1+|v|)^gamma-proxy (density level)
  double holder_quotient = 0.0;  // diagnostic: discrete Holder quotient at grid scale
};

struct FixedPointParams {
  int n_grid = 128;
  int n_knots = 64;
  double dt = 2e-3;
  int max_iters = 12;
  double tol = 1e-6;
  double eps = 0.5;        // S_eps radius used for diagnostics
  bool parallel = true;
};

struct ControlReport {
  bool converged = false;
  bool relevant = false;
  int iterations = 0;
  double final_gap = 0.0;
  double residual_mass_outside = 0.0;
  double initial_mass = 0.0;
  double mass_drift = 0.0;  // max |mass(t) - mass(0)| over knots and iters
  double g_support_leak = 0.0;  // sup |G| outside omega / sup |G|
  double g_support_cell = 0.0;  // widest leak distance in grid cells
  double lambda = 1.0;          // global wrapper scale
  std::vector<double> gap_history;
  std::string note;
  std::string to_json() const;
};

// particle sampler for f0 on a phase-space grid
struct InitialData {
  std::function<double(TorusPoint, Vec2)> f0;
  double v_max = 6.0;
  int nx = 128;     // spatial samples per axis
  int nv = 24;      // velocity samples per axis over [-v_max, v_max]
};
WeightedEnsemble sample_ensemble(const InitialData& data);

// One sweep of the operator: deposit densities of g, solve per knot, absorb-
// transport f0 under F + grad phi^g + (E-bar - grad phi-bar), restrict /
// extend, add f-bar. Returns the new iterate; `ens_out` (optional) receives
// the transported ensemble.
IterationState apply_V(const IterationState& g, const WeightedEnsemble& f0,
                       const ReferenceControl& ref, const ForceField& F,
                       const MagneticProfile* b, const FixedPointParams& params,
                       WeightedEnsemble* ens_out = nullptr);

ControlReport run_fixed_point(const WeightedEnsemble& f0, const ReferenceControl& ref,
                              const ForceField& F, const MagneticProfile* b,
                              const RegionSpec& omega, const FixedPointParams& params,
                              const std::string& csv_path = "");

// Global (hyperplane) wrapper: scale f0 by halving lambda until the slab
// fixed point converges; reports the lambda used (or honest failure).
ControlReport run_global(const WeightedEnsemble& f0, const HyperplaneControl& hc,
                         const ForceField& F, const RegionSpec& omega,
                         const FixedPointParams& params, double eps_mass = 0.5,
                         int max_halvings = 8);

// Rendezvous verification (relevance): all sampled states meet gamma3- in
// the window under the reference force (+ optional perturbing potential of
// sup-norm eps).
struct RendezvousReport {
  std::size_t total = 0;
  std::size_t hit = 0;
  double window_lo = 0.0, window_hi = 0.0;
  std::vector<PhaseState> failures;
  std::vector<std::string> diagnosis;  // per failure: fast-case / slow-case
  double fraction() const { return total ? static_cast<double>(hit) / total : 0.0; }
};
RendezvousReport verify_rendezvous(const ReferenceControl& ref, const ForceField& F,
                                   const MagneticProfile* b, int grid, int dirs, double v_cap,
                                   double ring_speed, double eps_perturb);

// certified perturbation margin: largest dyadic eps <= eps_max with 100%
// rendezvous on the certification sample
double certify_rendezvous_margin(const ReferenceControl& ref, const ForceField& F,
                                 const MagneticProfile* b, double eps_max = 0.5);

// Non-concentration check: flow pairs (x,0), (y,0) and return
// c = max(max_ratio, 1/min_ratio) over sampled pairs and times.
struct NonConcentration {
  double c = 1.0;
  double min_ratio = 1.0;
  double max_ratio = 1.0;
  bool violation = false;
};
NonConcentration verify_nonconcentration(const ForceField& force, double T, int n_pairs,
                                         std::uint64_t seed, double dt = 1e-3);

}  // namespace vpctl
