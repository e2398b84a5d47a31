// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "vpctl/absorption.hpp"
#include "vpctl/fields.hpp"
#include "vpctl/fixed_point.hpp"

namespace vpctl {

// Batch scenario configuration (JSON, schema version 1). Paper-threshold
// fractions appear as named defaults and may be overridden for sensitivity
// studies.
struct ScenarioConfig {
  int schema_version = 1;
  std::string name = "default";

  // geometry
  TorusPoint x0{0.5, 0.5};
  double r0 = 0.24;
  RegionSpec omega;  // must contain B(x0, 2 r0) in the local case
  // hyperplane spec (global case)
  int hp = 1, hq = 0;
  double slab_d = 0.05;

  // field
  std::string field_kind = "none";  // none | constant | magnetic-constant |
                                    // magnetic-axes-cross | magnetic-grid
  Vec2 constant_force{0.0, 0.0};
  double b_constant = 1.0;
  double axes_width = 0.08;   // half-width of the axes-cross support gap
  std::string b_grid_file;

  // horizon and data
  double T = 12.0;
  double gamma = 3.0;  // decay exponent, > 2
  double kappa = 1e-3;
  double v_max = 6.0;
  bool stress = false;  // kappa outside the smallness regime, flagged

  // resolutions
  int n_grid = 128;
  int n_geo = 512;
  int particles_x = 96;
  int particles_v = 18;
  int n_knots = 64;
  double dt = 2e-3;
  int max_iters = 12;
  double tol = 1e-6;

  std::uint64_t seed = 1;

  // named paper fractions (overridable)
  double frac_upsilon_on = 1.0 / 24.0;
  double frac_upsilon_off = 1.0 / 48.0;

  static ScenarioConfig from_json_file(const std::string& path);
  static ScenarioConfig from_json_text(const std::string& text);
  std::string to_json() const;
  std::string digest() const;  // FNV-1a hash of the canonical JSON

  // derived objects
  MagneticProfile magnetic_profile() const;
  ForceField external_force() const;
  bool is_magnetic() const;
  InitialData initial_data() const;
  void validate() const;
};

}  // namespace vpctl
