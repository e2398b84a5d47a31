// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#include "vpctl/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace vpctl {

using nlohmann::json;

ScenarioConfig ScenarioConfig::from_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_json_text(ss.str());
}

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
  json j = json::parse(text);
  ScenarioConfig c;
  c.schema_version = j.value("schema_version", 1);
  if (c.schema_version != 1) throw std::runtime_error("unsupported schema_version");
  c.name = j.value("name", std::string("default"));
  if (j.contains("x0")) {
    c.x0 = {j["x0"][0].get<double>(), j["x0"][1].get<double>()};
  }
  c.r0 = j.value("r0", c.r0);
  c.T = j.value("T", c.T);
  c.gamma = j.value("gamma", c.gamma);
  c.kappa = j.value("kappa", c.kappa);
  c.v_max = j.value("v_max", c.v_max);
  c.stress = j.value("stress", false);
  c.field_kind = j.value("field_kind", std::string("none"));
  if (j.contains("constant_force"))
    c.constant_force = {j["constant_force"][0].get<double>(),
                        j["constant_force"][1].get<double>()};
  c.b_constant = j.value("b_constant", c.b_constant);
  c.axes_width = j.value("axes_width", c.axes_width);
  c.b_grid_file = j.value("b_grid_file", std::string());
  c.n_grid = j.value("n_grid", c.n_grid);
  c.n_geo = j.value("n_geo", c.n_geo);
  c.particles_x = j.value("particles_x", c.particles_x);
  c.particles_v = j.value("particles_v", c.particles_v);
  c.n_knots = j.value("n_knots", c.n_knots);
  c.dt = j.value("dt", c.dt);
  c.max_iters = j.value("max_iters", c.max_iters);
  c.tol = j.value("tol", c.tol);
  c.seed = j.value("seed", static_cast<std::uint64_t>(1));
  c.hp = j.value("hp", 1);
  c.hq = j.value("hq", 0);
  c.slab_d = j.value("slab_d", 0.05);
  c.frac_upsilon_on = j.value("frac_upsilon_on", c.frac_upsilon_on);
  c.frac_upsilon_off = j.value("frac_upsilon_off", c.frac_upsilon_off);
  c.omega.kind = RegionSpec::Kind::kDisk;
  c.omega.center = c.x0;
  c.omega.radius = j.value("omega_radius", 2.0 * c.r0 + 0.01);
  if (j.value("omega_kind", std::string("disk")) == "all") c.omega.kind = RegionSpec::Kind::kAll;
  c.validate();
  return c;
}

std::string ScenarioConfig::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["name"] = name;
  j["x0"] = {x0.x1, x0.x2};
  j["r0"] = r0;
  j["T"] = T;
  j["gamma"] = gamma;
  j["kappa"] = kappa;
  j["v_max"] = v_max;
  j["stress"] = stress;
  j["field_kind"] = field_kind;
  j["constant_force"] = {constant_force.x, constant_force.y};
  j["b_constant"] = b_constant;
  j["axes_width"] = axes_width;
  j["b_grid_file"] = b_grid_file;
  j["n_grid"] = n_grid;
  j["n_geo"] = n_geo;
  j["particles_x"] = particles_x;
  j["particles_v"] = particles_v;
  j["n_knots"] = n_knots;
  j["dt"] = dt;
  j["max_iters"] = max_iters;
  j["tol"] = tol;
  j["seed"] = seed;
  j["hp"] = hp;
  j["hq"] = hq;
  j["slab_d"] = slab_d;
  j["omega_radius"] = omega.radius;
  j["omega_kind"] = omega.kind == RegionSpec::Kind::kAll ? "all" : "disk";
  j["frac_upsilon_on"] = frac_upsilon_on;
  j["frac_upsilon_off"] = frac_upsilon_off;
  return j.dump(2);
}

std::string ScenarioConfig::digest() const {
  const std::string s = to_json();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ScenarioConfig::validate() const {
  if (gamma <= 2.0) throw std::runtime_error("config: gamma must exceed 2");
  if (r0 <= 0.0 || r0 >= 0.25) throw std::runtime_error("config: r0 must lie in (0, 1/4)");
  if (omega.kind == RegionSpec::Kind::kDisk && omega.radius < 2.0 * r0)
    throw std::runtime_error("config: omega must contain B(x0, 2 r0)");
  if (T <= 0.0) throw std::runtime_error("config: T must be positive");
  if (!stress && kappa > 0.1)
    throw std::runtime_error("config: kappa outside the smallness regime (set stress=true)");
}

bool ScenarioConfig::is_magnetic() const { return field_kind.rfind("magnetic", 0) == 0; }

MagneticProfile ScenarioConfig::magnetic_profile() const {
  if (field_kind == "magnetic-constant") return MagneticProfile::constant(b_constant, 64);
  if (field_kind == "magnetic-axes-cross") {
    const double w = axes_width;
    return MagneticProfile::from_function(
        [w](TorusPoint p) {
          const double d1 = std::min(p.x1, 1.0 - p.x1);
          const double d2 = std::min(p.x2, 1.0 - p.x2);
          const double d = std::min(d1, d2);
          // b = 1 near the axes cross, smoothly 0 away from it
          return smoothstep((2.0 * w - d) / w);
        },
        256);
  }
  if (field_kind == "magnetic-grid") {
    if (b_grid_file.empty()) throw std::runtime_error("config: b_grid_file required");
    return MagneticProfile(ScalarGrid::load_binary(b_grid_file));
  }
  throw std::runtime_error("config: not a magnetic scenario");
}

ForceField ScenarioConfig::external_force() const {
  if (field_kind == "none") return ForceField();
  if (field_kind == "constant") {
    const Vec2 f = constant_force;
    return ForceField::bounded([f](double, TorusPoint, Vec2) { return f; }, f.norm(), 0.0);
  }
  if (is_magnetic()) return ForceField::magnetic(magnetic_profile());
  throw std::runtime_error("config: unknown field_kind " + field_kind);
}

InitialData ScenarioConfig::initial_data() const {
  InitialData d;
  const double k = kappa;
  const double g = gamma;
  const TorusPoint c = x0;
  // smooth localized profile with the (1+|v|)^(-gamma-1) tail
  d.f0 = [k, g, c](TorusPoint x, Vec2 v) {
    const double spatial = 1.0 + 0.5 * std::cos(2.0 * M_PI * (x.x1 - c.x1)) *
                                     std::cos(2.0 * M_PI * (x.x2 - c.x2));
    return k * spatial * std::pow(1.0 + v.norm(), -g - 1.0);
  };
  d.v_max = v_max;
  d.nx = particles_x;
  d.nv = particles_v;
  return d;
}

}  // namespace vpctl
