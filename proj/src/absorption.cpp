// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#include "vpctl/absorption.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "vpctl/parallel.hpp"

namespace vpctl {

BoundaryAtlas BoundaryAtlas::ball(const TorusPoint& x0, double r0) {
  BoundaryAtlas a;
  a.surface = SurfaceSpec::sphere(x0, r0);
  return a;
}

BoundaryAtlas BoundaryAtlas::slab(int p, int q, double d) {
  BoundaryAtlas a;
  const double l = std::hypot(p, q);
  a.surface = SurfaceSpec::slab({p / l, q / l}, 0.0, d, 1.0 / l);
  return a;
}

namespace {

// distance of x to the atlas surface plus the local outward normal
std::pair<double, Vec2> surface_gap(const SurfaceSpec& s, const TorusPoint& x) {
  if (s.kind == SurfaceSpec::Kind::kSphere) {
    return {std::fabs(torus_dist(x, s.center) - s.r), sphere_normal(s, x)};
  }
  const double u = Vec2{x.x1, x.x2}.dot(s.n_hat);
  double best = 1e300;
  Vec2 nu;
  for (double sgn : {-1.0, 1.0}) {
    const double base = s.offset + sgn * s.d;
    double rel = u - base;
    rel -= s.spacing * std::round(rel / s.spacing);
    if (std::fabs(rel) < best) {
      best = std::fabs(rel);
      nu = sgn >= 0.0 ? s.n_hat : -s.n_hat;
    }
  }
  return {best, nu};
}

}  // namespace

BoundaryClass classify(const BoundaryAtlas& atlas, const TorusPoint& x, const Vec2& v) {
  auto [gap, nu] = surface_gap(atlas.surface, x);
  if (gap > atlas.tolerance)
    throw std::invalid_argument("classify: point off the boundary surface");
  return classify_boundary(atlas.surface, x, v, nu);
}

double opacity_u(const SurfaceSpec& surf, const Vec2& v, const Vec2& nu) {
  const double s = v.norm();
  if (s < 1e-300) return 1.0;
  if (surf.kind == SurfaceSpec::Kind::kSphere) {
    const double a = v.dot(nu) / s;  // incidence
    const double ss = smoothstep(s - 1.0);                         // 0 below |v|=1, 1 above 2
    const double si = smoothstep(((-a) - 0.125) / (0.2 - 0.125));  // 0 at -1/8, 1 at -1/5
    return 1.0 - ss * si;
  }
  const double w = v.dot(nu);
  const double ss = smoothstep(s - 1.0);
  const double sw = smoothstep(((-w) - 1.5) / 0.5);
  return 1.0 - ss * sw;
}

double opacity(const BoundaryAtlas& atlas, const BumpProfile& upsilon, double t,
               const TorusPoint& x, const Vec2& v) {
  auto [gap, nu] = surface_gap(atlas.surface, x);
  if (gap > atlas.tolerance)
    throw std::invalid_argument("opacity: point off the boundary surface");
  const double ups = upsilon(t);
  return (1.0 - ups) + ups * opacity_u(atlas.surface, v, nu);
}

double WeightedEnsemble::total_mass() const {
  double m = 0.0;
  for (const auto& p : particles)
    if (p.alive) m += p.weight;
  return m;
}

std::size_t WeightedEnsemble::alive_count() const {
  std::size_t n = 0;
  for (const auto& p : particles)
    if (p.alive) ++n;
  return n;
}

namespace {

void transport_one(WeightedParticle& p, const ForceField& force, double t0, double t1,
                   const BoundaryAtlas& atlas, const BumpProfile& upsilon,
                   const TransportParams& params, double* culled) {
  if (!p.alive) return;
  const double dt = suggest_dt(params.dt, 0.0, params.b ? params.b->b_max() : 0.0,
                               p.state.v.norm());
  WalkResult wr = walk_events(
      p.state, force, params.b, t0, t1, dt, params.scheme, {atlas.surface},
      [&](const CrossingEvent& ev) {
        if (ev.cls == BoundaryClass::kGammaMinus || ev.cls == BoundaryClass::kGamma2Minus ||
            ev.cls == BoundaryClass::kGamma3Minus) {
          const double ups = upsilon(ev.t);
          const double factor = (1.0 - ups) + ups * opacity_u(atlas.surface, ev.state.v, ev.nu);
          p.weight *= factor;
          p.crossings += 1;
          if (p.weight < kCullThreshold) {
            *culled += p.weight;
            p.weight = 0.0;
            p.alive = false;
            p.state = ev.state;
            return false;
          }
        }
        return true;
      });
  if (p.alive) p.state = wr.state;
}

}  // namespace

void transport_absorb(WeightedEnsemble& ens, const ForceField& force, double t0, double t1,
                      const BoundaryAtlas& atlas, const BumpProfile& upsilon,
                      const TransportParams& params) {
  if (!params.parallel) {
    transport_absorb_serial(ens, force, t0, t1, atlas, upsilon, params);
    return;
  }
  std::vector<double> culled(ens.particles.size(), 0.0);
  parallel_for(static_cast<std::int64_t>(ens.particles.size()), [&](std::int64_t k) {
    transport_one(ens.particles[k], force, t0, t1, atlas, upsilon, params, &culled[k]);
  });
  for (double c : culled) ens.culled_mass += c;
  ens.t = t1;
}

void transport_absorb_serial(WeightedEnsemble& ens, const ForceField& force, double t0, double t1,
                             const BoundaryAtlas& atlas, const BumpProfile& upsilon,
                             const TransportParams& params) {
  double culled = 0.0;
  for (auto& p : ens.particles) transport_one(p, force, t0, t1, atlas, upsilon, params, &culled);
  ens.culled_mass += culled;
  ens.t = t1;
}

std::pair<double, bool> verify_crossing_bound(const WeightedEnsemble& ens,
                                              const std::vector<double>& speeds0,
                                              double c_probe) {
  double worst = 0.0;
  for (const auto& p : ens.particles) {
    const double s0 = speeds0.at(static_cast<std::size_t>(p.id));
    worst = std::max(worst, p.crossings / (1.0 + s0));
  }
  return {worst, worst <= c_probe};
}

bool RegionSpec::contains(const TorusPoint& p) const {
  switch (kind) {
    case Kind::kAll:
      return true;
    case Kind::kDisk:
      return torus_dist(p, center) <= radius;
    case Kind::kSlab: {
      const double u = Vec2{p.x1, p.x2}.dot(n_hat);
      double rel = u - 0.0;
      rel -= spacing * std::round(rel / spacing);
      return std::fabs(rel) <= d;
    }
  }
  return false;
}

double RegionSpec::area() const {
  switch (kind) {
    case Kind::kAll:
      return 1.0;
    case Kind::kDisk:
      return M_PI * radius * radius;
    case Kind::kSlab:
      return 2.0 * d / spacing;
  }
  return 0.0;
}

double residual_mass_outside(const WeightedEnsemble& ens, const RegionSpec& omega) {
  double m = 0.0;
  for (const auto& p : ens.particles)
    if (p.alive && !omega.contains(p.state.x)) m += p.weight;
  return m;
}

void save_ensemble_csv(const WeightedEnsemble& ens, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "id,x1,x2,v1,v2,weight,crossings\n";
  char buf[200];
  for (const auto& p : ens.particles) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                  static_cast<long long>(p.id), p.state.x.x1, p.state.x.x2, p.state.v.x,
                  p.state.v.y, p.weight, p.crossings);
    f << buf;
  }
}

}  // namespace vpctl
