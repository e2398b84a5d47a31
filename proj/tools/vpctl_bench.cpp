// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Benchmark: OpenMP kernels against their serial reference twins.

#include <chrono>
#include <cstdio>
#include <random>

#include "vpctl/absorption.hpp"
#include "vpctl/grid.hpp"
#include "vpctl/parallel.hpp"

using namespace vpctl;

namespace {

double now_run(const char* name, const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%-32s %8.3f s\n", name, s);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  int n_particles = argc > 1 ? std::atoi(argv[1]) : 50000;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  WeightedEnsemble ens;
  for (int k = 0; k < n_particles; ++k) {
    WeightedParticle p;
    p.state = {{uni(rng), uni(rng)}, {4.0 * uni(rng) - 2.0, 4.0 * uni(rng) - 2.0}};
    p.weight = 1.0 / n_particles;
    p.id = k;
    ens.particles.push_back(p);
  }
  BoundaryAtlas atlas = BoundaryAtlas::ball({0.5, 0.5}, 0.2);
  BumpProfile ups = BumpProfile::upsilon(1.0);
  ForceField F = ForceField::bounded(
      [](double, TorusPoint p, Vec2) {
        return Vec2{0.3 * std::sin(2 * M_PI * p.x2), -0.3 * std::sin(2 * M_PI * p.x1)};
      },
      0.3 * 1.4143, 2.0);

  std::printf("transport_absorb, %d particles, T = 0.5\n", n_particles);
  TransportParams tp;
  tp.dt = 2e-3;
  WeightedEnsemble e1 = ens;
  tp.parallel = false;
  const double ts = now_run("serial reference", [&] {
    transport_absorb_serial(e1, F, 0.0, 0.5, atlas, ups, tp);
  });
  WeightedEnsemble e2 = ens;
  tp.parallel = true;
  const double tp_ = now_run("openmp", [&] { transport_absorb(e2, F, 0.0, 0.5, atlas, ups, tp); });
  std::printf("speedup: %.2fx on %d workers\n", ts / tp_, workers());
  double gap = 0.0;
  for (std::size_t k = 0; k < e1.particles.size(); ++k) {
    gap = std::max(gap, std::fabs(e1.particles[k].weight - e2.particles[k].weight));
    gap = std::max(gap, torus_dist(e1.particles[k].state.x, e2.particles[k].state.x));
  }
  std::printf("serial/parallel max deviation: %.3g\n", gap);

  std::printf("\ncloud-in-cell deposition, %d particles, N=256\n", n_particles);
  std::vector<WeightedPoint> pts;
  for (const auto& p : ens.particles) pts.push_back({p.state.x, p.weight});
  DensityGrid g1, g2;
  const double ds = now_run("serial reference", [&] {
    for (int r = 0; r < 50; ++r) g1 = deposit_density_serial(pts, 256);
  });
  const double dp = now_run("openmp", [&] {
    for (int r = 0; r < 50; ++r) g2 = deposit_density(pts, 256);
  });
  std::printf("speedup: %.2fx\n", ds / dp);
  double dev = 0.0;
  for (std::size_t k = 0; k < g1.values().size(); ++k)
    dev = std::max(dev, std::fabs(g1.values()[k] - g2.values()[k]));
  std::printf("max nodal deviation: %.3g\n", dev);
  return 0;
}
