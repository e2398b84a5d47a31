// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#include "vpctl/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "vpctl/bumps.hpp"
#include "vpctl/parallel.hpp"

namespace vpctl {

namespace {

#include "sweep_recipe_data.inc"

double shell_bump(double r, double lo, double hi) {
  const double mid = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
  return mollifier((r - mid) / hw);
}

}  // namespace

DensityGrid sweep_recipe_charge(const TorusPoint& x0, double r0, int n_grid) {
  const double scale = r0 / kRecipeR0;
  DensityGrid rho(n_grid);
  for (int j = 0; j < n_grid; ++j)
    for (int i = 0; i < n_grid; ++i) {
      const TorusPoint p{static_cast<double>(i) / n_grid, static_cast<double>(j) / n_grid};
      const Vec2 d = torus_delta(x0, p);
      const double r = d.norm();
      if (r >= 0.96 * r0) continue;
      const double phi = std::atan2(d.y, d.x);
      double val = 0.0;
      for (int s = 0; s < kRecipeShells; ++s) {
        const double w = shell_bump(r, kRecipeShellLo[s] * scale, kRecipeShellHi[s] * scale);
        if (w == 0.0) continue;
        for (int m = 1; m <= kRecipeMmax; ++m) {
          const int base = (s * kRecipeMmax + (m - 1)) * 2;
          val += w * (kRecipeCoef[base] * std::cos(m * phi) +
                      kRecipeCoef[base + 1] * std::sin(m * phi));
        }
      }
      rho.at(i, j) = val;
    }
  const double mu = rho.mean();
  for (double& v : rho.values()) v -= mu;
  return rho;
}

DensityGrid sweep_dipole_charge(const TorusPoint& x0, double r0, int n_grid) {
  DensityGrid rho(n_grid);
  const double a = 0.35 * r0;       // pole separation
  const double sigma = 0.25 * r0;   // bump width
  for (int j = 0; j < n_grid; ++j)
    for (int i = 0; i < n_grid; ++i) {
      const TorusPoint p{static_cast<double>(i) / n_grid, static_cast<double>(j) / n_grid};
      const Vec2 d = torus_delta(x0, p);
      const double rp = std::hypot(d.x - a, d.y);
      const double rm = std::hypot(d.x + a, d.y);
      rho.at(i, j) = mollifier(rp / sigma) - mollifier(rm / sigma);
    }
  const double mu = rho.mean();
  for (double& v : rho.values()) v -= mu;
  return rho;
}

namespace {

// closed-direction families (p, q) whose line lattice has an offset avoiding
// B(x0, r0/4); those are the directions where free flight can miss the ball.
std::vector<std::pair<int, int>> closed_families(double r0) {
  std::vector<std::pair<int, int>> fams;
  for (int q = 0; q <= 8; ++q)
    for (int p = -8; p <= 8; ++p) {
      const double l = std::hypot(p, q);
      if (l < 0.5 || l > 8.4) continue;
      if (q == 0 && p != 1) continue;
      if (q > 0 && p == 0 && q != 1) continue;
      if (q > 0 && p != 0 && std::gcd(std::abs(p), q) != 1) continue;
      if (0.5 / l > r0 / 4.0) fams.push_back({p, q});
    }
  return fams;
}

SweepField::Flux line_flux(const VectorGrid& W, const TorusPoint& x0, int p, int q) {
  const double l = std::hypot(p, q);
  const Vec2 dir{q / l, p / l};
  const Vec2 nrm{-p / l, q / l};
  const int m_samp = 4096;
  double best_clear = -1.0;
  double best_off = 0.0;
  for (int oi = 0; oi < 48; ++oi) {
    const double off = oi / 48.0 / l;
    double clear = 1e9;
    for (int k = 0; k < 256; ++k) {
      const double t = l * k / 256.0;
      const TorusPoint pt =
          wrap(x0.x1 + off * nrm.x + t * dir.x, x0.x2 + off * nrm.y + t * dir.y);
      clear = std::min(clear, torus_dist(pt, x0));
    }
    if (clear > best_clear) {
      best_clear = clear;
      best_off = off;
    }
  }
  double acc = 0.0;
  for (int k = 0; k < m_samp; ++k) {
    const double t = l * k / m_samp;
    const TorusPoint pt =
        wrap(x0.x1 + best_off * nrm.x + t * dir.x, x0.x2 + best_off * nrm.y + t * dir.y);
    acc += W.sample(pt).dot(nrm);
  }
  SweepField::Flux f;
  f.p = p;
  f.q = q;
  f.value = acc / m_samp * l;
  f.clearance = best_clear;
  return f;
}

}  // namespace

SweepField certify_sweep(const TorusPoint& x0, double r0, const DensityGrid& charge,
                         const std::string& name) {
  SweepField sf;
  sf.x0 = x0;
  sf.r0 = r0;
  sf.n = charge.n();
  sf.candidate = name;
  sf.theta = solve_poisson(charge);
  sf.charge = charge;
  VectorGrid g = gradient(sf.theta);
  const int n = sf.n;

  // min/max of |grad theta| outside the ball, measured on a 2x supersample
  double wmin = 1e300, wmax = 0.0;
  for (int j = 0; j < 2 * n; ++j)
    for (int i = 0; i < 2 * n; ++i) {
      const TorusPoint p{0.5 * i / n, 0.5 * j / n};
      if (torus_dist(p, x0) <= r0) continue;
      const double w = g.sample(p).norm();
      wmin = std::min(wmin, w);
      wmax = std::max(wmax, w);
    }
  // normalize: max |grad theta| outside = 1
  const double s = 1.0 / wmax;
  sf.theta.scale(s);
  sf.charge.scale(s);
  g.x.scale(s);
  g.y.scale(s);
  sf.min_norm_outside = wmin * s;
  sf.max_norm_outside = 1.0;

  {
    ScalarGrid lap = laplacian(sf.theta);
    double res = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const TorusPoint p{static_cast<double>(i) / n, static_cast<double>(j) / n};
        if (torus_dist(p, x0) > r0) res = std::max(res, std::fabs(lap.at(i, j)));
      }
    sf.harmonic_residual = res;
  }

  // boundary winding of grad theta on the sphere (must be 0 to extend)
  {
    const int m = 1024;
    double acc = 0.0;
    double prev = 0.0;
    for (int k = 0; k <= m; ++k) {
      const double a = 2.0 * M_PI * k / m;
      const TorusPoint p = wrap(x0.x1 + 1.02 * r0 * std::cos(a), x0.x2 + 1.02 * r0 * std::sin(a));
      const Vec2 w = g.sample(p);
      const double ang = std::atan2(w.y, w.x);
      if (k > 0) {
        double d = ang - prev;
        while (d > M_PI) d -= 2.0 * M_PI;
        while (d < -M_PI) d += 2.0 * M_PI;
        acc += d;
      }
      prev = ang;
    }
    sf.boundary_winding = acc / (2.0 * M_PI);
  }

  // interior extension in log-polar form, magnitude clamped to
  // [min_norm_outside, 1]; grad theta kept untouched outside 0.995 r0.
  sf.W = g;
  {
    const int mb = 512;
    std::vector<double> chi(mb), mag(mb);
    double prev = 0.0, acc = 0.0;
    for (int k = 0; k < mb; ++k) {
      const double a = 2.0 * M_PI * k / mb;
      const TorusPoint p = wrap(x0.x1 + 1.02 * r0 * std::cos(a), x0.x2 + 1.02 * r0 * std::sin(a));
      const Vec2 w = g.sample(p);
      const double ang = std::atan2(w.y, w.x);
      if (k == 0) {
        acc = ang;
      } else {
        double d = ang - prev;
        while (d > M_PI) d -= 2.0 * M_PI;
        while (d < -M_PI) d += 2.0 * M_PI;
        acc += d;
      }
      prev = ang;
      chi[k] = acc;
      mag[k] = std::clamp(w.norm(), sf.min_norm_outside, 1.0);
    }
    double chi_mean = 0.0, logm_mean = 0.0;
    for (int k = 0; k < mb; ++k) {
      chi_mean += chi[k];
      logm_mean += std::log(mag[k]);
    }
    chi_mean /= mb;
    logm_mean /= mb;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const TorusPoint p{static_cast<double>(i) / n, static_cast<double>(j) / n};
        const Vec2 d = torus_delta(x0, p);
        const double r = d.norm();
        if (r >= 0.995 * r0) continue;
        const double a = std::atan2(d.y, d.x);
        double fk = a / (2.0 * M_PI) * mb;
        int k0 = static_cast<int>(std::floor(fk));
        const double fr = fk - k0;
        k0 = ((k0 % mb) + mb) % mb;
        const int k1 = (k0 + 1) % mb;
        // interpolate the unwrapped angle across the seam
        double c1 = chi[k1];
        if (k1 == 0) c1 += 0.0;  // winding 0: chi closes up
        const double chib = chi[k0] * (1 - fr) + c1 * fr;
        const double magb = std::exp(std::log(mag[k0]) * (1 - fr) + std::log(mag[k1]) * fr);
        const double beta = smoothstep(r / (0.85 * r0));
        const double chii = (1 - beta) * chi_mean + beta * chib;
        const double magi = std::exp((1 - beta) * logm_mean + beta * std::log(magb));
        // blend towards grad theta near the rim so the seam stays smooth
        const double eta = smoothstep((0.995 * r0 - r) / (0.10 * r0));
        const Vec2 win{magi * std::cos(chii), magi * std::sin(chii)};
        Vec2 wo = g.sample(p);
        const double won = wo.norm();
        if (won > 1.0) wo *= 1.0 / won;  // cap interior spikes of grad theta
        const Vec2 w = (1.0 - eta) * wo + eta * win;
        sf.W.x.at(i, j) = w.x;
        sf.W.y.at(i, j) = w.y;
      }
  }

  // global min of |W|
  {
    double mn = 1e300;
    for (int j = 0; j < 2 * n; ++j)
      for (int i = 0; i < 2 * n; ++i) {
        const TorusPoint p{0.5 * i / n, 0.5 * j / n};
        mn = std::min(mn, sf.W.sample(p).norm());
      }
    sf.min_norm = mn;
  }

  // closed-line fluxes
  for (auto [p, q] : closed_families(r0)) sf.fluxes.push_back(line_flux(sf.W, x0, p, q));
  sf.min_flux_abs = 1e300;
  for (const auto& f : sf.fluxes) sf.min_flux_abs = std::min(sf.min_flux_abs, std::fabs(f.value));
  if (sf.fluxes.empty()) sf.min_flux_abs = 0.0;

  // aiming: straight ray along W(x) from sampled x hits B(x0, r0/4)?
  {
    const int gs = 96;
    const double L = 64.0;
    const double step = 0.02;
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(gs) * gs, 0);
    std::vector<double> hit_len(static_cast<std::size_t>(gs) * gs, 0.0);
    parallel_for(static_cast<std::int64_t>(gs) * gs, [&](std::int64_t idx) {
      const int i = static_cast<int>(idx % gs);
      const int j = static_cast<int>(idx / gs);
      const TorusPoint p{(i + 0.5) / gs, (j + 0.5) / gs};
      Vec2 w = sf.W.sample(p);
      const double wn = w.norm();
      if (wn < 1e-14) return;
      w = w / wn;
      for (double t = 0.0; t <= L; t += step) {
        const TorusPoint q = wrap(p.x1 + t * w.x, p.x2 + t * w.y);
        if (torus_dist(q, x0) <= r0 / 4.0) {
          hit[idx] = 1;
          hit_len[idx] = t;
          return;
        }
      }
    });
    std::size_t nh = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k < hit.size(); ++k)
      if (hit[k]) {
        ++nh;
        worst = std::max(worst, hit_len[k]);
      }
    sf.aim_fraction = static_cast<double>(nh) / hit.size();
    sf.aim_length = L;
    sf.aim_worst_hit = worst;
  }
  return sf;
}

SweepField build_sweep(const TorusPoint& x0, double r0, int n_grid) {
  if (!(r0 < 0.25)) throw std::invalid_argument("build_sweep: r0 must be < 1/4");
  std::string failures;
  {
    SweepField sf = certify_sweep(x0, r0, sweep_recipe_charge(x0, r0, n_grid), "ring-harmonic");
    if (sf.min_norm_outside >= kSweepMinNorm && std::fabs(sf.boundary_winding) < 0.25 &&
        sf.min_norm >= 0.5 * kSweepMinNorm)
      return sf;
    failures += "ring-harmonic: min|grad theta| outside = " +
                std::to_string(sf.min_norm_outside) + "; ";
  }
  {
    SweepField sf = certify_sweep(x0, r0, sweep_dipole_charge(x0, r0, n_grid), "dipole");
    if (sf.min_norm_outside >= kSweepMinNorm && std::fabs(sf.boundary_winding) < 0.25 &&
        sf.min_norm >= 0.5 * kSweepMinNorm)
      return sf;
    failures += "dipole: min|grad theta| outside = " + std::to_string(sf.min_norm_outside);
  }
  throw std::runtime_error("build_sweep: all candidates failed certification (" + failures + ")");
}

SweepField build_sweep_slab(int p, int q, double d, int n_grid) {
  if (p == 0 && q == 0) throw std::invalid_argument("build_sweep_slab: zero direction");
  const double l = std::hypot(p, q);
  const Vec2 n_hat{p / l, q / l};
  const double spacing = 1.0 / l;
  if (4.0 * d >= spacing)
    throw std::invalid_argument("build_sweep_slab: 4d exceeds hyperplane spacing");
  SweepField sf;
  sf.x0 = {0.0, 0.0};
  sf.r0 = d;
  sf.n = n_grid;
  sf.theta = PotentialGrid(n_grid);
  sf.W = VectorGrid(n_grid);
  // profile G(u) with G' = 1 outside the slab, periodic over one spacing
  const BumpProfile psi = BumpProfile::lambda_window();  // unit mass on (0,1)
  auto gprime = [&](double u) {
    // u measured from the slab center, mod spacing
    double um = u - spacing * std::floor(u / spacing);
    if (um > spacing / 2) um -= spacing;
    if (std::fabs(um) >= d) return 1.0;
    return 1.0 - spacing / (2.0 * d) * psi((um + d) / (2.0 * d));
  };
  // integrate the 1D profile once over a fine grid
  const int m = 1 << 14;
  std::vector<double> G(m + 1, 0.0);
  for (int k = 0; k < m; ++k) {
    const double u0 = spacing * k / m;
    const double u1 = spacing * (k + 1) / m;
    G[k + 1] = G[k] + 0.5 * (gprime(u0) + gprime(u1)) * (u1 - u0);
  }
  const double drift = G[m] / spacing;  // should be ~0; remove residual
  for (int k = 0; k <= m; ++k) G[k] -= drift * spacing * k / m;
  auto gval = [&](double u) {
    double um = u - spacing * std::floor(u / spacing);
    const double fk = um / spacing * m;
    int k0 = std::min(static_cast<int>(fk), m - 1);
    const double fr = fk - k0;
    return G[k0] * (1 - fr) + G[k0 + 1] * fr;
  };
  for (int j = 0; j < n_grid; ++j)
    for (int i = 0; i < n_grid; ++i) {
      const double u = (static_cast<double>(i) / n_grid) * n_hat.x +
                       (static_cast<double>(j) / n_grid) * n_hat.y;
      sf.theta.at(i, j) = gval(u);
      sf.W.x.at(i, j) = n_hat.x;
      sf.W.y.at(i, j) = n_hat.y;
    }
  sf.min_norm = 1.0;
  sf.min_norm_outside = 1.0;
  sf.max_norm_outside = 1.0;
  sf.harmonic_residual = 0.0;
  sf.boundary_winding = 0.0;
  sf.min_flux_abs = 0.0;
  sf.aim_fraction = 0.0;
  sf.candidate = "slab";
  return sf;
}

}  // namespace vpctl
