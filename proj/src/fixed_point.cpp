// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#include "vpctl/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "vpctl/parallel.hpp"
#include "vpctl/spectral.hpp"

namespace vpctl {

ExtensionOperator ExtensionOperator::ball(const TorusPoint& x0, double r0, int n) {
  ExtensionOperator op;
  op.cutoff = RegionSpec{RegionSpec::Kind::kDisk, x0, 2.0 * r0, {}, 0.0, 1.0};
  op.correction_box = RegionSpec{RegionSpec::Kind::kDisk, x0, r0, {}, 0.0, 1.0};
  DensityGrid u(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const TorusPoint p{static_cast<double>(i) / n, static_cast<double>(j) / n};
      u.at(i, j) = mollifier(torus_dist(p, x0) / (0.8 * r0));
    }
  const double mass = u.mean();
  u.scale(1.0 / mass);  // unit integral
  op.correction = u;
  return op;
}

ExtensionOperator ExtensionOperator::slab(int p, int q, double d, int n) {
  ExtensionOperator op;
  const double l = std::hypot(p, q);
  const Vec2 nh{p / l, q / l};
  const double spacing = 1.0 / l;
  op.cutoff = RegionSpec{RegionSpec::Kind::kSlab, {}, 0.0, nh, 2.0 * d, spacing};
  op.correction_box = RegionSpec{RegionSpec::Kind::kSlab, {}, 0.0, nh, d, spacing};
  DensityGrid u(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double uu = (static_cast<double>(i) / n) * nh.x + (static_cast<double>(j) / n) * nh.y;
      double rel = uu - spacing * std::round(uu / spacing);
      u.at(i, j) = mollifier(rel / (0.8 * d));
    }
  const double mass = u.mean();
  u.scale(1.0 / mass);
  op.correction = u;
  return op;
}

WeightedEnsemble sample_ensemble(const InitialData& data) {
  WeightedEnsemble ens;
  const int nx = data.nx, nv = data.nv;
  const double dv = 2.0 * data.v_max / nv;
  const double cell = (1.0 / nx) * (1.0 / nx) * dv * dv;
  std::int64_t id = 0;
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nx; ++i) {
      const TorusPoint x{(i + 0.5) / nx, (j + 0.5) / nx};
      for (int b = 0; b < nv; ++b)
        for (int a = 0; a < nv; ++a) {
          const Vec2 v{-data.v_max + (a + 0.5) * dv, -data.v_max + (b + 0.5) * dv};
          const double f = data.f0(x, v);
          if (f <= 0.0) continue;
          WeightedParticle p;
          p.state = {x, v};
          p.weight = f * cell;
          p.id = id++;
          ens.particles.push_back(p);
        }
    }
  // compact ids
  for (std::size_t k = 0; k < ens.particles.size(); ++k)
    ens.particles[k].id = static_cast<std::int64_t>(k);
  return ens;
}

namespace {

// piecewise-linear-in-time field built from per-knot gradient grids
struct KnotField {
  double T = 0.0;
  std::vector<VectorGrid> grads;
  double sup = 0.0;

  Vec2 eval(double t, const TorusPoint& x) const {
    const int nk = static_cast<int>(grads.size());
    if (nk == 0) return {};
    const double s = std::clamp(t / T, 0.0, 1.0) * (nk - 1);
    const int k0 = std::min(static_cast<int>(s), nk - 2);
    const double fr = s - k0;
    const Vec2 a = grads[k0].sample(x);
    const Vec2 b = grads[k0 + 1].sample(x);
    return (1.0 - fr) * a + fr * b;
  }
};

std::shared_ptr<KnotField> make_phi_g_field(const IterationState& g) {
  auto kf = std::make_shared<KnotField>();
  kf->T = g.T;
  kf->grads.reserve(g.rho.size());
  double sup = 0.0;
  for (const auto& rho : g.rho) {
    PotentialGrid phi = solve_poisson(rho);
    VectorGrid gr = gradient(phi);
    sup = std::max(sup, gr.max_norm());
    kf->grads.push_back(std::move(gr));
  }
  kf->sup = sup;
  return kf;
}

ForceField knot_force(std::shared_ptr<KnotField> kf) {
  const double sup = kf->sup;
  return ForceField::bounded(
      [kf](double t, TorusPoint x, Vec2) { return kf->eval(t, x); }, sup, 0.0);
}

struct KnotDeposit {
  DensityGrid rho_out;
  DensityGrid rho_in;
  VectorGrid j_out;  // velocity-weighted deposit
  VectorGrid j_in;
  double mass_out = 0.0;
  double mass_in = 0.0;
};

KnotDeposit deposit_split(const WeightedEnsemble& ens, const RegionSpec& region, int n) {
  KnotDeposit kd{DensityGrid(n), DensityGrid(n), VectorGrid(n), VectorGrid(n), 0.0, 0.0};
  std::vector<WeightedPoint> pout, pin, jx_out, jy_out, jx_in, jy_in;
  pout.reserve(ens.particles.size());
  for (const auto& p : ens.particles) {
    if (!p.alive || p.weight == 0.0) continue;
    const bool inside = region.contains(p.state.x);
    (inside ? pin : pout).push_back({p.state.x, p.weight});
    (inside ? jx_in : jx_out).push_back({p.state.x, p.weight * p.state.v.x});
    (inside ? jy_in : jy_out).push_back({p.state.x, p.weight * p.state.v.y});
    (inside ? kd.mass_in : kd.mass_out) += p.weight;
  }
  kd.rho_out = deposit_density(pout, n);
  kd.rho_in = deposit_density(pin, n);
  kd.j_out.x = deposit_density(jx_out, n);
  kd.j_out.y = deposit_density(jy_out, n);
  kd.j_in.x = deposit_density(jx_in, n);
  kd.j_in.y = deposit_density(jy_in, n);
  return kd;
}

const RegionSpec& cutoff_region_for(const ReferenceControl& ref, ExtensionOperator& op,
                                    int n_grid) {
  if (ref.variant == ReferenceControl::Variant::kHyperplane) {
    op = ExtensionOperator::slab(ref.hp, ref.hq, ref.slab_d, n_grid);
  } else {
    op = ExtensionOperator::ball(ref.x0, ref.r0, n_grid);
  }
  return op.cutoff;
}

BoundaryAtlas atlas_for(const ReferenceControl& ref) {
  if (ref.variant == ReferenceControl::Variant::kHyperplane)
    return BoundaryAtlas::slab(ref.hp, ref.hq, ref.slab_d);
  return BoundaryAtlas::ball(ref.x0, ref.r0);
}

}  // namespace

IterationState apply_V(const IterationState& g, const WeightedEnsemble& f0,
                       const ReferenceControl& ref, const ForceField& F,
                       const MagneticProfile* b, const FixedPointParams& params,
                       WeightedEnsemble* ens_out) {
  const int n = params.n_grid;
  const int nk = static_cast<int>(g.rho.size());
  const double T = g.T;
  const double mass0 = f0.total_mass();

  auto kf = make_phi_g_field(g);
  ForceField phi_g = knot_force(kf);
  ForceField corr = ref.control_correction();
  ForceField extra = ForceField::sum({F, phi_g, corr});

  ExtensionOperator op;
  cutoff_region_for(ref, op, n);
  BoundaryAtlas atlas = atlas_for(ref);
  BumpProfile ups = BumpProfile::upsilon(T);
  BumpProfile upst = BumpProfile::upsilon_tilde(T);

  TransportParams tp;
  tp.dt = params.dt;
  tp.parallel = params.parallel;
  if (b) {
    tp.scheme = Scheme::kRotationSplitting;
    tp.b = b;
  }

  WeightedEnsemble ens;
  ens.particles = f0.particles;
  for (auto& p : ens.particles) p.alive = true;

  IterationState out;
  out.iter = g.iter + 1;
  out.T = T;
  out.rho.reserve(nk);
  out.mass.resize(nk, 0.0);

  for (int k = 0; k < nk; ++k) {
    const double tk = T * k / (nk - 1);
    if (k > 0) {
      const double tk0 = T * (k - 1) / (nk - 1);
      transport_absorb(ens, extra, tk0, tk, atlas, ups, tp);
    }
    KnotDeposit kd = deposit_split(ens, op.cutoff, n);
    const double ut = upst(tk);
    const double c_k = mass0 - kd.mass_out;
    DensityGrid rho_k = ref.f_bar_density(tk, n);
    rho_k.add_scaled(kd.rho_out, 1.0);
    if (ut < 1.0) rho_k.add_scaled(kd.rho_in, 1.0 - ut);
    rho_k.add_scaled(op.correction, ut * c_k);
    out.mass[k] = rho_k.mean();
    out.rho.push_back(std::move(rho_k));
  }

  // sup density gap to the previous iterate
  double gap = 0.0;
  for (int k = 0; k < nk; ++k) {
    const auto& a = out.rho[k].values();
    const auto& c = g.rho[k].values();
    for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::fabs(a[i] - c[i]));
  }
  out.gap_to_prev = gap;

  // diagnostics: discrete sup and grid-scale Holder quotient of the density
  double wsup = 0.0, holder = 0.0;
  const double root_n = std::sqrt(static_cast<double>(n));
  for (int k = 0; k < nk; k += std::max(1, nk / 8)) {
    const auto& grid = out.rho[k];
    wsup = std::max(wsup, grid.max_abs());
    for (int j = 0; j < n; j += 5)
      for (int i = 0; i < n; i += 5)
        holder = std::max(holder, std::fabs(grid.at(i + 1, j) - grid.at(i, j)) * root_n);
  }
  out.weighted_sup = wsup;
  out.holder_quotient = holder;

  if (ens_out) *ens_out = ens;
  return out;
}

namespace {

IterationState initial_iterate(const WeightedEnsemble& f0, const ReferenceControl& ref,
                               const FixedPointParams& params) {
  IterationState g0;
  g0.iter = 0;
  g0.T = ref.T;
  std::vector<WeightedPoint> pts;
  pts.reserve(f0.particles.size());
  for (const auto& p : f0.particles) pts.push_back({p.state.x, p.weight});
  DensityGrid rho_f0 = deposit_density(pts, params.n_grid);
  for (int k = 0; k < params.n_knots; ++k) {
    const double tk = ref.T * k / (params.n_knots - 1);
    DensityGrid rho = ref.f_bar_density(tk, params.n_grid);
    rho.add_scaled(rho_f0, 1.0);
    g0.rho.push_back(std::move(rho));
    g0.mass.push_back(g0.rho.back().mean());
  }
  return g0;
}

// velocity-integrated Vlasov residual of the full solution: R = d rho/dt +
// div J, supported (up to deposition smearing) where the control acts
struct GSupport {
  double leak = 0.0;   // sup |R| outside omega / sup |R|
  double cells = 0.0;  // leak distance in grid cells (0 when contained)
};

GSupport g_support_check(const std::vector<DensityGrid>& rho, const std::vector<VectorGrid>& J,
                         double T, const RegionSpec& omega) {
  const int nk = static_cast<int>(rho.size());
  const int n = rho.front().n();
  double sup_all = 0.0, sup_out = 0.0, worst_cells = 0.0;
  const double dt = T / (nk - 1);
  for (int k = 1; k + 1 < nk; ++k) {
    ScalarGrid divj = divergence(J[k]);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double r =
            (rho[k + 1].at(i, j) - rho[k - 1].at(i, j)) / (2.0 * dt) + divj.at(i, j);
        const double a = std::fabs(r);
        sup_all = std::max(sup_all, a);
        const TorusPoint p{static_cast<double>(i) / n, static_cast<double>(j) / n};
        if (!omega.contains(p)) sup_out = std::max(sup_out, a);
      }
  }
  GSupport gs;
  gs.leak = sup_all > 0.0 ? sup_out / sup_all : 0.0;
  // leak distance: how far outside omega the residual exceeds 1e-6 * sup
  if (sup_all > 0.0) {
    for (int k = 1; k + 1 < nk; k += std::max(1, nk / 6)) {
      ScalarGrid divj = divergence(J[k]);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double r =
              (rho[k + 1].at(i, j) - rho[k - 1].at(i, j)) / (2.0 * dt) + divj.at(i, j);
          if (std::fabs(r) <= 1e-6 * sup_all) continue;
          const TorusPoint p{static_cast<double>(i) / n, static_cast<double>(j) / n};
          if (omega.contains(p)) continue;
          // distance to omega in cells (disk case only needs radial gap)
          double gap = 0.0;
          if (omega.kind == RegionSpec::Kind::kDisk)
            gap = (torus_dist(p, omega.center) - omega.radius) * n;
          else
            gap = 1.0;
          worst_cells = std::max(worst_cells, gap);
        }
    }
  }
  gs.cells = worst_cells;
  return gs;
}

}  // namespace

ControlReport run_fixed_point(const WeightedEnsemble& f0, const ReferenceControl& ref,
                              const ForceField& F, const MagneticProfile* b,
                              const RegionSpec& omega, const FixedPointParams& params,
                              const std::string& csv_path) {
  ControlReport rep;
  rep.initial_mass = f0.total_mass();
  IterationState g = initial_iterate(f0, ref, params);
  const double mass0 = rep.initial_mass;

  std::ofstream csv;
  if (!csv_path.empty()) {
    csv.open(csv_path);
    csv << "iter,gap,mass,residual_outside\n";
  }

  WeightedEnsemble last_ens;
  for (int it = 0; it < params.max_iters; ++it) {
    IterationState next = apply_V(g, f0, ref, F, b, params, &last_ens);
    rep.iterations = it + 1;
    rep.final_gap = next.gap_to_prev;
    rep.gap_history.push_back(next.gap_to_prev);
    for (double m : next.mass)
      rep.mass_drift = std::max(rep.mass_drift, std::fabs(m - mass0));
    const double resid = residual_mass_outside(last_ens, omega);
    if (csv.is_open())
      csv << it + 1 << "," << next.gap_to_prev << "," << next.mass[params.n_knots / 2] << ","
          << resid << "\n";
    g = std::move(next);
    if (rep.final_gap < params.tol) {
      rep.converged = true;
      break;
    }
  }

  // relevance of the final iterate
  rep.residual_mass_outside = residual_mass_outside(last_ens, omega);
  rep.relevant = rep.residual_mass_outside <= 0.01 * std::max(mass0, 1e-300);

  // reconstructed control support via the velocity-integrated residual
  {
    const int n = params.n_grid;
    const int nk = params.n_knots;
    auto kf = make_phi_g_field(g);
    (void)kf;
    ExtensionOperator op;
    cutoff_region_for(ref, op, n);
    // rebuild rho/J histories of the final transported solution
    ForceField corr = ref.control_correction();
    ForceField phi_g = knot_force(make_phi_g_field(g));
    ForceField extra = ForceField::sum({F, phi_g, corr});
    BoundaryAtlas atlas = atlas_for(ref);
    BumpProfile ups = BumpProfile::upsilon(ref.T);
    BumpProfile upst = BumpProfile::upsilon_tilde(ref.T);
    TransportParams tp;
    tp.dt = params.dt;
    tp.parallel = params.parallel;
    if (b) {
      tp.scheme = Scheme::kRotationSplitting;
      tp.b = b;
    }
    WeightedEnsemble ens;
    ens.particles = f0.particles;
    std::vector<DensityGrid> rho_hist;
    std::vector<VectorGrid> j_hist;
    for (int k = 0; k < nk; ++k) {
      const double tk = ref.T * k / (nk - 1);
      if (k > 0) transport_absorb(ens, extra, ref.T * (k - 1) / (nk - 1), tk, atlas, ups, tp);
      KnotDeposit kd = deposit_split(ens, op.cutoff, n);
      const double ut = upst(tk);
      DensityGrid rho_k = ref.f_bar_density(tk, n);
      rho_k.add_scaled(kd.rho_out, 1.0);
      VectorGrid j_k(n);
      j_k.x.add_scaled(kd.j_out.x, 1.0);
      j_k.y.add_scaled(kd.j_out.y, 1.0);
      if (ut < 1.0) {
        rho_k.add_scaled(kd.rho_in, 1.0 - ut);
        j_k.x.add_scaled(kd.j_in.x, 1.0 - ut);
        j_k.y.add_scaled(kd.j_in.y, 1.0 - ut);
      }
      rho_k.add_scaled(op.correction, ut * (mass0 - kd.mass_out));
      rho_hist.push_back(std::move(rho_k));
      j_hist.push_back(std::move(j_k));
    }
    GSupport gs = g_support_check(rho_hist, j_hist, ref.T, omega);
    rep.g_support_leak = gs.leak;
    rep.g_support_cell = gs.cells;
  }
  return rep;
}

ControlReport run_global(const WeightedEnsemble& f0, const HyperplaneControl& hc,
                         const ForceField& F, const RegionSpec& omega,
                         const FixedPointParams& params, double eps_mass, int max_halvings) {
  ControlReport rep;
  rep.initial_mass = f0.total_mass();

  // slab-variant reference control wrapper
  ReferenceControl ref;
  ref.variant = ReferenceControl::Variant::kHyperplane;
  ref.T = hc.T;
  ref.hp = hc.p;
  ref.hq = hc.q;
  ref.slab_d = hc.d;
  ref.spacing = hc.spacing;
  ref.n_hat = hc.n_hat;
  ref.mu = hc.mu;
  ref.x0 = {0.0, 0.0};
  ref.r0 = hc.d;
  const int n = params.n_grid;
  ref.phi = std::make_shared<ScheduledGrid>();
  ref.E = std::make_shared<ScheduledVectorGrid>();
  ref.charge = std::make_shared<ScheduledGrid>();
  {
    ScheduledGrid::Piece pp;
    pp.t0 = hc.T / 3.0;
    pp.t1 = 2.0 * hc.T / 3.0;
    const double mu = hc.mu;
    const BumpProfile y = hc.y;
    pp.weight = [mu, y](double t) { return mu * y(t); };
    // resample phi_H at the working resolution
    PotentialGrid ph(n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        ph.at(i, j) = hc.phi_H.sample({static_cast<double>(i) / n, static_cast<double>(j) / n});
    pp.grid = ph;
    ref.phi->pieces.push_back(pp);
    ScheduledGrid::Piece cp = pp;
    cp.grid = laplacian(ph);
    ref.charge->pieces.push_back(cp);
    ScheduledVectorGrid::Piece ep;
    ep.t0 = pp.t0;
    ep.t1 = pp.t1;
    ep.weight = pp.weight;
    VectorGrid en(n);
    for (auto& v : en.x.values()) v = hc.n_hat.x;
    for (auto& v : en.y.values()) v = hc.n_hat.y;
    ep.grid = en;
    ref.E->pieces.push_back(ep);
  }

  double lambda = 1.0;
  for (int h = 0; h <= max_halvings; ++h, lambda *= 0.5) {
    WeightedEnsemble scaled;
    scaled.particles = f0.particles;
    for (auto& p : scaled.particles) {
      auto sp = scale_particle(p.state.x, p.state.v, p.weight, lambda);
      p.state = {sp.x, sp.v};
      p.weight = sp.w;
    }
    if (scaled.total_mass() > eps_mass) continue;
    ForceField f_l = F.scaled(lambda);
    ControlReport sub = run_fixed_point(scaled, ref, f_l, nullptr, omega, params);
    if (sub.converged && sub.relevant) {
      sub.lambda = lambda;
      sub.initial_mass = rep.initial_mass;
      sub.note = "converged at lambda = " + std::to_string(lambda);
      return sub;
    }
    rep = sub;
    rep.lambda = lambda;
  }
  rep.converged = false;
  rep.note = "no lambda in the halving budget converged with relevance";
  return rep;
}

RendezvousReport verify_rendezvous(const ReferenceControl& ref, const ForceField& F,
                                   const MagneticProfile* b, int grid, int dirs, double v_cap,
                                   double ring_speed, double eps_perturb) {
  RendezvousReport rep;
  const bool magnetic = ref.variant == ReferenceControl::Variant::kMagnetic;
  rep.window_lo = magnetic ? ref.T / 12.0 : ref.T / 24.0;
  rep.window_hi = magnetic ? 11.0 * ref.T / 12.0 : 23.0 * ref.T / 24.0;

  ForceField force = ForceField::sum({F, ref.reference_force()});
  if (eps_perturb > 0.0) {
    const double e = eps_perturb;
    force = ForceField::sum(
        {force, ForceField::bounded(
                    [e](double, TorusPoint p, Vec2) {
                      // gradient of a smooth potential, sup-norm e
                      return e * Vec2{std::sin(2.0 * M_PI * p.x1) * 0.7071,
                                      std::sin(2.0 * M_PI * p.x2) * 0.7071};
                    },
                    e, 2.0 * M_PI * e)});
  }

  std::vector<PhaseState> samples;
  for (int j = 0; j < grid; ++j)
    for (int i = 0; i < grid; ++i) {
      const TorusPoint x{(i + 0.5) / grid, (j + 0.5) / grid};
      for (int k = 0; k < dirs; ++k) {
        const double a = 2.0 * M_PI * (k + 0.3) / dirs;
        const Vec2 d{std::cos(a), std::sin(a)};
        for (double s : {0.25 * v_cap, 0.5 * v_cap, v_cap, ring_speed})
          samples.push_back({x, s * d});
      }
    }
  rep.total = samples.size();

  std::vector<std::uint8_t> hit(samples.size(), 0);
  std::vector<double> v_third(samples.size(), -1.0);
  const SurfaceSpec sphere = SurfaceSpec::sphere(ref.x0, ref.r0);
  parallel_for(static_cast<std::int64_t>(samples.size()), [&](std::int64_t k) {
    const double dt = suggest_dt(0.01, F.sup_norm() + 1.0, b ? b->b_max() : 0.0,
                                 samples[k].v.norm());
    bool got = false;
    walk_events(
        samples[k], force, b, 0.0, ref.T, dt,
        b ? Scheme::kRotationSplitting : Scheme::kRk4, {sphere},
        [&](const CrossingEvent& ev) {
          if (ev.cls == BoundaryClass::kGamma3Minus && ev.t >= rep.window_lo &&
              ev.t <= rep.window_hi) {
            got = true;
            return false;
          }
          return true;
        },
        [&](double t, const PhaseState& s) {
          if (v_third[k] < 0.0 && t >= ref.T / 3.0) v_third[k] = s.v.norm();
        });
    hit[k] = got;
  });
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (hit[k]) {
      ++rep.hit;
    } else {
      if (rep.failures.size() < 32) {
        rep.failures.push_back(samples[k]);
        rep.diagnosis.push_back(v_third[k] >= ref.M ? "fast-case miss (|V(T/3)| >= M)"
                                                    : "slow-case miss (|V(T/3)| < M)");
      }
    }
  }
  return rep;
}

double certify_rendezvous_margin(const ReferenceControl& ref, const ForceField& F,
                                 const MagneticProfile* b, double eps_max) {
  double good = 0.0;
  for (double e = eps_max; e >= 1e-4; e *= 0.5) {
    RendezvousReport r =
        verify_rendezvous(ref, F, b, 5, 12, std::max(4.0, ref.M), 2.0 * ref.m_lower, e);
    if (r.hit == r.total) {
      good = e;
      break;
    }
  }
  return good;
}

NonConcentration verify_nonconcentration(const ForceField& force, double T, int n_pairs,
                                         std::uint64_t seed, double dt) {
  NonConcentration nc;
  nc.min_ratio = 1e300;
  nc.max_ratio = 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int k = 0; k < n_pairs; ++k) {
    const TorusPoint x{uni(rng), uni(rng)};
    TorusPoint y{uni(rng), uni(rng)};
    if (torus_dist(x, y) < 1e-6) y = wrap(y.x1 + 0.25, y.x2);
    const double d0 = torus_dist(x, y);
    Trajectory tx = trace({x, {0, 0}}, force, nullptr, 0.0, T, dt, Scheme::kRk4, {}, 8);
    Trajectory ty = trace({y, {0, 0}}, force, nullptr, 0.0, T, dt, Scheme::kRk4, {}, 8);
    const std::size_t m = std::min(tx.samples.size(), ty.samples.size());
    for (std::size_t i = 0; i < m; ++i) {
      const double dtk = torus_dist(tx.samples[i].x, ty.samples[i].x);
      const double ratio = dtk / d0;
      nc.min_ratio = std::min(nc.min_ratio, ratio);
      nc.max_ratio = std::max(nc.max_ratio, ratio);
      if (ratio <= 0.0) nc.violation = true;
    }
  }
  nc.c = std::max(nc.max_ratio, nc.min_ratio > 0.0 ? 1.0 / nc.min_ratio : 1e300);
  return nc;
}

std::string ControlReport::to_json() const {
  nlohmann::json j;
  j["converged"] = converged;
  j["relevant"] = relevant;
  j["iterations"] = iterations;
  j["final_gap"] = final_gap;
  j["residual_mass_outside"] = residual_mass_outside;
  j["initial_mass"] = initial_mass;
  j["mass_drift"] = mass_drift;
  j["g_support_leak"] = g_support_leak;
  j["g_support_cell"] = g_support_cell;
  j["lambda"] = lambda;
  j["gap_history"] = gap_history;
  j["note"] = note;
  return j.dump(2);
}

}  // namespace vpctl
