// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#include "vpctl/control.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "vpctl/parallel.hpp"
#include "vpctl/spectral.hpp"

namespace vpctl {

namespace {

ScheduledGrid::Piece shift_piece(ScheduledGrid::Piece p, double dt) {
  auto w = p.weight;
  p.weight = [w, dt](double t) { return w(t - dt); };
  p.t0 += dt;
  p.t1 += dt;
  return p;
}

ScheduledVectorGrid::Piece shift_piece(ScheduledVectorGrid::Piece p, double dt) {
  auto w = p.weight;
  p.weight = [w, dt](double t) { return w(t - dt); };
  p.t0 += dt;
  p.t1 += dt;
  return p;
}

ForceField time_shifted(const ForceField& f, double offset, double sup, double lip) {
  return ForceField::bounded(
      [f, offset](double t, TorusPoint x, Vec2 v) { return f.eval(t + offset, x, v); }, sup, lip);
}

struct VisitCheck {
  bool visited = false;
  double t = 0.0;
  double speed = 0.0;
};

// Does the trajectory visit B(center, r) during (w0, w1) under `force`
// (+ optional magnetic b)? Uses crossing events on the sphere.
VisitCheck visits_ball(const PhaseState& s, const ForceField& force, const MagneticProfile* b,
                       double t0, double w0, double w1, const TorusPoint& center, double r,
                       double dt, Scheme scheme) {
  VisitCheck out;
  PhaseState at_w0 = s;
  if (w0 > t0) at_w0 = advance(s, force, b, t0, w0, dt, scheme);
  if (torus_dist(at_w0.x, center) <= r) {
    out.visited = true;
    out.t = w0;
    out.speed = at_w0.v.norm();
    return out;
  }
  Trajectory tr = trace(at_w0, force, b, w0, w1, dt, scheme,
                        {SurfaceSpec::sphere(center, r)}, 1 << 30);
  for (const auto& ev : tr.events) {
    if (ev.incidence < 0.0) {
      out.visited = true;
      out.t = ev.t;
      out.speed = ev.state.v.norm();
      return out;
    }
  }
  return out;
}

std::vector<Vec2> direction_ring(int k) {
  std::vector<Vec2> dirs;
  dirs.reserve(k);
  for (int i = 0; i < k; ++i) {
    const double a = 2.0 * M_PI * (i + 0.25) / k;
    dirs.push_back({std::cos(a), std::sin(a)});
  }
  return dirs;
}

std::vector<TorusPoint> position_grid(int g) {
  std::vector<TorusPoint> pts;
  pts.reserve(static_cast<std::size_t>(g) * g);
  for (int j = 0; j < g; ++j)
    for (int i = 0; i < g; ++i) pts.push_back({(i + 0.5) / g, (j + 0.5) / g});
  return pts;
}

}  // namespace

AcceleratorResult build_accelerator(const SweepField& sweep, double tau, double M,
                                    const ForceField& H, const MagneticProfile* b_mag) {
  if (tau <= 0.0 || M < 0.0) throw std::invalid_argument("build_accelerator: bad tau or M");
  if (sweep.min_norm < 0.5 * kSweepMinNorm)
    throw std::invalid_argument("build_accelerator: sweep not certified");
  AcceleratorResult res;
  res.tau = tau;
  const double h_sup = H.sup_norm();
  const double f_extra = b_mag ? 1.0 : 0.0;  // magnetic variant is certified
                                             // against any |F_extra| <= 1
  const double C = (2.0 * M + 3.0 + tau * (h_sup + f_extra)) / sweep.min_norm;
  res.C = C;

  const BumpProfile lam = BumpProfile::lambda_window();
  const auto positions = position_grid(16);
  const auto dirs = direction_ring(16);
  std::vector<double> speeds;
  if (M == 0.0) {
    speeds = {0.0};
  } else {
    speeds = {0.0, 0.25 * M, 0.5 * M, 0.75 * M, M};
  }

  // initial guess keeps the kick impulsive: particles at speed ~C must not
  // cross a grid cell during the window
  double tau_p = std::min(tau / 2.0, 0.02 / (C * (1.0 + (b_mag ? b_mag->b_max() : 0.0))));
  for (int halving = 0; halving < 10; ++halving, tau_p *= 0.5) {
    ScheduledVectorGrid::Piece fp;
    fp.t0 = 0.0;
    fp.t1 = tau_p;
    fp.grid = sweep.W;
    fp.max_dt = tau_p / 64.0;
    const double tp = tau_p;
    fp.weight = [C, tp, lam](double t) { return C / tp * lam(t / tp); };
    auto sched = std::make_shared<ScheduledVectorGrid>();
    sched->pieces.push_back(fp);
    ForceField kick = ForceField::potential_schedule(sched);
    ForceField total = ForceField::sum({kick, H});

    const double t_end = tau_p * 1.05;
    const double slack_v = (tau - t_end) * (h_sup + f_extra) + t_end * f_extra;
    double worst_lo = 1e300, best_hi = 0.0;
    bool ok = true;
    std::vector<double> lo_arr(positions.size() * (1 + (speeds.size() - 1) * dirs.size()));
    std::vector<double> hi_arr(lo_arr.size());
    // enumerate samples
    std::vector<PhaseState> samples;
    for (const auto& p : positions) {
      samples.push_back({p, {0.0, 0.0}});
      for (std::size_t si = 1; si < speeds.size(); ++si)
        for (const auto& d : dirs) samples.push_back({p, speeds[si] * d});
    }
    std::vector<double> finals(samples.size());
    parallel_for(static_cast<std::int64_t>(samples.size()), [&](std::int64_t k) {
      PhaseState end;
      if (b_mag) {
        end = advance(samples[k], total, b_mag, 0.0, t_end, tau_p / 64.0,
                      Scheme::kRotationSplitting);
      } else {
        end = advance(samples[k], total, nullptr, 0.0, t_end, tau_p / 64.0, Scheme::kRk4);
      }
      finals[k] = end.v.norm();
    });
    for (double f : finals) {
      const double lo = f - slack_v;
      const double hi = f + slack_v;
      worst_lo = std::min(worst_lo, lo);
      best_hi = std::max(best_hi, hi);
      if (lo <= M + 1.0) ok = false;
    }
    if (ok) {
      res.ok = true;
      res.tau_prime = tau_p;
      res.M_tilde = 1.05 * best_hi;
      res.field = fp;
      ScheduledGrid::Piece php;
      php.t0 = 0.0;
      php.t1 = tau_p;
      php.grid = sweep.theta;
      php.weight = fp.weight;
      php.max_dt = fp.max_dt;
      res.phi = php;
      ScheduledGrid::Piece chp = php;
      chp.grid = sweep.charge;
      res.charge = chp;
      return res;
    }
    res.failure = "worst sample lower bound " + std::to_string(worst_lo) +
                  " <= M+1 at tau'=" + std::to_string(tau_p);
  }
  res.ok = false;
  if (res.failure.empty()) res.failure = "tau' underflow";
  return res;
}

ScheduledGrid::Piece compress_pulse(const ScheduledGrid::Piece& base, double tau,
                                    double tau_prime) {
  if (tau_prime <= 0.0 || tau_prime > tau) throw std::invalid_argument("compress_pulse");
  ScheduledGrid::Piece out;
  const double shift = 0.5 * (tau - tau_prime);
  out.t0 = shift + base.t0 * tau_prime;
  out.t1 = shift + base.t1 * tau_prime;
  out.grid = base.grid;
  out.max_dt = base.max_dt > 0.0 ? base.max_dt * tau_prime : 0.0;
  auto w = base.weight;
  const double tp = tau_prime;
  out.weight = [w, shift, tp](double t) { return w((t - shift) / tp) / (tp * tp); };
  return out;
}

namespace {

struct PulseFields {
  std::shared_ptr<ScheduledGrid> phi;
  std::shared_ptr<ScheduledVectorGrid> grad;
  ScheduledGrid::Piece phi_piece;
  ScheduledGrid::Piece charge_piece;
  ScheduledVectorGrid::Piece grad_piece;
};

PulseFields make_drift_pulse(const SweepField& sweep, double tau, double tau_p, double a_eff) {
  const BumpProfile win = BumpProfile::window(0.04, 0.96, 0.18);
  const double shift = 0.5 * (tau - tau_p);
  PulseFields pf;
  ScheduledGrid::Piece php;
  php.t0 = shift;
  php.t1 = shift + tau_p;
  php.grid = sweep.theta;
  php.weight = [win, a_eff, shift, tau_p](double t) { return a_eff * win((t - shift) / tau_p); };
  pf.phi_piece = php;
  pf.charge_piece = php;
  pf.charge_piece.grid = sweep.charge;
  ScheduledVectorGrid::Piece gp;
  gp.t0 = php.t0;
  gp.t1 = php.t1;
  gp.weight = php.weight;
  gp.grid = gradient(sweep.theta);
  pf.grad_piece = gp;
  pf.phi = std::make_shared<ScheduledGrid>();
  pf.phi->pieces.push_back(php);
  pf.grad = std::make_shared<ScheduledVectorGrid>();
  pf.grad->pieces.push_back(gp);
  return pf;
}

// LV3-style sampled certification at speeds {m, 2m}
bool certify_pulse_at(const SweepField& sweep, double tau, const ForceField& H,
                      const ForceField& pulse_force, double m, int g, int ndirs,
                      std::string* worst) {
  const auto positions = position_grid(g);
  const auto dirs = direction_ring(ndirs);
  const double w0 = tau / 3.0, w1 = 2.0 * tau / 3.0;
  std::vector<PhaseState> samples;
  for (const auto& p : positions)
    for (const auto& d : dirs)
      for (double sp : {m, 2.0 * m}) samples.push_back({p, sp * d});
  ForceField total = ForceField::sum({pulse_force, H});
  std::vector<std::uint8_t> ok(samples.size(), 0);
  parallel_for(static_cast<std::int64_t>(samples.size()), [&](std::int64_t k) {
    const double sp = samples[k].v.norm();
    const double dt = suggest_dt(0.05, total.sup_norm(), 0.0, sp);
    VisitCheck vc = visits_ball(samples[k], total, nullptr, 0.0, w0, w1, sweep.x0,
                                sweep.r0 / 4.0 * 0.98, dt, Scheme::kRk4);
    // speed floor |V| >= m/2, with margin, at the sample's own speed tier
    ok[k] = vc.visited && vc.speed >= 0.51 * sp;
  });
  for (std::size_t k = 0; k < samples.size(); ++k)
    if (!ok[k]) {
      if (worst) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "missed: x=(%.3f,%.3f) v=(%.3f,%.3f)", samples[k].x.x1,
                      samples[k].x.x2, samples[k].v.x, samples[k].v.y);
        *worst = buf;
      }
      return false;
    }
  return true;
}

}  // namespace

PulseResult build_high_velocity_pulse(const SweepField& sweep, double tau, const ForceField& H,
                                      double m_restart) {
  PulseResult out;
  out.tau = tau;
  const double h_sup = H.sup_norm();
  const double tau_p = 0.6 * tau;
  const BumpProfile win = BumpProfile::window(0.04, 0.96, 0.18);
  double win_int = win.integral();  // on (0,1)

  for (double a_eff = 24.0 * (1.0 + h_sup); a_eff <= 24.0 * 8.0 * (1.0 + h_sup); a_eff *= 2.0) {
    PulseFields pf = make_drift_pulse(sweep, tau, tau_p, a_eff);
    ForceField pulse_force = ForceField::potential_schedule(pf.grad);
    std::string worst;
    for (double m = std::max(1.0, m_restart); m <= 65536.0; m *= 2.0) {
      if (!certify_pulse_at(sweep, tau, H, pulse_force, m, 4, 24, &worst)) continue;
      // full-resolution certification
      if (!certify_pulse_at(sweep, tau, H, pulse_force, m, 8, 64, &worst)) continue;
      out.ok = true;
      out.m_lower = m;
      out.amplitude = a_eff;
      out.tau_prime = tau_p;
      out.phi = pf.phi_piece;
      out.charge = pf.charge_piece;
      out.grad = pf.grad_piece;
      double max_grad = 0.0;
      {
        VectorGrid g = gradient(sweep.theta);
        max_grad = g.max_norm();
      }
      out.sup_phi = a_eff * sweep.theta.max_abs();
      out.grad_integral = a_eff * max_grad * win_int * tau_p;
      return out;
    }
    out.failure = "m search exhausted at amplitude " + std::to_string(a_eff) + " (" + worst + ")";
  }
  out.ok = false;
  return out;
}

ForceField ReferenceControl::reference_force() const {
  return ForceField::potential_schedule(E);
}

ForceField ReferenceControl::control_correction() const {
  auto diff = std::make_shared<ScheduledVectorGrid>();
  // E-bar pieces minus grad(phi-bar) pieces with matched weights
  for (std::size_t k = 0; k < E->pieces.size(); ++k) {
    const auto& ep = E->pieces[k];
    const auto& pp = phi->pieces[k];
    ScheduledVectorGrid::Piece d = ep;
    VectorGrid g = gradient(pp.grid);
    for (std::size_t i = 0; i < g.x.values().size(); ++i) {
      d.grid.x.values()[i] = ep.grid.x.values()[i] - g.x.values()[i];
      d.grid.y.values()[i] = ep.grid.y.values()[i] - g.y.values()[i];
    }
    diff->pieces.push_back(d);
  }
  return ForceField::potential_schedule(diff);
}

double ReferenceControl::f_bar(double t, const TorusPoint& x, const Vec2& v) const {
  return z(v.norm()) * charge->eval_weighted(t, x);
}

ScalarGrid ReferenceControl::f_bar_density(double t, int n) const {
  return charge->grid_at(t, n);
}

namespace {

// smallest doubling constant making the near-ball exit argument pass: states
// on B(x0, r0/4) with speed alpha(C) must cross gamma3- within T/100
double search_c_r0(const SweepField& sweep, const ForceField& F, const ForceField& pulse_forces,
                   double T, double base_sups, double r0) {
  const auto dirs = direction_ring(24);
  ForceField total = ForceField::sum({F, pulse_forces});
  for (double C = 1.0; C <= 4096.0; C *= 2.0) {
    const double alpha = std::max(600.0 * r0 / T, C * base_sups);
    bool all_ok = true;
    std::vector<PhaseState> samples;
    for (int k = 0; k < 12; ++k) {
      const double a = 2.0 * M_PI * k / 12.0;
      const TorusPoint y = wrap(sweep.x0.x1 + 0.2 * r0 * std::cos(a),
                                sweep.x0.x2 + 0.2 * r0 * std::sin(a));
      for (const auto& d : dirs) samples.push_back({y, alpha * d});
    }
    std::vector<std::uint8_t> ok(samples.size(), 0);
    // visit moments: midpoints of the two pulse windows
    const double tv[2] = {T / 6.0, 5.0 * T / 6.0};
    parallel_for(static_cast<std::int64_t>(samples.size()), [&](std::int64_t k) {
      for (double t0 : tv) {
        const double dt = suggest_dt(0.01, total.sup_norm(), 0.0, alpha);
        Trajectory tr = trace(samples[k], total, nullptr, t0, t0 + T / 100.0, dt, Scheme::kRk4,
                              {SurfaceSpec::sphere(sweep.x0, r0)}, 1 << 30);
        bool hit = false;
        for (const auto& ev : tr.events)
          if (ev.cls == BoundaryClass::kGamma3Minus || ev.cls == BoundaryClass::kGammaPlus)
            hit = true;  // exits outward or is absorbed on the way in
        if (!hit) return;
      }
      ok[k] = 1;
    });
    for (auto o : ok)
      if (!o) {
        all_ok = false;
        break;
      }
    if (all_ok) return C;
  }
  return 4096.0;
}

}  // namespace

ReferenceControl compose_reference_bounded(double T, const ForceField& F, const TorusPoint& x0,
                                           double r0, int n_grid) {
  ReferenceControl rc;
  rc.variant = ReferenceControl::Variant::kBounded;
  rc.x0 = x0;
  rc.r0 = r0;
  rc.T = T;
  rc.sweep = build_sweep(x0, r0, n_grid);
  const double tau = T / 3.0;
  const double f_sup = F.sup_norm();
  const double f_lip = F.lipschitz();

  PulseResult p1 = build_high_velocity_pulse(rc.sweep, tau, F);
  if (!p1.ok) throw std::runtime_error("compose_reference_bounded: pulse 1: " + p1.failure);
  ForceField h3 = time_shifted(F, 2.0 * T / 3.0, f_sup, f_lip);
  PulseResult p3 = build_high_velocity_pulse(rc.sweep, tau, h3, p1.m_lower);
  if (!p3.ok) throw std::runtime_error("compose_reference_bounded: pulse 3: " + p3.failure);

  // alpha and M (two-pass; gradient term uses the time-integrated sup)
  auto pulse_sched = std::make_shared<ScheduledVectorGrid>();
  pulse_sched->pieces.push_back(shift_piece(p1.grad, 0.0));
  pulse_sched->pieces.push_back(shift_piece(p3.grad, 2.0 * T / 3.0));
  ForceField pulse_forces = ForceField::potential_schedule(pulse_sched);
  const double base_sups = 1.0 + f_sup + p1.sup_phi + p3.sup_phi;
  rc.C_r0 = search_c_r0(rc.sweep, F, pulse_forces, T, base_sups, r0);
  rc.alpha = std::max(600.0 * r0 / T, rc.C_r0 * base_sups);
  const double M1 =
      std::max(p1.m_lower, 2.0 * rc.alpha) + p1.grad_integral + tau * f_sup;
  const double M2 = std::max(p3.m_lower, 2.0 * rc.alpha);
  rc.M = std::max(M1, M2);

  ForceField h2 = time_shifted(F, T / 3.0, f_sup, f_lip);
  AcceleratorResult acc = build_accelerator(rc.sweep, tau, rc.M, h2, nullptr);
  if (!acc.ok) throw std::runtime_error("compose_reference_bounded: accelerator: " + acc.failure);
  rc.M_tilde = acc.M_tilde;
  rc.C_kick = acc.C;
  rc.tau_prime = acc.tau_prime;
  rc.m_lower = std::max(p1.m_lower, p3.m_lower);

  rc.phi = std::make_shared<ScheduledGrid>();
  rc.E = std::make_shared<ScheduledVectorGrid>();
  rc.charge = std::make_shared<ScheduledGrid>();
  rc.phi->pieces = {shift_piece(p1.phi, 0.0), shift_piece(acc.phi, T / 3.0),
                    shift_piece(p3.phi, 2.0 * T / 3.0)};
  rc.E->pieces = {shift_piece(p1.grad, 0.0), shift_piece(acc.field, T / 3.0),
                  shift_piece(p3.grad, 2.0 * T / 3.0)};
  rc.charge->pieces = {shift_piece(p1.charge, 0.0), shift_piece(acc.charge, T / 3.0),
                       shift_piece(p3.charge, 2.0 * T / 3.0)};
  return rc;
}

MagneticGvResult certify_magnetic_gv(const MagneticProfile& b, const TorusPoint& x0, double r0,
                                     double T, double m_restart) {
  MagneticGvResult res;
  // probe fields with sup <= 1
  std::vector<ForceField> probes;
  probes.push_back(ForceField());
  probes.push_back(ForceField::bounded(
      [](double, TorusPoint, Vec2) { return Vec2{1.0, 0.0}; }, 1.0, 0.0));
  probes.push_back(ForceField::bounded(
      [](double, TorusPoint, Vec2) { return Vec2{0.0, -1.0}; }, 1.0, 0.0));
  probes.push_back(ForceField::bounded(
      [](double t, TorusPoint p, Vec2) {
        return Vec2{std::sin(2.0 * M_PI * p.x2 + t), std::cos(2.0 * M_PI * p.x1)};
      },
      1.0, 2.0 * M_PI));

  const double m0 = std::max({1.0, m_restart, 2.0 * (T + 1.0)});
  for (double m = m0; m <= 65536.0; m *= 2.0) {
    bool pass = true;
    std::string fail;
    for (int coarse = 1; coarse >= 0 && pass; --coarse) {
      const int g = coarse ? 4 : 6;
      const int nd = coarse ? 16 : 24;
      const auto positions = position_grid(g);
      const auto dirs = direction_ring(nd);
      std::vector<PhaseState> samples;
      for (const auto& p : positions)
        for (const auto& d : dirs)
          for (double sp : {m, 2.0 * m}) samples.push_back({p, sp * d});
      for (const auto& probe : probes) {
        std::vector<std::uint8_t> ok(samples.size(), 0);
        parallel_for(static_cast<std::int64_t>(samples.size()), [&](std::int64_t k) {
          const double sp = samples[k].v.norm();
          const double dt = suggest_dt(0.02, 1.0, b.b_max(), sp);
          // sandwich check along the way
          Trajectory tr = trace(samples[k], probe, &b, 0.0, T, dt, Scheme::kRotationSplitting,
                                {SurfaceSpec::sphere(x0, r0 / 2.0 * 0.98)},
                                std::max<int>(1, static_cast<int>(0.05 / dt)));
          for (const auto& st : tr.samples) {
            const double s2 = st.v.norm();
            if (s2 < 0.5 * sp || s2 > 2.0 * sp) return;
          }
          bool visited = torus_dist(tr.samples.front().x, x0) <= r0 / 2.0 * 0.98;
          for (const auto& ev : tr.events)
            if (ev.incidence < 0.0 && ev.t > T / 4.0 && ev.t < 3.0 * T / 4.0) visited = true;
          ok[k] = visited;
        });
        for (std::size_t k = 0; k < ok.size(); ++k)
          if (!ok[k]) {
            pass = false;
            char buf[160];
            std::snprintf(buf, sizeof buf, "m=%.0f x=(%.2f,%.2f) v=(%.2f,%.2f)", m,
                          samples[k].x.x1, samples[k].x.x2, samples[k].v.x, samples[k].v.y);
            fail = buf;
            break;
          }
        if (!pass) break;
      }
    }
    if (pass) {
      res.ok = true;
      res.m_lower = m;
      return res;
    }
    res.failure = fail;
  }
  res.ok = false;
  return res;
}

ReferenceControl compose_reference_magnetic(double T, const MagneticProfile& b,
                                            const TorusPoint& x0, double r0,
                                            const GccCertificate& gcc, int n_grid) {
  if (!gcc.pass)
    throw std::runtime_error("compose_reference_magnetic: GCC certificate did not pass: " +
                             gcc.reason);
  ReferenceControl rc;
  rc.variant = ReferenceControl::Variant::kMagnetic;
  rc.x0 = x0;
  rc.r0 = r0;
  rc.T = T;
  rc.sweep = build_sweep(x0, r0, n_grid);
  // magnetic variant: E = -grad phi in the paper; store theta with flipped
  // sign so E-bar = grad phi-bar holds in both variants
  rc.sweep.theta.scale(-1.0);
  rc.sweep.charge.scale(-1.0);

  MagneticGvResult gv = certify_magnetic_gv(b, x0, r0, T);
  if (!gv.ok) throw std::runtime_error("compose_reference_magnetic: high-velocity: " + gv.failure);
  rc.m_lower = gv.m_lower;
  rc.M = std::max({gv.m_lower + T / 3.0, 100.0, 800.0 * r0 / T, 32.0 * r0 * (b.b_max() + 1.0)});

  AcceleratorResult acc = build_accelerator(rc.sweep, T / 3.0, rc.M, ForceField(), &b);
  if (!acc.ok) throw std::runtime_error("compose_reference_magnetic: accelerator: " + acc.failure);
  rc.M_tilde = acc.M_tilde;
  rc.C_kick = acc.C;
  rc.tau_prime = acc.tau_prime;

  rc.phi = std::make_shared<ScheduledGrid>();
  rc.E = std::make_shared<ScheduledVectorGrid>();
  rc.charge = std::make_shared<ScheduledGrid>();
  rc.phi->pieces = {shift_piece(acc.phi, T / 3.0)};
  rc.E->pieces = {shift_piece(acc.field, T / 3.0)};
  rc.charge->pieces = {shift_piece(acc.charge, T / 3.0)};
  return rc;
}

ForceField HyperplaneControl::reference_force() const {
  const double m = mu;
  const Vec2 n = n_hat;
  const BumpProfile yw = y;
  double ymax = 0.0;
  for (int k = 0; k <= 256; ++k) ymax = std::max(ymax, yw(T * k / 256.0));
  return ForceField::bounded(
      [m, n, yw](double t, TorusPoint, Vec2) { return m * yw(t) * n; }, m * ymax, 0.0);
}

SurfaceSpec HyperplaneControl::slab_surface() const {
  return SurfaceSpec::slab(n_hat, 0.0, d, spacing);
}

HyperplaneControl build_hyperplane_control(int p, int q, double d, double T, const ForceField& F,
                                           int n_grid) {
  if (p == 0 && q == 0)
    throw std::invalid_argument("build_hyperplane_control: irrational or zero normal rejected");
  HyperplaneControl hc;
  hc.p = p;
  hc.q = q;
  const double l = std::hypot(p, q);
  hc.n_hat = {p / l, q / l};
  hc.spacing = 1.0 / l;
  hc.d = d;
  hc.T = T;
  if (4.0 * d >= hc.spacing)
    throw std::invalid_argument("build_hyperplane_control: 4d exceeds hyperplane spacing");
  SweepField slab = build_sweep_slab(p, q, d, n_grid);
  hc.phi_H = slab.theta;
  hc.y = BumpProfile::y_window(T);

  // mu doubling per the two-bullet drift argument, certified on samples
  const auto positions = position_grid(6);
  const auto dirs = direction_ring(16);
  const double f_sup = F.sup_norm();
  for (double mu = 1.0; mu <= 4096.0; mu *= 2.0) {
    hc.mu = mu;
    ForceField ref = hc.reference_force();
    ForceField total = ForceField::sum({ref, F});
    const double speed_cap = 4.0 + mu + T * f_sup;
    std::vector<PhaseState> samples;
    for (const auto& pt : positions)
      for (const auto& dir : dirs)
        for (double sp : {0.5, 1.5, 3.0, 0.5 * speed_cap, speed_cap})
          samples.push_back({pt, sp * dir});
    std::vector<std::uint8_t> ok(samples.size(), 0);
    SurfaceSpec surf = hc.slab_surface();
    parallel_for(static_cast<std::int64_t>(samples.size()), [&](std::int64_t k) {
      const double dt = suggest_dt(0.02, mu * 3.0 / T + f_sup, 0.0, samples[k].v.norm());
      Trajectory tr =
          trace(samples[k], total, nullptr, 0.0, T, dt, Scheme::kRk4, {surf}, 1 << 30);
      for (const auto& ev : tr.events)
        if (ev.cls == BoundaryClass::kGamma3Minus && ev.t >= T / 6.0 && ev.t <= 5.0 * T / 6.0) {
          ok[k] = 1;
          return;
        }
    });
    bool pass = true;
    for (auto o : ok)
      if (!o) {
        pass = false;
        break;
      }
    if (pass) return hc;
  }
  throw std::runtime_error("build_hyperplane_control: mu search exhausted");
}

void ReferenceControl::save(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json j;
  j["variant"] = variant == Variant::kBounded    ? "bounded"
                 : variant == Variant::kMagnetic ? "magnetic"
                                                 : "hyperplane";
  j["x0"] = {x0.x1, x0.x2};
  j["r0"] = r0;
  j["T"] = T;
  j["m_lower"] = m_lower;
  j["M"] = M;
  j["M_tilde"] = M_tilde;
  j["alpha"] = alpha;
  j["C_r0"] = C_r0;
  j["C_kick"] = C_kick;
  j["tau_prime"] = tau_prime;
  j["eps_margin"] = eps_margin;
  j["sweep_min_norm"] = sweep.min_norm;
  j["sweep_candidate"] = sweep.candidate;
  // knot-sampled schedule manifests
  const int knots = 49;
  std::vector<double> ts;
  for (int k = 0; k <= knots; ++k) ts.push_back(T * k / knots);
  j["knots"] = ts;
  for (int k = 0; k <= knots; ++k) {
    const double t = ts[k];
    ScalarGrid pg = phi->grid_at(t, sweep.n);
    char name[64];
    std::snprintf(name, sizeof name, "phi_%03d.grid", k);
    pg.save_binary(dir + "/" + name);
  }
  std::ofstream f(dir + "/manifest.json");
  f << j.dump(2);
}

}  // namespace vpctl
