// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#include "vpctl/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace vpctl {

std::string to_string(BoundaryClass c) {
  switch (c) {
    case BoundaryClass::kNone:
      return "none";
    case BoundaryClass::kGammaPlus:
      return "gamma+";
    case BoundaryClass::kGammaMinus:
      return "gamma-";
    case BoundaryClass::kGamma2Minus:
      return "gamma2-";
    case BoundaryClass::kGamma3Minus:
      return "gamma3-";
  }
  return "?";
}

SurfaceSpec SurfaceSpec::sphere(const TorusPoint& c, double r) {
  SurfaceSpec s;
  s.kind = Kind::kSphere;
  s.center = c;
  s.r = r;
  return s;
}

SurfaceSpec SurfaceSpec::slab(const Vec2& n_hat, double offset, double d, double spacing) {
  SurfaceSpec s;
  s.kind = Kind::kSlab;
  s.n_hat = n_hat;
  s.offset = offset;
  s.d = d;
  s.spacing = spacing;
  return s;
}

Vec2 sphere_normal(const SurfaceSpec& surf, const TorusPoint& x) {
  Vec2 d = torus_delta(surf.center, x);
  const double n = d.norm();
  if (n < 1e-300) return {1.0, 0.0};
  return d / n;
}

BoundaryClass classify_boundary(const SurfaceSpec& surf, const TorusPoint& /*x*/, const Vec2& v,
                                const Vec2& nu) {
  const double speed = v.norm();
  const double vn = v.dot(nu);
  if (surf.kind == SurfaceSpec::Kind::kSphere) {
    if (speed >= 2.0 && vn <= -speed / 5.0) return BoundaryClass::kGamma3Minus;
    if (speed >= 1.0 && vn <= -speed / 8.0) return BoundaryClass::kGamma2Minus;
    if (speed > 0.5 && vn < -speed / 10.0) return BoundaryClass::kGammaMinus;
    if (vn >= 0.0) return BoundaryClass::kGammaPlus;
    return BoundaryClass::kNone;
  }
  if (speed >= 2.0 && vn <= -2.0) return BoundaryClass::kGamma3Minus;
  if (speed >= 1.0 && vn <= -1.5) return BoundaryClass::kGamma2Minus;
  if (vn < -1.0) return BoundaryClass::kGammaMinus;
  if (vn >= 0.0) return BoundaryClass::kGammaPlus;
  return BoundaryClass::kNone;
}

namespace {

void check_finite(const Vec2& f, double t, const PhaseState& s) {
  if (!std::isfinite(f.x) || !std::isfinite(f.y)) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "non-finite force at t=%.6g x=(%.6g,%.6g) v=(%.6g,%.6g)", t, s.x.x1, s.x.x2,
                  s.v.x, s.v.y);
    throw std::runtime_error(buf);
  }
}

}  // namespace

PhaseState step_rk4(const PhaseState& s, const ForceField& force, double t, double h,
                    Vec2* raw_disp) {
  const Vec2 x0{s.x.x1, s.x.x2};
  auto acc = [&](double tt, const Vec2& x, const Vec2& v) {
    Vec2 f = force.eval(tt, wrap(x.x, x.y), v);
    check_finite(f, tt, s);
    return f;
  };
  const Vec2 k1x = s.v;
  const Vec2 k1v = acc(t, x0, s.v);
  const Vec2 k2x = s.v + 0.5 * h * k1v;
  const Vec2 k2v = acc(t + 0.5 * h, x0 + 0.5 * h * k1x, k2x);
  const Vec2 k3x = s.v + 0.5 * h * k2v;
  const Vec2 k3v = acc(t + 0.5 * h, x0 + 0.5 * h * k2x, k3x);
  const Vec2 k4x = s.v + h * k3v;
  const Vec2 k4v = acc(t + h, x0 + h * k3x, k4x);
  const Vec2 disp = (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  PhaseState out;
  out.x = wrap(x0 + disp);
  out.v = s.v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  if (raw_disp) *raw_disp = disp;
  return out;
}

PhaseState step_rotsplit(const PhaseState& s, const ForceField& extra, const MagneticProfile& b,
                         double t, double h, Vec2* raw_disp) {
  const Vec2 x0{s.x.x1, s.x.x2};
  // half kick
  Vec2 f0 = extra.eval(t, s.x, s.v);
  check_finite(f0, t, s);
  Vec2 v = s.v + 0.5 * h * f0;
  // exact cyclotron arc, b at the drift midpoint
  const TorusPoint xm = wrap(x0 + 0.5 * h * v);
  const double beff = b.value(xm);
  const double alpha = beff * h;
  Vec2 disp;
  Vec2 v_rot;
  if (std::fabs(alpha) < 1e-12) {
    disp = h * v;
    v_rot = v;
  } else {
    const double c = std::cos(alpha), sn = std::sin(alpha);
    disp = (sn * v + (1.0 - c) * v.perp()) / beff;
    v_rot = c * v + sn * v.perp();
  }
  const TorusPoint x1 = wrap(x0 + disp);
  // half kick at the end point
  Vec2 f1 = extra.eval(t + h, x1, v_rot);
  check_finite(f1, t + h, {x1, v_rot});
  PhaseState out;
  out.x = x1;
  out.v = v_rot + 0.5 * h * f1;
  if (raw_disp) *raw_disp = disp;
  return out;
}

double suggest_dt(double dt_user, double force_sup, double b_max, double speed) {
  const double denom = b_max + force_sup + speed;
  if (denom <= 0.0) return dt_user;
  return std::min(dt_user, 0.1 / denom);
}

namespace {

struct Stepper {
  const ForceField* force = nullptr;
  const MagneticProfile* b = nullptr;
  Scheme scheme = Scheme::kRk4;

  PhaseState step(const PhaseState& s, double t, double h, Vec2* disp) const {
    if (scheme == Scheme::kRotationSplitting) return step_rotsplit(s, *force, *b, t, h, disp);
    return step_rk4(s, *force, t, h, disp);
  }
};

}  // namespace

PhaseState advance(const PhaseState& s, const ForceField& force, const MagneticProfile* b,
                   double t0, double t1, double dt, Scheme scheme) {
  if (dt <= 0.0) throw std::invalid_argument("advance: dt <= 0");
  if (scheme == Scheme::kRotationSplitting && b == nullptr)
    throw std::invalid_argument("advance: rotation splitting needs a magnetic profile");
  Stepper st{&force, b, scheme};
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  PhaseState cur = s;
  double t = t0;
  while (dir * (t1 - t) > 1e-15) {
    double h = std::min(dt, dir * (t1 - t));
    const double cap = force.max_dt_at(t);
    if (cap > 0.0) h = std::min(h, cap);
    cur = st.step(cur, t, dir * h, nullptr);
    t += dir * h;
  }
  return cur;
}

namespace {

// signed distance bookkeeping for one surface along a trajectory
struct SurfaceTracker {
  SurfaceSpec spec;
  double u_acc = 0.0;  // slab only: unwrapped normal coordinate

  double sphere_sd(const TorusPoint& x) const { return torus_dist(x, spec.center) - spec.r; }
};

// locate the crossing time within a step by bisection, re-stepping from s0
void locate_and_emit(const Stepper& st, const PhaseState& s0, double t, double h,
                     SurfaceTracker& trk, int surf_idx, double f0,
                     std::vector<CrossingEvent>& out, double u0 = 0.0, double level = 0.0) {
  double lo = 0.0, hi = 1.0;
  const bool sphere = trk.spec.kind == SurfaceSpec::Kind::kSphere;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    Vec2 disp;
    PhaseState sm = st.step(s0, t, h * mid, &disp);
    double fm;
    if (sphere) {
      fm = trk.sphere_sd(sm.x);
    } else {
      fm = (u0 + disp.dot(trk.spec.n_hat)) - level;
    }
    if ((f0 <= 0.0) == (fm <= 0.0))
      lo = mid;
    else
      hi = mid;
    if (std::fabs(h) * (hi - lo) < 1e-10) break;
  }
  const double frac = 0.5 * (lo + hi);
  Vec2 disp;
  PhaseState se = st.step(s0, t, h * frac, &disp);
  CrossingEvent ev;
  ev.t = t + h * frac;
  ev.state = se;
  ev.surface = surf_idx;
  if (sphere) {
    ev.nu = sphere_normal(trk.spec, se.x);
  } else {
    // outward normal: +n on the upper face of each slab copy, -n on the lower
    const double rel = level - trk.spec.offset;
    const double frac_sp =
        rel - trk.spec.spacing * std::round(rel / trk.spec.spacing);  // +d or -d
    ev.nu = frac_sp >= 0.0 ? trk.spec.n_hat : -trk.spec.n_hat;
  }
  const double sp = se.v.norm();
  ev.incidence = sp > 0.0 ? se.v.dot(ev.nu) / sp : 0.0;
  ev.cls = classify_boundary(trk.spec, se.x, se.v, ev.nu);
  out.push_back(ev);
}

// closest approach of the segment a + s*(disp), s in [0,1], to the ball center
double segment_min_dist(const TorusPoint& a, const Vec2& disp, const TorusPoint& c) {
  const Vec2 ac = torus_delta(a, c);  // a -> c shortest rep
  const double len2 = disp.norm2();
  if (len2 < 1e-300) return ac.norm();
  double s = ac.dot(disp) / len2;
  s = std::clamp(s, 0.0, 1.0);
  return (ac - s * disp).norm();
}

}  // namespace

WalkResult walk_events(const PhaseState& s, const ForceField& force, const MagneticProfile* b,
                       double t0, double t1, double dt, Scheme scheme,
                       const std::vector<SurfaceSpec>& surfaces,
                       const std::function<bool(const CrossingEvent&)>& on_event,
                       const std::function<void(double, const PhaseState&)>& on_step) {
  if (dt <= 0.0) throw std::invalid_argument("walk_events: dt <= 0");
  if (scheme == Scheme::kRotationSplitting && b == nullptr)
    throw std::invalid_argument("walk_events: rotation splitting needs a magnetic profile");
  Stepper st{&force, b, scheme};
  const double dir = t1 >= t0 ? 1.0 : -1.0;

  std::vector<SurfaceTracker> trk;
  trk.reserve(surfaces.size());
  for (const auto& sp : surfaces) {
    SurfaceTracker tr{sp, 0.0};
    if (sp.kind == SurfaceSpec::Kind::kSlab) tr.u_acc = Vec2{s.x.x1, s.x.x2}.dot(sp.n_hat);
    trk.push_back(tr);
  }

  PhaseState cur = s;
  double t = t0;
  std::vector<CrossingEvent> step_events;
  while (dir * (t1 - t) > 1e-15) {
    double h = std::min(dt, dir * (t1 - t));
    const double cap = force.max_dt_at(t);
    if (cap > 0.0) h = std::min(h, cap);
    // geometric cap so fast particles cannot step across a surface feature
    const double speed = cur.v.norm();
    if (!surfaces.empty() && speed > 0.0) {
      for (const auto& sp : surfaces) {
        const double feature = sp.kind == SurfaceSpec::Kind::kSphere ? sp.r : sp.d;
        h = std::min(h, std::max(feature, 1e-4) / (2.0 * speed));
      }
    }
    const double hs = dir * h;
    Vec2 disp;
    PhaseState nxt = st.step(cur, t, hs, &disp);

    step_events.clear();
    for (std::size_t si = 0; si < trk.size(); ++si) {
      auto& tr = trk[si];
      if (tr.spec.kind == SurfaceSpec::Kind::kSphere) {
        const double f0 = tr.sphere_sd(cur.x);
        const double f1 = tr.sphere_sd(nxt.x);
        if ((f0 <= 0.0) != (f1 <= 0.0)) {
          locate_and_emit(st, cur, t, hs, tr, static_cast<int>(si), f0, step_events);
        } else if (f0 > 0.0 && f1 > 0.0 &&
                   segment_min_dist(cur.x, disp, tr.spec.center) < tr.spec.r) {
          // grazing chord fully inside one step: split at closest approach
          const Vec2 ac = torus_delta(cur.x, tr.spec.center);
          double smid = std::clamp(ac.dot(disp) / std::max(disp.norm2(), 1e-300), 0.0, 1.0);
          Vec2 dmid;
          PhaseState m = st.step(cur, t, hs * smid, &dmid);
          const double fm = tr.sphere_sd(m.x);
          if (fm <= 0.0) {
            locate_and_emit(st, cur, t, hs * smid, tr, static_cast<int>(si), f0, step_events);
            SurfaceTracker tr2 = tr;
            locate_and_emit(st, m, t + hs * smid, hs * (1.0 - smid), tr2, static_cast<int>(si),
                            fm, step_events);
          }
        }
      } else {
        const double u0 = tr.u_acc;
        const double u1 = u0 + disp.dot(tr.spec.n_hat);
        const double ulo = std::min(u0, u1), uhi = std::max(u0, u1);
        // face levels offset +- d (mod spacing) strictly inside (ulo, uhi)
        for (double sgn : {-1.0, 1.0}) {
          const double base = tr.spec.offset + sgn * tr.spec.d;
          const double kmin = std::ceil((ulo - base) / tr.spec.spacing + 1e-12);
          const double kmax = std::floor((uhi - base) / tr.spec.spacing - 1e-12);
          for (double k = kmin; k <= kmax; k += 1.0) {
            const double level = base + k * tr.spec.spacing;
            locate_and_emit(st, cur, t, hs, tr, static_cast<int>(si), u0 - level, step_events,
                            u0, level);
          }
        }
        tr.u_acc = u1;
      }
    }
    if (!step_events.empty() && on_event) {
      std::sort(step_events.begin(), step_events.end(),
                [dir](const CrossingEvent& a, const CrossingEvent& b2) {
                  return dir * a.t < dir * b2.t;
                });
      for (const auto& ev : step_events)
        if (!on_event(ev)) return {nxt, t + hs, true};
    }

    cur = nxt;
    t += hs;
    if (on_step) on_step(t, cur);
  }
  return {cur, t, false};
}

Trajectory trace(const PhaseState& s, const ForceField& force, const MagneticProfile* b,
                 double t0, double t1, double dt, Scheme scheme,
                 const std::vector<SurfaceSpec>& surfaces, int sample_stride) {
  Trajectory out;
  out.dt = dt;
  out.times.push_back(t0);
  out.samples.push_back(s);
  long step_idx = 0;
  WalkResult wr = walk_events(
      s, force, b, t0, t1, dt, scheme, surfaces,
      [&out](const CrossingEvent& ev) {
        out.events.push_back(ev);
        return true;
      },
      [&](double t, const PhaseState& cur) {
        ++step_idx;
        if (step_idx % sample_stride == 0) {
          out.times.push_back(t);
          out.samples.push_back(cur);
        }
      });
  if (std::fabs(out.times.back() - wr.t) > 1e-15) {
    out.times.push_back(wr.t);
    out.samples.push_back(wr.state);
  }
  return out;
}

AngleDiagnostic angle_diagnostic(const Trajectory& traj, const MagneticProfile& b) {
  AngleDiagnostic out;
  const auto& s = traj.samples;
  if (s.size() < 3) return out;
  // unwrap theta by accumying increments between consecutive velocities
  std::vector<double> theta(s.size(), 0.0);
  std::vector<bool> ok(s.size(), true);
  for (std::size_t k = 0; k < s.size(); ++k)
    if (s[k].v.norm() < 1e-9) ok[k] = false;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (!ok[k] || !ok[k - 1]) {
      theta[k] = theta[k - 1];
      continue;
    }
    const Vec2 a = s[k - 1].v;
    const Vec2 c = s[k].v;
    // clockwise rotation counts positive: theta' = +b
    const double inc = std::atan2(-a.cross(c), a.dot(c));
    theta[k] = theta[k - 1] + inc;
  }
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    if (!ok[k] || !ok[k - 1] || !ok[k + 1]) {
      ++out.skipped;
      continue;
    }
    const double dtk = traj.times[k + 1] - traj.times[k - 1];
    if (std::fabs(dtk) < 1e-300) continue;
    const double fd = (theta[k + 1] - theta[k - 1]) / dtk;
    const double defect = std::fabs(fd - b.value(s[k].x));
    out.max_defect = std::max(out.max_defect, defect);
  }
  return out;
}

double speed_diagnostic(const Trajectory& traj, const ForceField& extra) {
  const auto& s = traj.samples;
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double sp = s[k].v.norm();
    if (sp < 1e-9) continue;
    const double dtk = traj.times[k + 1] - traj.times[k - 1];
    if (std::fabs(dtk) < 1e-300) continue;
    const double fd = (s[k + 1].v.norm() - s[k - 1].v.norm()) / dtk;
    const Vec2 f = extra.eval(traj.times[k], s[k].x, s[k].v);
    worst = std::max(worst, std::fabs(fd - f.dot(s[k].v) / sp));
  }
  return worst;
}

std::pair<double, double> compare_trajectories(const PhaseState& s, const ForceField& force_a,
                                               const MagneticProfile* b_a,
                                               const ForceField& force_b,
                                               const MagneticProfile* b_b, double t0, double t1,
                                               double dt, Scheme scheme) {
  Trajectory ta = trace(s, force_a, b_a, t0, t1, dt, scheme, {});
  Trajectory tb = trace(s, force_b, b_b, t0, t1, dt, scheme, {});
  const std::size_t n = std::min(ta.samples.size(), tb.samples.size());
  double px = 0.0, pv = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    px = std::max(px, torus_dist(ta.samples[k].x, tb.samples[k].x));
    pv = std::max(pv, (ta.samples[k].v - tb.samples[k].v).norm());
  }
  return {px, pv};
}

double verify_scaling(const PhaseState& s, const ForceField& force, double lambda, double T,
                      double dt) {
  if (lambda == 0.0) throw std::invalid_argument("verify_scaling: lambda = 0");
  Trajectory base = trace(s, force, nullptr, 0.0, T, dt, Scheme::kRk4, {});
  ForceField scaled = force.scaled(lambda);
  PhaseState s_l{s.x, lambda * s.v};
  // identical step grids under t -> t/lambda keep comparison points aligned
  Trajectory scl =
      trace(s_l, scaled, nullptr, 0.0, T / lambda, dt / std::fabs(lambda), Scheme::kRk4, {});
  const std::size_t n = std::min(base.samples.size(), scl.samples.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = torus_dist(scl.samples[k].x, base.samples[k].x);
    const double dv = (scl.samples[k].v / lambda - base.samples[k].v).norm();
    worst = std::max(worst, dx + dv);
  }
  return worst;
}

double reversal_round_trip(const PhaseState& s, const ForceField& force, double T, double dt) {
  PhaseState end = advance(s, force, nullptr, 0.0, T, dt, Scheme::kRk4);
  ForceField rev = force.reversed(T);
  PhaseState back = advance({end.x, -end.v}, rev, nullptr, 0.0, T, dt, Scheme::kRk4);
  return torus_dist(back.x, s.x) + (back.v + s.v).norm();
}

void save_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "t,x1,x2,v1,v2\n";
  char buf[160];
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const auto& st = traj.samples[k];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", traj.times[k], st.x.x1,
                  st.x.x2, st.v.x, st.v.y);
    f << buf;
  }
}

}  // namespace vpctl
