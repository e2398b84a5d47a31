// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#include "vpctl/fields.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vpctl {

MagneticProfile::MagneticProfile(ScalarGrid grid) : grid_(std::move(grid)) {
  const int n = grid_.n();
  double mx = 0.0, lip = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double v = grid_.at(i, j);
      if (v < 0.0) throw std::invalid_argument("MagneticProfile: b must be nonnegative");
      mx = std::max(mx, v);
      const double gx = (grid_.at(i + 1, j) - grid_.at(i - 1, j)) * 0.5 * n;
      const double gy = (grid_.at(i, j + 1) - grid_.at(i, j - 1)) * 0.5 * n;
      lip = std::max(lip, std::hypot(gx, gy));
    }
  b_max_ = mx;
  lip_ = lip;
}

MagneticProfile MagneticProfile::constant(double b, int n) {
  return MagneticProfile(ScalarGrid(n, b));
}

MagneticProfile MagneticProfile::from_function(const std::function<double(TorusPoint)>& f, int n) {
  ScalarGrid g(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      g.at(i, j) = f({static_cast<double>(i) / n, static_cast<double>(j) / n});
  return MagneticProfile(std::move(g));
}

double ScheduledGrid::eval_weighted(double t, const TorusPoint& p) const {
  double s = 0.0;
  for (const auto& pc : pieces)
    if (t >= pc.t0 && t <= pc.t1) s += pc.weight(t) * pc.grid.sample(p);
  return s;
}

ScalarGrid ScheduledGrid::grid_at(double t, int n) const {
  ScalarGrid out(n);
  for (const auto& pc : pieces)
    if (t >= pc.t0 && t <= pc.t1 && pc.grid.n() == n) out.add_scaled(pc.grid, pc.weight(t));
  return out;
}

bool ScheduledGrid::active(double t) const {
  for (const auto& pc : pieces)
    if (t >= pc.t0 && t <= pc.t1) return true;
  return false;
}

double ScheduledGrid::max_dt_at(double t) const {
  double dt = 0.0;
  for (const auto& pc : pieces)
    if (pc.max_dt > 0.0 && t >= pc.t0 - pc.max_dt && t <= pc.t1 + pc.max_dt)
      dt = dt == 0.0 ? pc.max_dt : std::min(dt, pc.max_dt);
  return dt;
}

Vec2 ScheduledVectorGrid::eval(double t, const TorusPoint& p) const {
  Vec2 s;
  for (const auto& pc : pieces)
    if (t >= pc.t0 && t <= pc.t1) s += pc.weight(t) * pc.grid.sample(p);
  return s;
}

bool ScheduledVectorGrid::active(double t) const {
  for (const auto& pc : pieces)
    if (t >= pc.t0 && t <= pc.t1) return true;
  return false;
}

double ScheduledVectorGrid::max_dt_at(double t) const {
  double dt = 0.0;
  for (const auto& pc : pieces)
    if (pc.max_dt > 0.0 && t >= pc.t0 - pc.max_dt && t <= pc.t1 + pc.max_dt)
      dt = dt == 0.0 ? pc.max_dt : std::min(dt, pc.max_dt);
  return dt;
}

struct ForceField::Impl {
  enum class Kind { kZero, kBounded, kMagnetic, kSchedule, kSum, kScaled, kReversed };
  Kind kind = Kind::kZero;

  // bounded
  std::function<Vec2(double, TorusPoint, Vec2)> fn;
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  double sup = 0.0, lip = 0.0;

  MagneticProfile b;
  std::shared_ptr<const ScheduledVectorGrid> sched;

  std::vector<ForceField> terms;

  std::shared_ptr<const Impl> inner;
  double lambda = 1.0;   // for kScaled
  double horizon = 0.0;  // for kReversed
};

ForceField::ForceField() : impl_(std::make_shared<Impl>()) {}
ForceField::ForceField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

ForceField ForceField::bounded(std::function<Vec2(double, TorusPoint, Vec2)> f, double sup_norm,
                               double lipschitz, double t0, double t1) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::kBounded;
  impl->fn = std::move(f);
  impl->sup = sup_norm;
  impl->lip = lipschitz;
  impl->t0 = t0;
  impl->t1 = t1;
  return ForceField(impl);
}

ForceField ForceField::magnetic(MagneticProfile b) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::kMagnetic;
  impl->b = std::move(b);
  return ForceField(impl);
}

ForceField ForceField::potential_schedule(std::shared_ptr<const ScheduledVectorGrid> grads) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::kSchedule;
  impl->sched = std::move(grads);
  return ForceField(impl);
}

ForceField ForceField::accelerator(std::shared_ptr<const ScheduledVectorGrid> field) {
  return potential_schedule(std::move(field));
}

ForceField ForceField::sum(std::vector<ForceField> terms) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::kSum;
  impl->terms = std::move(terms);
  return ForceField(impl);
}

namespace {
Vec2 eval_impl(const ForceField::Impl& im, double t, const TorusPoint& x, const Vec2& v);
}

Vec2 ForceField::eval(double t, const TorusPoint& x, const Vec2& v) const {
  return eval_impl(*impl_, t, x, v);
}

namespace {

Vec2 eval_impl(const ForceField::Impl& im, double t, const TorusPoint& x, const Vec2& v) {
  using K = ForceField::Impl::Kind;
  switch (im.kind) {
    case K::kZero:
      return {};
    case K::kBounded:
      if (t < im.t0 || t > im.t1) return {};
      return im.fn(t, x, v);
    case K::kMagnetic:
      return im.b.value(x) * v.perp();
    case K::kSchedule:
      return im.sched->eval(t, x);
    case K::kSum: {
      Vec2 s;
      for (const auto& f : im.terms) s += f.eval(t, x, v);
      return s;
    }
    case K::kScaled: {
      const double l = im.lambda;
      return l * l * eval_impl(*im.inner, l * t, x, v / l);
    }
    case K::kReversed:
      return eval_impl(*im.inner, im.horizon - t, x, -v);
  }
  return {};
}

}  // namespace

ForceField ForceField::scaled(double lambda) const {
  if (lambda == 0.0) throw std::invalid_argument("scale_field: lambda = 0");
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::kScaled;
  impl->inner = impl_;
  impl->lambda = lambda;
  return ForceField(impl);
}

ForceField ForceField::reversed(double horizon) const {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::kReversed;
  impl->inner = impl_;
  impl->horizon = horizon;
  return ForceField(impl);
}

namespace {

double sup_impl(const ForceField::Impl& im);
double lip_impl(const ForceField::Impl& im);

double sup_impl(const ForceField::Impl& im) {
  using K = ForceField::Impl::Kind;
  switch (im.kind) {
    case K::kZero:
      return 0.0;
    case K::kBounded:
      return im.sup;
    case K::kMagnetic:
      return std::numeric_limits<double>::infinity();  // grows with |v|
    case K::kSchedule: {
      double s = 0.0;
      for (const auto& pc : im.sched->pieces) {
        double wmax = 0.0;
        for (int k = 0; k <= 64; ++k) {
          const double t = pc.t0 + (pc.t1 - pc.t0) * k / 64.0;
          wmax = std::max(wmax, std::fabs(pc.weight(t)));
        }
        s += wmax * pc.grid.max_norm();
      }
      return s;
    }
    case K::kSum: {
      double s = 0.0;
      for (const auto& f : im.terms) s += f.sup_norm();
      return s;
    }
    case K::kScaled:
      return im.lambda * im.lambda * sup_impl(*im.inner);
    case K::kReversed:
      return sup_impl(*im.inner);
  }
  return 0.0;
}

double lip_impl(const ForceField::Impl& im) {
  using K = ForceField::Impl::Kind;
  switch (im.kind) {
    case K::kZero:
      return 0.0;
    case K::kBounded:
      return im.lip;
    case K::kMagnetic:
      return im.b.b_max() + im.b.lipschitz();  // d/dv and d/dx parts, |v|<=1 scale
    case K::kSchedule:
      return 0.0;  // grid fields: callers use sup-based step control
    case K::kSum: {
      double s = 0.0;
      for (const auto& f : im.terms) s += f.lipschitz();
      return s;
    }
    case K::kScaled:
      return std::fabs(im.lambda) * lip_impl(*im.inner);
    case K::kReversed:
      return lip_impl(*im.inner);
  }
  return 0.0;
}

double max_dt_impl(const ForceField::Impl& im, double t) {
  using K = ForceField::Impl::Kind;
  switch (im.kind) {
    case K::kSchedule:
      return im.sched->max_dt_at(t);
    case K::kSum: {
      double dt = 0.0;
      for (const auto& f : im.terms) {
        const double d = f.max_dt_at(t);
        if (d > 0.0) dt = dt == 0.0 ? d : std::min(dt, d);
      }
      return dt;
    }
    case K::kScaled: {
      const double d = max_dt_impl(*im.inner, im.lambda * t);
      return d > 0.0 ? d / std::fabs(im.lambda) : 0.0;
    }
    case K::kReversed:
      return max_dt_impl(*im.inner, im.horizon - t);
    default:
      return 0.0;
  }
}

bool zero_impl(const ForceField::Impl& im) {
  using K = ForceField::Impl::Kind;
  if (im.kind == K::kZero) return true;
  if (im.kind == K::kSum) {
    for (const auto& f : im.terms)
      if (!f.is_zero()) return false;
    return true;
  }
  if (im.kind == K::kScaled || im.kind == K::kReversed) return zero_impl(*im.inner);
  return false;
}

}  // namespace

double ForceField::sup_norm() const { return sup_impl(*impl_); }
double ForceField::lipschitz() const { return lip_impl(*impl_); }
double ForceField::max_dt_at(double t) const { return max_dt_impl(*impl_, t); }
bool ForceField::is_zero() const { return zero_impl(*impl_); }

DistributionSampler scale_distribution(const DistributionSampler& f, double lambda, int n) {
  if (lambda == 0.0) throw std::invalid_argument("scale_distribution: lambda = 0");
  const double amp = std::pow(std::fabs(lambda), 2.0 - n);
  auto inner = f.f;
  return DistributionSampler{[inner, lambda, amp](double t, TorusPoint x, Vec2 v) {
    return amp * inner(lambda * t, x, v / lambda);
  }};
}

ScaledParticle scale_particle(const TorusPoint& x, const Vec2& v, double w, double lambda) {
  if (lambda == 0.0) throw std::invalid_argument("scale_particle: lambda = 0");
  return {x, lambda * v, w * lambda * lambda};
}

std::pair<DistributionSampler, ForceField> reverse_data_for_lambda_minus_one(
    const DistributionSampler& f1, const ForceField& F, double T) {
  auto inner = f1.f;
  DistributionSampler init{[inner](double, TorusPoint x, Vec2 v) { return inner(0.0, x, -v); }};
  return {init, F.reversed(T)};
}

}  // namespace vpctl
