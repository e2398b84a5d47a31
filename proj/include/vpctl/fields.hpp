// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vpctl/grid.hpp"
#include "vpctl/torus.hpp"
#include "vpctl/vec2.hpp"

namespace vpctl {

// Nonnegative magnetic field modulus b on a grid, bilinear interpolation.
class MagneticProfile {
 public:
  MagneticProfile() = default;
  explicit MagneticProfile(ScalarGrid grid);
  static MagneticProfile constant(double b, int n = 32);
  static MagneticProfile from_function(const std::function<double(TorusPoint)>& f, int n);

  double value(const TorusPoint& p) const { return grid_.sample(p); }
  double b_max() const { return b_max_; }
  double lipschitz() const { return lip_; }
  const ScalarGrid& grid() const { return grid_; }

 private:
  ScalarGrid grid_;
  double b_max_ = 0.0;
  double lip_ = 0.0;
};

// Time schedule of scalar grids with an analytic time weight per entry:
// phi(t, x) = sum_k w_k(t) * grid_k(x). Pieces vanish outside their window.
struct ScheduledGrid {
  struct Piece {
    double t0 = 0.0;
    double t1 = 0.0;
    std::function<double(double)> weight;  // evaluated inside [t0, t1]
    ScalarGrid grid;
    // integrator hint: max step while the piece is active (0 = none)
    double max_dt = 0.0;
  };
  std::vector<Piece> pieces;

  double eval_weighted(double t, const TorusPoint& p) const;
  ScalarGrid grid_at(double t, int n) const;
  bool active(double t) const;
  double max_dt_at(double t) const;
};

struct ScheduledVectorGrid {
  struct Piece {
    double t0 = 0.0;
    double t1 = 0.0;
    std::function<double(double)> weight;
    VectorGrid grid;
    double max_dt = 0.0;
  };
  std::vector<Piece> pieces;

  Vec2 eval(double t, const TorusPoint& p) const;
  bool active(double t) const;
  double max_dt_at(double t) const;
};

// Time-dependent force (t, x, v) -> R^2, closed under sum and the lambda
// scaling. Immutable after construction; evaluation is pure.
class ForceField {
 public:
  ForceField();  // zero field

  static ForceField bounded(std::function<Vec2(double, TorusPoint, Vec2)> f, double sup_norm,
                            double lipschitz, double t0 = 0.0,
                            double t1 = std::numeric_limits<double>::infinity());
  static ForceField magnetic(MagneticProfile b);
  static ForceField potential_schedule(std::shared_ptr<const ScheduledVectorGrid> grads);
  static ForceField accelerator(std::shared_ptr<const ScheduledVectorGrid> field);
  static ForceField sum(std::vector<ForceField> terms);

  Vec2 eval(double t, const TorusPoint& x, const Vec2& v) const;

  // F^lambda(t,x,v) = lambda^2 F(lambda t, x, v/lambda)
  ForceField scaled(double lambda) const;
  // (t,x,v) -> F(T - t, x, -v)
  ForceField reversed(double horizon) const;

  double sup_norm() const;
  double lipschitz() const;
  // integrator hint from schedules (0 = none)
  double max_dt_at(double t) const;
  bool is_zero() const;

  struct Impl;  // public for the evaluation helpers in fields.cpp

 private:
  explicit ForceField(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

// Analytic distribution sampler with the paper's scaling group:
// f^lambda(t,x,v) = |lambda|^(2-n) f(lambda t, x, v/lambda), n = 2.
struct DistributionSampler {
  std::function<double(double, TorusPoint, Vec2)> f;
  double eval(double t, const TorusPoint& x, const Vec2& v) const { return f(t, x, v); }
};

DistributionSampler scale_distribution(const DistributionSampler& f, double lambda, int n = 2);

// Particle-level scaling: (x, v, w) -> (x, lambda v, |lambda|^2 w) in n = 2.
struct ScaledParticle {
  TorusPoint x;
  Vec2 v;
  double w;
};
ScaledParticle scale_particle(const TorusPoint& x, const Vec2& v, double w, double lambda);

// lambda = -1 reduction: initial data (x,v) -> f1(x,-v) and force
// (t,x,v) -> F(T-t, x, -v).
std::pair<DistributionSampler, ForceField> reverse_data_for_lambda_minus_one(
    const DistributionSampler& f1, const ForceField& F, double T);

}  // namespace vpctl
