// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "vpctl/torus.hpp"
#include "vpctl/vec2.hpp"

namespace vpctl {

// N x N periodic scalar grid, node (i,j) at position (i/N, j/N), row-major
// with x1 fastest: values[j*N + i].
class ScalarGrid {
 public:
  ScalarGrid() = default;
  explicit ScalarGrid(int n, double fill = 0.0);

  int n() const { return n_; }
  double& at(int i, int j) { return v_[idx(i, j)]; }
  double at(int i, int j) const { return v_[idx(i, j)]; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  double mean() const;
  double max_abs() const;
  void add_scaled(const ScalarGrid& o, double s);
  void scale(double s);

  // periodic bilinear interpolation
  double sample(const TorusPoint& p) const;

  // flat binary record: int32 N then row-major doubles
  void save_binary(const std::string& path) const;
  static ScalarGrid load_binary(const std::string& path);
  void save_csv(const std::string& path) const;

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(((j % n_ + n_) % n_)) * n_ + ((i % n_ + n_) % n_);
  }
  int n_ = 0;
  std::vector<double> v_;
};

using DensityGrid = ScalarGrid;
using PotentialGrid = ScalarGrid;

// Pair of scalar grids holding a vector field on the same nodes.
struct VectorGrid {
  ScalarGrid x;
  ScalarGrid y;

  VectorGrid() = default;
  explicit VectorGrid(int n) : x(n), y(n) {}
  int n() const { return x.n(); }
  Vec2 sample(const TorusPoint& p) const { return {x.sample(p), y.sample(p)}; }
  double max_norm() const;
  double min_norm() const;
};

struct WeightedPoint {
  TorusPoint x;
  double w = 0.0;
};

// Cloud-in-cell deposition: each weight spreads bilinearly so the grid
// integral (sum / N^2) equals the total weight. Parallel and serial twins.
DensityGrid deposit_density(const std::vector<WeightedPoint>& pts, int n);
DensityGrid deposit_density_serial(const std::vector<WeightedPoint>& pts, int n);

}  // namespace vpctl
