// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#include "vpctl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "vpctl/parallel.hpp"

namespace vpctl {

ScalarGrid::ScalarGrid(int n, double fill) : n_(n), v_(static_cast<std::size_t>(n) * n, fill) {
  if (n <= 0) throw std::invalid_argument("ScalarGrid: n <= 0");
}

double ScalarGrid::mean() const {
  double s = 0.0;
  for (double x : v_) s += x;
  return s / static_cast<double>(v_.size());
}

double ScalarGrid::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::fabs(x));
  return m;
}

void ScalarGrid::add_scaled(const ScalarGrid& o, double s) {
  if (o.n_ != n_) throw std::invalid_argument("add_scaled: grid mismatch");
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += s * o.v_[k];
}

void ScalarGrid::scale(double s) {
  for (double& x : v_) x *= s;
}

double ScalarGrid::sample(const TorusPoint& p) const {
  const double u = p.x1 * n_;
  const double w = p.x2 * n_;
  int i = static_cast<int>(std::floor(u));
  int j = static_cast<int>(std::floor(w));
  const double fu = u - i;
  const double fw = w - j;
  i %= n_;
  j %= n_;
  if (i < 0) i += n_;
  if (j < 0) j += n_;
  const int ip = (i + 1) % n_;
  const int jp = (j + 1) % n_;
  const double* d = v_.data();
  const std::size_t nn = static_cast<std::size_t>(n_);
  return d[j * nn + i] * (1 - fu) * (1 - fw) + d[j * nn + ip] * fu * (1 - fw) +
         d[jp * nn + i] * (1 - fu) * fw + d[jp * nn + ip] * fu * fw;
}

void ScalarGrid::save_binary(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  const std::int32_t n32 = n_;
  f.write(reinterpret_cast<const char*>(&n32), sizeof n32);
  f.write(reinterpret_cast<const char*>(v_.data()), static_cast<std::streamsize>(v_.size() * sizeof(double)));
}

ScalarGrid ScalarGrid::load_binary(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::int32_t n32 = 0;
  f.read(reinterpret_cast<char*>(&n32), sizeof n32);
  ScalarGrid g(n32);
  f.read(reinterpret_cast<char*>(g.v_.data()), static_cast<std::streamsize>(g.v_.size() * sizeof(double)));
  if (!f) throw std::runtime_error("truncated grid file " + path);
  return g;
}

void ScalarGrid::save_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i < n_; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", at(i, j));
      f << buf << (i + 1 == n_ ? '\n' : ',');
    }
  }
}

double VectorGrid::max_norm() const {
  double m = 0.0;
  for (std::size_t k = 0; k < x.values().size(); ++k)
    m = std::max(m, std::hypot(x.values()[k], y.values()[k]));
  return m;
}

double VectorGrid::min_norm() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.values().size(); ++k)
    m = std::min(m, std::hypot(x.values()[k], y.values()[k]));
  return m;
}

namespace {

inline void deposit_one(std::vector<double>& v, int n, const WeightedPoint& p) {
  const double u = p.x.x1 * n;
  const double w = p.x.x2 * n;
  int i = static_cast<int>(std::floor(u));
  int j = static_cast<int>(std::floor(w));
  const double fu = u - i;
  const double fw = w - j;
  i = (i % n + n) % n;
  j = (j % n + n) % n;
  const int ip = (i + 1) % n;
  const int jp = (j + 1) % n;
  // per-particle integral = weight: nodal values carry a factor N^2
  const double a = p.w * n * static_cast<double>(n);
  v[static_cast<std::size_t>(j) * n + i] += a * (1 - fu) * (1 - fw);
  v[static_cast<std::size_t>(j) * n + ip] += a * fu * (1 - fw);
  v[static_cast<std::size_t>(jp) * n + i] += a * (1 - fu) * fw;
  v[static_cast<std::size_t>(jp) * n + ip] += a * fu * fw;
}

}  // namespace

DensityGrid deposit_density_serial(const std::vector<WeightedPoint>& pts, int n) {
  DensityGrid g(n);
  for (const auto& p : pts) deposit_one(g.values(), n, p);
  return g;
}

DensityGrid deposit_density(const std::vector<WeightedPoint>& pts, int n) {
  const int w = workers();
  if (w == 1 || pts.size() < 4096) return deposit_density_serial(pts, n);
  // per-thread scratch grids merged in thread order: deterministic for a
  // fixed worker count
  std::vector<std::vector<double>> scratch(w);
  const std::size_t chunk = (pts.size() + w - 1) / w;
  parallel_for(w, [&](std::int64_t ti) {
    auto& loc = scratch[ti];
    loc.assign(static_cast<std::size_t>(n) * n, 0.0);
    const std::size_t lo = ti * chunk;
    const std::size_t hi = std::min(pts.size(), lo + chunk);
    for (std::size_t k = lo; k < hi; ++k) deposit_one(loc, n, pts[k]);
  });
  DensityGrid g(n);
  for (int ti = 0; ti < w; ++ti)
    for (std::size_t k = 0; k < g.values().size(); ++k) g.values()[k] += scratch[ti][k];
  return g;
}

}  // namespace vpctl
