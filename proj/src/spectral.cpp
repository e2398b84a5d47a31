// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#include "vpctl/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace vpctl {

namespace {

// FFTW plans per resolution. Plan creation is not thread-safe; execution via
// the new-array interface is. Plans are created FFTW_UNALIGNED so they can run
// on any buffer.
struct Plans {
  fftw_plan fwd = nullptr;   // r2c
  fftw_plan bwd = nullptr;   // c2r
};

std::mutex g_plan_mutex;
std::map<int, Plans>& plan_cache() {
  static std::map<int, Plans> cache;
  return cache;
}

Plans get_plans(int n) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> re(static_cast<std::size_t>(n) * n);
  std::vector<std::complex<double>> cx(static_cast<std::size_t>(n) * (n / 2 + 1));
  Plans p;
  // grid is row-major with x1 fastest: dims (n1=x2, n0... fftw wants [n0][n1]
  // with n1 contiguous, so n0 = x2-rows, n1 = x1.
  p.fwd = fftw_plan_dft_r2c_2d(n, n, re.data(), reinterpret_cast<fftw_complex*>(cx.data()),
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.bwd = fftw_plan_dft_c2r_2d(n, n, reinterpret_cast<fftw_complex*>(cx.data()), re.data(),
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p.fwd || !p.bwd) throw std::runtime_error("fftw plan creation failed");
  cache[n] = p;
  return p;
}

// integer wavenumber for index k in an n-point transform
inline int wavenum(int k, int n) { return k <= n / 2 ? k : k - n; }

using Cx = std::complex<double>;

std::vector<Cx> forward(const ScalarGrid& g) {
  const int n = g.n();
  Plans p = get_plans(n);
  std::vector<double> re(g.values());
  std::vector<Cx> cx(static_cast<std::size_t>(n) * (n / 2 + 1));
  fftw_execute_dft_r2c(p.fwd, re.data(), reinterpret_cast<fftw_complex*>(cx.data()));
  return cx;
}

ScalarGrid backward(std::vector<Cx> cx, int n) {
  Plans p = get_plans(n);
  ScalarGrid g(n);
  fftw_execute_dft_c2r(p.bwd, reinterpret_cast<fftw_complex*>(cx.data()), g.values().data());
  g.scale(1.0 / (static_cast<double>(n) * n));
  return g;
}

}  // namespace

PotentialGrid solve_poisson(const DensityGrid& rho) {
  const int n = rho.n();
  if ((n & (n - 1)) != 0) throw std::invalid_argument("solve_poisson: N must be a power of two");
  auto cx = forward(rho);
  const int nc = n / 2 + 1;
  for (int j = 0; j < n; ++j) {
    const int k2 = wavenum(j, n);
    for (int i = 0; i < nc; ++i) {
      const int k1 = i;
      const std::size_t idx = static_cast<std::size_t>(j) * nc + i;
      if (k1 == 0 && k2 == 0) {
        cx[idx] = 0.0;  // zero mode removed: mean(phi) = 0
        continue;
      }
      const double ksq = 4.0 * M_PI * M_PI * (static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
      cx[idx] /= -ksq;
    }
  }
  return backward(std::move(cx), n);
}

VectorGrid gradient(const PotentialGrid& phi) {
  const int n = phi.n();
  auto cx = forward(phi);
  const int nc = n / 2 + 1;
  std::vector<Cx> gx(cx.size()), gy(cx.size());
  for (int j = 0; j < n; ++j) {
    const int k2 = wavenum(j, n);
    for (int i = 0; i < nc; ++i) {
      const int k1 = i;
      const std::size_t idx = static_cast<std::size_t>(j) * nc + i;
      const double w1 = (k1 == n / 2) ? 0.0 : 2.0 * M_PI * k1;
      const double w2 = (n % 2 == 0 && k2 == -n / 2) ? 0.0 : 2.0 * M_PI * k2;
      gx[idx] = Cx(0.0, w1) * cx[idx];
      gy[idx] = Cx(0.0, w2) * cx[idx];
    }
  }
  VectorGrid out(n);
  out.x = backward(std::move(gx), n);
  out.y = backward(std::move(gy), n);
  return out;
}

ScalarGrid laplacian(const ScalarGrid& phi) {
  const int n = phi.n();
  auto cx = forward(phi);
  const int nc = n / 2 + 1;
  for (int j = 0; j < n; ++j) {
    const int k2 = wavenum(j, n);
    for (int i = 0; i < nc; ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * nc + i;
      const double ksq =
          4.0 * M_PI * M_PI * (static_cast<double>(i) * i + static_cast<double>(k2) * k2);
      cx[idx] *= -ksq;
    }
  }
  return backward(std::move(cx), n);
}

ScalarGrid divergence(const VectorGrid& f) {
  const int n = f.n();
  auto cx = forward(f.x);
  auto cy = forward(f.y);
  const int nc = n / 2 + 1;
  for (int j = 0; j < n; ++j) {
    const int k2 = wavenum(j, n);
    for (int i = 0; i < nc; ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * nc + i;
      const double w1 = (i == n / 2) ? 0.0 : 2.0 * M_PI * i;
      const double w2 = (n % 2 == 0 && k2 == -n / 2) ? 0.0 : 2.0 * M_PI * k2;
      cx[idx] = Cx(0.0, w1) * cx[idx] + Cx(0.0, w2) * cy[idx];
    }
  }
  return backward(std::move(cx), n);
}

}  // namespace vpctl
