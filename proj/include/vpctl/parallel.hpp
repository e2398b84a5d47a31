// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include <omp.h>

namespace vpctl {

// Global worker cap, settable from the CLI (--workers). 0 = OpenMP default.
void set_workers(int n);
int workers();

// Data-parallel loop over [0, n). Indices must be independent; outputs go to
// caller-owned slots so results are deterministic regardless of schedule.
template <class F>
void parallel_for(std::int64_t n, F&& fn) {
  const int w = workers();
  if (w == 1 || n < 2) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
#pragma omp parallel for schedule(dynamic, 1) num_threads(w)
  for (std::int64_t i = 0; i < n; ++i) fn(i);
}

// Serial reference twin, kept for tests and the benchmark target.
template <class F>
void serial_for(std::int64_t n, F&& fn) {
  for (std::int64_t i = 0; i < n; ++i) fn(i);
}

}  // namespace vpctl
