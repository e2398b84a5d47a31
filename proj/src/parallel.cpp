// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#include "vpctl/parallel.hpp"

#include <atomic>

namespace vpctl {

namespace {
std::atomic<int> g_workers{0};
}

void set_workers(int n) { g_workers.store(n < 0 ? 0 : n); }

int workers() {
  const int w = g_workers.load();
  return w > 0 ? w : omp_get_max_threads();
}

}  // namespace vpctl
