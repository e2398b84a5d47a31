// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vpctl/grid.hpp"

namespace vpctl {

// Zero-mean periodic Poisson problem: returns phi with
// Lap phi = rho - mean(rho) in the discrete spectral sense, mean(phi) = 0.
PotentialGrid solve_poisson(const DensityGrid& rho);

// Spectral first derivatives (d1, d2). Nyquist mode of the derivative is
// zeroed, the standard convention for odd-order spectral derivatives.
VectorGrid gradient(const PotentialGrid& phi);

// Spectral Laplacian, for residual checks.
ScalarGrid laplacian(const ScalarGrid& phi);

// Spectral divergence of a vector grid.
ScalarGrid divergence(const VectorGrid& f);

}  // namespace vpctl
