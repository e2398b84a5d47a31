// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vpctl/vec2.hpp"

namespace vpctl {

// Position on the unit torus; both coordinates stay in [0,1).
struct TorusPoint {
  double x1 = 0.0;
  double x2 = 0.0;
};

// Reduce raw coordinates modulo 1. Rejects non-finite input.
TorusPoint wrap(double raw1, double raw2);
inline TorusPoint wrap(const Vec2& v) { return wrap(v.x, v.y); }

// Euclidean distance minimized over the 9 integer shifts.
double torus_dist(const TorusPoint& a, const TorusPoint& b);

// Displacement a -> b as the shortest representative (components in [-1/2,1/2)).
Vec2 torus_delta(const TorusPoint& a, const TorusPoint& b);

class MagneticProfile;  // fields.hpp

// Compact subset of the torus as a boolean grid with a periodic distance
// transform behind thicken().
class CompactSet {
 public:
  CompactSet() = default;
  CompactSet(int n, std::vector<std::uint8_t> indicator, std::string provenance);

  static CompactSet full_torus(int n);
  static CompactSet from_balls(int n, const std::vector<std::pair<TorusPoint, double>>& balls);
  // {x : predicate distance to the two axes lines <= hw} and similar ad-hoc sets
  static CompactSet axes_cross(int n, double half_width);
  static CompactSet complement_of_ball(int n, const TorusPoint& c, double r);
  // cells where b >= threshold
  static CompactSet from_profile_threshold(const MagneticProfile& b, int n, double threshold);

  int resolution() const { return n_; }
  bool empty() const;
  bool contains(const TorusPoint& p) const;
  const std::vector<std::uint8_t>& indicator() const { return ind_; }
  const std::string& provenance() const { return prov_; }
  std::size_t count() const;

  // subset test on the shared grid
  bool subset_of(const CompactSet& other) const;

  std::string to_json() const;
  static CompactSet from_json(const std::string& text);

 private:
  int n_ = 0;
  std::vector<std::uint8_t> ind_;
  std::string prov_;
};

// {x : torus_dist(x, K) <= r} on K's grid, via periodic distance transform.
CompactSet thicken(const CompactSet& k, double r);

// Exact squared-Euclidean periodic distance transform (cell units); exposed
// for tests.
std::vector<double> periodic_distance_field(const CompactSet& k);

// First sampled s in [0, s_max] with wrap(x + s e) in K, stepping by ds.
std::optional<double> ray_enters_set(const TorusPoint& x, const Vec2& e, const CompactSet& k,
                                     double s_max, double ds);

struct GccCertificate {
  double b_floor = 0.0;  // min of b over K_{2d}
  double d = 0.0;
  double D = 0.0;  // sup over samples of first entry time with dwell >= d/2
  int n_dirs = 0;
  int n_pts = 0;
  bool pass = false;
  std::string reason;

  std::string to_json() const;
  static GccCertificate from_json(const std::string& text);
};

// Margin applied when the certificate is consumed (and when re-checked):
// sampled certification needs headroom over the measured sup.
inline constexpr double kGccMargin = 1.1;

// Sampled certification of the geometric control condition: d found by
// halving until b >= b_floor > 0 on K_{2d}; D = sup of first entry into K_d
// with dwell >= d/2 along sampled rays.
GccCertificate certify_gcc(const MagneticProfile& b, const CompactSet& k, int n_dirs, int n_pts);

// Re-check a certificate against fresh random rays; entry-with-dwell must
// occur within kGccMargin * D for every ray.
bool recheck_gcc(const GccCertificate& cert, const MagneticProfile& b, const CompactSet& k,
                 int n_rays, std::uint64_t seed);

}  // namespace vpctl
