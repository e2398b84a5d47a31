// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "vpctl/fields.hpp"
#include "vpctl/torus.hpp"

using namespace vpctl;

namespace {

// independent oracle: exhaustive minimum over a wide shift range
double dist_oracle(const TorusPoint& a, const TorusPoint& b) {
  double best = 1e300;
  for (int m = -2; m <= 2; ++m)
    for (int n = -2; n <= 2; ++n)
      best = std::min(best, std::hypot(b.x1 - a.x1 + m, b.x2 - a.x2 + n));
  return best;
}

}  // namespace

TEST_CASE("wrap reduces into [0,1)") {
  auto p = wrap(0.3, 0.7);
  CHECK(p.x1 == doctest::Approx(0.3));
  CHECK(p.x2 == doctest::Approx(0.7));
  p = wrap(1.25, -0.5);
  CHECK(p.x1 == doctest::Approx(0.25));
  CHECK(p.x2 == doctest::Approx(0.5));
  p = wrap(-3.0, 4.0);
  CHECK(p.x1 == 0.0);
  CHECK(p.x2 == 0.0);
  CHECK_THROWS(wrap(std::nan(""), 0.0));
}

TEST_CASE("wrap is idempotent") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> uni(-10.0, 10.0);
  for (int k = 0; k < 1000; ++k) {
    TorusPoint p = wrap(uni(rng), uni(rng));
    TorusPoint q = wrap(p.x1, p.x2);
    CHECK(p.x1 == q.x1);
    CHECK(p.x2 == q.x2);
    CHECK(p.x1 >= 0.0);
    CHECK(p.x1 < 1.0);
  }
}

TEST_CASE("torus_dist matches the exhaustive oracle") {
  CHECK(torus_dist({0.1, 0.0}, {0.9, 0.0}) == doctest::Approx(0.2));
  CHECK(torus_dist({0.0, 0.0}, {0.5, 0.5}) == doctest::Approx(std::sqrt(0.5)));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    TorusPoint a{uni(rng), uni(rng)}, b{uni(rng), uni(rng)};
    CHECK(torus_dist(a, b) == doctest::Approx(dist_oracle(a, b)).epsilon(1e-12));
    CHECK(torus_dist(a, a) == 0.0);
    CHECK(torus_dist(a, b) == doctest::Approx(torus_dist(b, a)));
  }
}

TEST_CASE("distance is shift invariant") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    TorusPoint a{uni(rng), uni(rng)}, b{uni(rng), uni(rng)};
    const double z1 = 3.0 * uni(rng) - 1.5, z2 = 3.0 * uni(rng) - 1.5;
    TorusPoint as = wrap(a.x1 + z1, a.x2 + z2);
    TorusPoint bs = wrap(b.x1 + z1, b.x2 + z2);
    CHECK(torus_dist(as, bs) == doctest::Approx(torus_dist(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("triangle inequality on random triples") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    TorusPoint a{uni(rng), uni(rng)}, b{uni(rng), uni(rng)}, c{uni(rng), uni(rng)};
    CHECK(torus_dist(a, c) <= torus_dist(a, b) + torus_dist(b, c) + 1e-12);
  }
}

TEST_CASE("thicken: identity at r=0, monotone, full-torus fixed point") {
  const int n = 128;
  CompactSet k = CompactSet::from_balls(n, {{{0.5, 0.5}, 0.1}});
  CompactSet k0 = thicken(k, 0.0);
  CHECK(k.indicator() == k0.indicator());
  CompactSet k1 = thicken(k, 0.05);
  CompactSet k2 = thicken(k, 0.11);
  CHECK(k.subset_of(k1));
  CHECK(k1.subset_of(k2));
  CompactSet full = CompactSet::full_torus(n);
  CHECK(thicken(full, 0.3).indicator() == full.indicator());
  // thickening a point ball by 0.1 gives the grid ball of radius ~0.2
  std::size_t cnt = k2.count();
  const double expect = M_PI * 0.21 * 0.21 * n * n;
  CHECK(static_cast<double>(cnt) == doctest::Approx(expect).epsilon(0.08));
}

TEST_CASE("thicken the axes cross gives two slabs") {
  const int n = 256;
  CompactSet cross = CompactSet::axes_cross(n, 0.0001);  // essentially the lines
  CompactSet thick = thicken(cross, 0.05);
  // per-cell distance oracle against both lines
  for (int j = 0; j < n; j += 7)
    for (int i = 0; i < n; i += 7) {
      const double x = static_cast<double>(i) / n, y = static_cast<double>(j) / n;
      const double d1 = std::min(x, 1.0 - x);
      const double d2 = std::min(y, 1.0 - y);
      const bool inside = std::min(d1, d2) <= 0.05 + 1e-9;
      const bool got = thick.indicator()[static_cast<std::size_t>(j) * n + i] != 0;
      if (std::fabs(std::min(d1, d2) - 0.05) > 2.0 / n) CHECK(inside == got);
    }
}

TEST_CASE("ray marching finds entries") {
  const int n = 256;
  CompactSet cross = thicken(CompactSet::axes_cross(n, 0.0001), 0.01);
  // x in K: immediate hit
  auto s0 = ray_enters_set({0.0, 0.3}, {1.0, 0.0}, cross, 4.0, 0.5 / n);
  REQUIRE(s0.has_value());
  CHECK(*s0 == doctest::Approx(0.0));
  // from the center along e1: hits the vertical line at 0.5
  auto s1 = ray_enters_set({0.5, 0.5}, {1.0, 0.0}, cross, 4.0, 0.5 / n);
  REQUIRE(s1.has_value());
  CHECK(*s1 == doctest::Approx(0.5).epsilon(0.05));
  // dense winding hits a small ball eventually
  CompactSet ball = CompactSet::from_balls(n, {{{0.5, 0.5}, 0.1}});
  const double irr = 1.0 / std::sqrt(2.0);
  Vec2 e{std::sqrt(1.0 - irr * irr), irr};
  auto s2 = ray_enters_set({0.01, 0.87}, e, ball, 64.0, 0.5 / n);
  CHECK(s2.has_value());
}

TEST_CASE("gcc certification: the three magnetic examples") {
  const int n = 256;
  // example 1: b > 0 everywhere, K = full torus -> pass with D = 0
  {
    MagneticProfile b = MagneticProfile::constant(1.0);
    CompactSet k = CompactSet::full_torus(n);
    GccCertificate cert = certify_gcc(b, k, 24, 25);
    CHECK(cert.pass);
    CHECK(cert.b_floor == doctest::Approx(1.0));
    CHECK(cert.D == doctest::Approx(0.0));
  }
  // example 3: axes cross with b = 1 -> pass with D <= sqrt(2)
  {
    MagneticProfile b = MagneticProfile::constant(1.0);
    CompactSet k = thicken(CompactSet::axes_cross(n, 0.0001), 0.01);
    GccCertificate cert = certify_gcc(b, k, 32, 36);
    CHECK(cert.pass);
    CHECK(cert.D <= std::sqrt(2.0));
    CHECK(recheck_gcc(cert, b, k, 100, 99));
  }
  // example 2: one zero of b, K = complement of a ball around it
  {
    MagneticProfile b = MagneticProfile::from_function(
        [](TorusPoint p) {
          const double d = torus_dist(p, {0.5, 0.5});
          return std::min(1.0, 25.0 * d * d);
        },
        128);
    CompactSet k = CompactSet::complement_of_ball(n, {0.5, 0.5}, 0.2);
    GccCertificate cert = certify_gcc(b, k, 24, 25);
    CHECK(cert.pass);
    CHECK(cert.b_floor > 0.0);
    CHECK(recheck_gcc(cert, b, k, 100, 7));
  }
  // negative b on K is rejected
  {
    ScalarGrid g(64, 1.0);
    g.at(3, 3) = 0.0;
    MagneticProfile b(std::move(g));
    CompactSet k = CompactSet::full_torus(64);
    GccCertificate cert = certify_gcc(b, k, 24, 25);
    CHECK(!cert.pass);
    CHECK(!cert.reason.empty());
  }
}

TEST_CASE("certified D decreases when K grows") {
  const int n = 256;
  MagneticProfile b = MagneticProfile::constant(1.0);
  CompactSet small = CompactSet::from_balls(n, {{{0.3, 0.3}, 0.15}});
  CompactSet big = CompactSet::from_balls(n, {{{0.3, 0.3}, 0.15}, {{0.8, 0.8}, 0.15}});
  GccCertificate cs = certify_gcc(b, small, 32, 25);
  GccCertificate cb = certify_gcc(b, big, 32, 25);
  REQUIRE(cs.pass);
  REQUIRE(cb.pass);
  CHECK(cb.D <= cs.D + 1e-9);
}

TEST_CASE("compact set and certificate round-trip through JSON") {
  CompactSet k = CompactSet::from_balls(64, {{{0.5, 0.5}, 0.2}});
  CompactSet k2 = CompactSet::from_json(k.to_json());
  CHECK(k.indicator() == k2.indicator());
  GccCertificate c;
  c.b_floor = 0.5;
  c.d = 0.03;
  c.D = 1.2;
  c.n_dirs = 32;
  c.n_pts = 25;
  c.pass = true;
  GccCertificate c2 = GccCertificate::from_json(c.to_json());
  CHECK(c2.b_floor == c.b_floor);
  CHECK(c2.D == c.D);
  CHECK(c2.pass == c.pass);
}
