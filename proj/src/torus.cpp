// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#include "vpctl/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "vpctl/fields.hpp"
#include "vpctl/parallel.hpp"

namespace vpctl {

TorusPoint wrap(double raw1, double raw2) {
  if (!std::isfinite(raw1) || !std::isfinite(raw2))
    throw std::invalid_argument("wrap: non-finite coordinate");
  double a = raw1 - std::floor(raw1);
  double b = raw2 - std::floor(raw2);
  if (a >= 1.0) a = 0.0;  // floor rounding at the seam
  if (b >= 1.0) b = 0.0;
  return {a, b};
}

double torus_dist(const TorusPoint& a, const TorusPoint& b) {
  return torus_delta(a, b).norm();
}

Vec2 torus_delta(const TorusPoint& a, const TorusPoint& b) {
  double d1 = b.x1 - a.x1;
  double d2 = b.x2 - a.x2;
  d1 -= std::round(d1);
  d2 -= std::round(d2);
  return {d1, d2};
}

CompactSet::CompactSet(int n, std::vector<std::uint8_t> indicator, std::string provenance)
    : n_(n), ind_(std::move(indicator)), prov_(std::move(provenance)) {
  if (n_ <= 0 || ind_.size() != static_cast<std::size_t>(n_) * n_)
    throw std::invalid_argument("CompactSet: bad indicator size");
}

CompactSet CompactSet::full_torus(int n) {
  return CompactSet(n, std::vector<std::uint8_t>(static_cast<std::size_t>(n) * n, 1),
                    "explicit-ball-list");
}

CompactSet CompactSet::from_balls(int n, const std::vector<std::pair<TorusPoint, double>>& balls) {
  std::vector<std::uint8_t> ind(static_cast<std::size_t>(n) * n, 0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      TorusPoint p{static_cast<double>(i) / n, static_cast<double>(j) / n};
      for (const auto& [c, r] : balls)
        if (torus_dist(p, c) <= r) {
          ind[static_cast<std::size_t>(j) * n + i] = 1;
          break;
        }
    }
  return CompactSet(n, std::move(ind), "explicit-ball-list");
}

CompactSet CompactSet::axes_cross(int n, double half_width) {
  std::vector<std::uint8_t> ind(static_cast<std::size_t>(n) * n, 0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double x1 = static_cast<double>(i) / n, x2 = static_cast<double>(j) / n;
      double d1 = std::min(x1, 1.0 - x1);
      double d2 = std::min(x2, 1.0 - x2);
      if (std::min(d1, d2) <= half_width) ind[static_cast<std::size_t>(j) * n + i] = 1;
    }
  return CompactSet(n, std::move(ind), "explicit-ball-list");
}

CompactSet CompactSet::complement_of_ball(int n, const TorusPoint& c, double r) {
  std::vector<std::uint8_t> ind(static_cast<std::size_t>(n) * n, 0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      TorusPoint p{static_cast<double>(i) / n, static_cast<double>(j) / n};
      if (torus_dist(p, c) > r) ind[static_cast<std::size_t>(j) * n + i] = 1;
    }
  return CompactSet(n, std::move(ind), "explicit-ball-list");
}

CompactSet CompactSet::from_profile_threshold(const MagneticProfile& b, int n, double threshold) {
  std::vector<std::uint8_t> ind(static_cast<std::size_t>(n) * n, 0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      TorusPoint p{static_cast<double>(i) / n, static_cast<double>(j) / n};
      if (b.value(p) >= threshold) ind[static_cast<std::size_t>(j) * n + i] = 1;
    }
  return CompactSet(n, std::move(ind), "grid-threshold-of-b");
}

bool CompactSet::empty() const {
  for (auto v : ind_)
    if (v) return false;
  return true;
}

std::size_t CompactSet::count() const {
  std::size_t c = 0;
  for (auto v : ind_) c += v;
  return c;
}

bool CompactSet::contains(const TorusPoint& p) const {
  const int i = std::min(static_cast<int>(p.x1 * n_ + 0.5), n_) % n_;
  const int j = std::min(static_cast<int>(p.x2 * n_ + 0.5), n_) % n_;
  return ind_[static_cast<std::size_t>(j) * n_ + i] != 0;
}

bool CompactSet::subset_of(const CompactSet& other) const {
  if (other.n_ != n_) throw std::invalid_argument("subset_of: grid mismatch");
  for (std::size_t k = 0; k < ind_.size(); ++k)
    if (ind_[k] && !other.ind_[k]) return false;
  return true;
}

namespace {

// 1D squared-distance transform (Felzenszwalb), f = input costs.
void dt1d(const std::vector<double>& f, std::vector<double>& d) {
  const int n = static_cast<int>(f.size());
  d.assign(n, 0.0);
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  int kk = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + q * (double)q) - (f[v[kk]] + v[kk] * (double)v[kk])) / (2.0 * q - 2.0 * v[kk]);
    while (s <= z[kk]) {
      --kk;
      s = ((f[q] + q * (double)q) - (f[v[kk]] + v[kk] * (double)v[kk])) / (2.0 * q - 2.0 * v[kk]);
    }
    ++kk;
    v[kk] = q;
    z[kk] = s;
    z[kk + 1] = std::numeric_limits<double>::infinity();
  }
  kk = 0;
  for (int q = 0; q < n; ++q) {
    while (z[kk + 1] < q) ++kk;
    d[q] = (q - v[kk]) * (double)(q - v[kk]) + f[v[kk]];
  }
}

// periodic via 3x tiling, keep middle third
void dt1d_periodic(const std::vector<double>& f, std::vector<double>& out) {
  const int n = static_cast<int>(f.size());
  std::vector<double> tiled(3 * n);
  for (int t = 0; t < 3; ++t)
    for (int i = 0; i < n; ++i) tiled[t * n + i] = f[i];
  std::vector<double> d;
  dt1d(tiled, d);
  out.resize(n);
  for (int i = 0; i < n; ++i) out[i] = d[n + i];
}

}  // namespace

std::vector<double> periodic_distance_field(const CompactSet& k) {
  const int n = k.resolution();
  const double inf = 1e18;
  std::vector<double> f(static_cast<std::size_t>(n) * n);
  for (std::size_t idx = 0; idx < f.size(); ++idx) f[idx] = k.indicator()[idx] ? 0.0 : inf;
  // rows then columns
  std::vector<double> row(n), out(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) row[i] = f[static_cast<std::size_t>(j) * n + i];
    dt1d_periodic(row, out);
    for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(j) * n + i] = out[i];
  }
  std::vector<double> col(n), outc(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) col[j] = f[static_cast<std::size_t>(j) * n + i];
    dt1d_periodic(col, outc);
    for (int j = 0; j < n; ++j) f[static_cast<std::size_t>(j) * n + i] = outc[j];
  }
  return f;  // squared distance in cell units
}

CompactSet thicken(const CompactSet& k, double r) {
  if (r < 0) throw std::invalid_argument("thicken: r < 0");
  const int n = k.resolution();
  auto d2 = periodic_distance_field(k);
  const double rc = r * n;
  std::vector<std::uint8_t> ind(d2.size());
  for (std::size_t idx = 0; idx < d2.size(); ++idx) ind[idx] = d2[idx] <= rc * rc ? 1 : 0;
  return CompactSet(n, std::move(ind), k.provenance());
}

std::optional<double> ray_enters_set(const TorusPoint& x, const Vec2& e, const CompactSet& k,
                                     double s_max, double ds) {
  if (ds <= 0) throw std::invalid_argument("ray_enters_set: ds <= 0");
  for (double s = 0.0; s <= s_max; s += ds) {
    TorusPoint p = wrap(x.x1 + s * e.x, x.x2 + s * e.y);
    if (k.contains(p)) return s;
  }
  return std::nullopt;
}

namespace {

// First time t such that the ray stays in K over [t, t + dwell]; nullopt if
// none within s_max.
std::optional<double> first_entry_with_dwell(const TorusPoint& x, const Vec2& e,
                                             const CompactSet& kd, double dwell, double s_max,
                                             double ds) {
  double run_start = -1.0;
  bool in_run = false;
  for (double s = 0.0; s <= s_max; s += ds) {
    TorusPoint p = wrap(x.x1 + s * e.x, x.x2 + s * e.y);
    if (kd.contains(p)) {
      if (!in_run) {
        in_run = true;
        run_start = s;
      }
      if (s - run_start >= dwell) return run_start;
    } else {
      in_run = false;
    }
  }
  return std::nullopt;
}

}  // namespace

GccCertificate certify_gcc(const MagneticProfile& b, const CompactSet& k, int n_dirs, int n_pts) {
  GccCertificate cert;
  cert.n_dirs = n_dirs;
  cert.n_pts = n_pts;
  if (k.empty()) {
    cert.reason = "empty K";
    return cert;
  }
  if (n_dirs < 16 || n_pts < 16) throw std::invalid_argument("certify_gcc: sample counts < 16");

  // b must be positive on K itself
  {
    const int n = k.resolution();
    double bmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (k.indicator()[static_cast<std::size_t>(j) * n + i])
          bmin = std::min(bmin, b.value({static_cast<double>(i) / n, static_cast<double>(j) / n}));
    if (bmin <= 0.0) {
      cert.reason = "b <= 0 somewhere on K";
      return cert;
    }
  }

  // d search: halve from diam/8 until min b over K_{2d} positive
  const double diam = std::sqrt(0.5);
  double d = diam / 8.0;
  bool found_d = false;
  for (int halving = 0; halving < 12; ++halving) {
    CompactSet k2d = thicken(k, 2.0 * d);
    const int n = k2d.resolution();
    double bmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (k2d.indicator()[static_cast<std::size_t>(j) * n + i])
          bmin = std::min(bmin, b.value({static_cast<double>(i) / n, static_cast<double>(j) / n}));
    if (bmin > 0.0) {
      cert.b_floor = bmin;
      found_d = true;
      break;
    }
    d *= 0.5;
  }
  if (!found_d) {
    cert.reason = "no d with b > 0 on K_{2d} after 12 halvings";
    return cert;
  }
  cert.d = d;

  CompactSet kd = thicken(k, d);
  const double ds = 0.5 / kd.resolution();
  const double s_max = 64.0;
  const double dwell = d / 2.0;

  std::vector<double> entry(static_cast<std::size_t>(n_dirs) * n_pts,
                            std::numeric_limits<double>::quiet_NaN());
  const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_pts))));
  parallel_for(static_cast<std::int64_t>(n_dirs) * n_pts, [&](std::int64_t idx) {
    const int di = static_cast<int>(idx / n_pts);
    const int pi = static_cast<int>(idx % n_pts);
    const double ang = 2.0 * M_PI * (di + 0.5) / n_dirs;
    const Vec2 e{std::cos(ang), std::sin(ang)};
    const TorusPoint x{((pi % side) + 0.5) / side, ((pi / side) + 0.5) / side};
    auto t = first_entry_with_dwell(x, e, kd, dwell, s_max, ds);
    if (t) entry[idx] = *t;
  });
  double dmax = 0.0;
  for (double t : entry) {
    if (std::isnan(t)) {
      cert.reason = "a sampled ray exhausted s_max";
      cert.pass = false;
      return cert;
    }
    dmax = std::max(dmax, t);
  }
  cert.D = dmax;
  cert.pass = true;
  return cert;
}

bool recheck_gcc(const GccCertificate& cert, const MagneticProfile& b, const CompactSet& k,
                 int n_rays, std::uint64_t seed) {
  if (!cert.pass) return false;
  CompactSet k2d = thicken(k, 2.0 * cert.d);
  CompactSet kd = thicken(k, cert.d);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double ds = 0.5 / kd.resolution();
  const double budget = std::max(cert.D * kGccMargin, 4.0 * ds);
  for (int r = 0; r < n_rays; ++r) {
    TorusPoint x{uni(rng), uni(rng)};
    const double ang = 2.0 * M_PI * uni(rng);
    const Vec2 e{std::cos(ang), std::sin(ang)};
    auto t = first_entry_with_dwell(x, e, kd, cert.d / 2.0, budget + cert.d, ds);
    if (!t || *t > budget) return false;
    if (b.value(x) < 0.0) return false;
  }
  // floor check on fresh K_{2d} samples
  const int n = k2d.resolution();
  for (int r = 0; r < n_rays; ++r) {
    TorusPoint x{uni(rng), uni(rng)};
    if (k2d.contains(x) && b.value(x) < cert.b_floor - 1e-9) {
      // grid-resolution slack: allow one-cell mismatch near the boundary
      const double cell = 1.0 / n;
      CompactSet inner = thicken(k, std::max(0.0, 2.0 * cert.d - 2 * cell));
      if (inner.contains(x)) return false;
    }
  }
  return true;
}

namespace {

std::string rle_encode(const std::vector<std::uint8_t>& v) {
  std::string out;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    out += (v[i] ? '1' : '0');
    out += 'x' + std::to_string(j - i) + ";";
    i = j;
  }
  return out;
}

std::vector<std::uint8_t> rle_decode(const std::string& s, std::size_t expect) {
  std::vector<std::uint8_t> v;
  v.reserve(expect);
  std::size_t i = 0;
  while (i < s.size()) {
    const std::uint8_t bit = s[i] == '1' ? 1 : 0;
    i += 2;  // bit + 'x'
    std::size_t semi = s.find(';', i);
    const std::size_t count = std::stoull(s.substr(i, semi - i));
    v.insert(v.end(), count, bit);
    i = semi + 1;
  }
  if (v.size() != expect) throw std::runtime_error("CompactSet: RLE size mismatch");
  return v;
}

}  // namespace

std::string CompactSet::to_json() const {
  nlohmann::json j;
  j["resolution"] = n_;
  j["indicator_rle"] = rle_encode(ind_);
  j["provenance"] = prov_;
  return j.dump(2);
}

CompactSet CompactSet::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  const int n = j.at("resolution").get<int>();
  auto ind = rle_decode(j.at("indicator_rle").get<std::string>(),
                        static_cast<std::size_t>(n) * n);
  return CompactSet(n, std::move(ind), j.value("provenance", std::string("explicit-ball-list")));
}

std::string GccCertificate::to_json() const {
  nlohmann::json j;
  j["b_floor"] = b_floor;
  j["d"] = d;
  j["D"] = D;
  j["n_dirs"] = n_dirs;
  j["n_pts"] = n_pts;
  j["pass"] = pass;
  j["reason"] = reason;
  return j.dump(2);
}

GccCertificate GccCertificate::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  GccCertificate c;
  c.b_floor = j.at("b_floor").get<double>();
  c.d = j.at("d").get<double>();
  c.D = j.at("D").get<double>();
  c.n_dirs = j.at("n_dirs").get<int>();
  c.n_pts = j.at("n_pts").get<int>();
  c.pass = j.at("pass").get<bool>();
  c.reason = j.value("reason", std::string());
  return c;
}

}  // namespace vpctl
