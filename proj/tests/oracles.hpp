#pragma once
// Reference implementations written independently of the library. They are
// deliberately naive: literal loops, textbook formulas, no shared helpers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "csa/geometry.hpp"
#include "csa/mesh.hpp"

namespace oracle {

/// For every point of the smaller set (first on ties), the Euclidean
/// distance to the closest point of the other set: Dt_j for all j, then min.
inline std::vector<double> nearest_distances(const std::vector<csa::Point3>& a, const std::vector<csa::Point3>& b) {
  const bool a_small = a.size() <= b.size();
  const auto& p = a_small ? a : b;
  const auto& q = a_small ? b : a;
  std::vector<double> d(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::vector<double> dt(q.size());
    for (std::size_t j = 0; j < q.size(); ++j) {
      const double dx = p[i].x - q[j].x;
      const double dy = p[i].y - q[j].y;
      const double dz = p[i].z - q[j].z;
      dt[j] = std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    d[i] = *std::min_element(dt.begin(), dt.end());
  }
  return d;
}

struct Line {
  double slope;
  double intercept;
};

/// Least-squares line through (x_k, y_k) by the centred two-pass formula.
inline Line fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) return {0.0, my};
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

struct Knee {
  std::size_t split = 0;  // 1-based
  double tau = 0.0;
  std::vector<double> errors;  // errors[i - 2] for split i
};

/// Exhaustive two-segment search over 1-based ranks with summed absolute
/// deviation, lowest split on ties.
inline Knee exhaustive_knee(std::vector<double> d, double cap) {
  std::sort(d.begin(), d.end());
  std::vector<double> ds;
  for (const double v : d)
    if (v < cap) ds.push_back(v);
  const std::size_t f = ds.size();
  Knee knee;
  if (f < 4) return knee;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 2; i <= f - 1; ++i) {
    std::vector<double> x1, y1, x2, y2;
    for (std::size_t j = 1; j <= i; ++j) {
      x1.push_back(static_cast<double>(j));
      y1.push_back(ds[j - 1]);
    }
    for (std::size_t j = i + 1; j <= f; ++j) {
      x2.push_back(static_cast<double>(j));
      y2.push_back(ds[j - 1]);
    }
    const Line l1 = fit_line(x1, y1);
    const Line l2 = fit_line(x2, y2);
    double err = 0.0;
    for (std::size_t j = 1; j <= i; ++j) err += std::fabs(ds[j - 1] - (l1.slope * j + l1.intercept));
    for (std::size_t j = i + 1; j <= f; ++j) err += std::fabs(ds[j - 1] - (l2.slope * j + l2.intercept));
    knee.errors.push_back(err);
    if (err < best) {
      best = err;
      knee.split = i;
    }
  }
  knee.tau = ds[knee.split - 1];
  return knee;
}

/// Half the cross-product magnitude, accumulated in long double.
inline double triangle_area(const csa::Point3& a, const csa::Point3& b, const csa::Point3& c) {
  const long double ux = static_cast<long double>(b.x) - a.x, uy = static_cast<long double>(b.y) - a.y,
                    uz = static_cast<long double>(b.z) - a.z;
  const long double vx = static_cast<long double>(c.x) - a.x, vy = static_cast<long double>(c.y) - a.y,
                    vz = static_cast<long double>(c.z) - a.z;
  const long double cx = uy * vz - uz * vy, cy = uz * vx - ux * vz, cz = ux * vy - uy * vx;
  return static_cast<double>(std::sqrt(cx * cx + cy * cy + cz * cz) / 2.0L);
}

inline double spherical_cap_area(double r, double h) { return 2.0 * 3.14159265358979323846 * r * h; }

/// Random triangle soup turned into an indexed mesh (no shared vertices),
/// optionally clustered so that the grid sees uneven occupancy.
inline csa::TriMesh random_soup(std::mt19937_64& rng, std::size_t faces, double extent, bool clustered) {
  std::uniform_real_distribution<double> u(-extent, extent);
  std::uniform_real_distribution<double> small(-0.05 * extent, 0.05 * extent);
  std::normal_distribution<double> tight(0.0, 0.01 * extent);
  csa::TriMesh m;
  std::vector<csa::Point3> centres;
  for (int k = 0; k < 5; ++k) centres.push_back({u(rng), u(rng), u(rng)});
  for (std::size_t f = 0; f < faces; ++f) {
    csa::Point3 c{u(rng), u(rng), u(rng)};
    if (clustered && f % 4 != 0) {
      const csa::Point3& ctr = centres[f % centres.size()];
      c = {ctr.x + tight(rng), ctr.y + tight(rng), ctr.z + tight(rng)};
    }
    const auto a = m.add_vertex({c.x + small(rng), c.y + small(rng), c.z + small(rng)});
    const auto b = m.add_vertex({c.x + small(rng), c.y + small(rng), c.z + small(rng)});
    const auto d = m.add_vertex({c.x + small(rng), c.y + small(rng), c.z + small(rng)});
    m.add_face({a, b, d});
  }
  return m;
}

}  // namespace oracle
