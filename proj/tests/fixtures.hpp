#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "csa/mesh.hpp"
#include "csa/synth.hpp"

namespace fixture {

/// Outward-wound unit cube [0,1]^3, 8 vertices, 12 triangles.
inline csa::TriMesh unit_cube() {
  csa::TriMesh m;
  for (int i = 0; i < 8; ++i) m.add_vertex({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
  const csa::VertexId quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& q : quads) {
    m.add_face({q[0], q[1], q[2]});
    m.add_face({q[0], q[2], q[3]});
  }
  return m;
}

inline csa::TriMesh single_triangle(csa::Point3 a, csa::Point3 b, csa::Point3 c) {
  csa::TriMesh m;
  m.add_face({m.add_vertex(a), m.add_vertex(b), m.add_vertex(c)});
  return m;
}

inline csa::TriMesh translated(const csa::TriMesh& m, csa::Vec3 t) {
  return csa::transformed(m, csa::RigidTransform::axis_angle({0, 0, 1}, 0.0, t));
}

inline csa::RigidTransform random_rigid(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.1, 3.0);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  csa::Vec3 axis{u(rng), u(rng), u(rng)};
  if (csa::norm(axis) < 1e-3) axis = {0, 0, 1};
  return csa::RigidTransform::axis_angle(axis, angle(rng), {shift(rng), shift(rng), shift(rng)});
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("csa_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Two-slope ramp with a little noise, shuffled.
inline std::vector<double> noisy_knee(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t knee = 2 + static_cast<std::size_t>(u(rng) * static_cast<double>(n - 4));
  const double low_slope = 0.001 * u(rng);
  const double high_slope = 0.05 + u(rng);
  const double noise = 0.01 * u(rng);
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double base = k < knee ? low_slope * k : low_slope * knee + high_slope * static_cast<double>(k - knee);
    d[k] = std::max(0.0, base + noise * (u(rng) - 0.5));
  }
  std::shuffle(d.begin(), d.end(), rng);
  return d;
}

/// Sphere with an equatorial contact band; the upper cap is the far side.
struct TwoCaps {
  csa::TriMesh sphere = csa::synth::icosphere(10.0, 3);
  std::vector<csa::FaceId> band;
  std::vector<csa::FaceId> near_cap;
  std::vector<csa::FaceId> far_cap;
  std::vector<double> distances;

  TwoCaps() {
    distances.resize(sphere.face_count());
    double top = 0.0;
    double bottom = 0.0;
    for (csa::FaceId f = 0; f < sphere.face_count(); ++f) {
      const double z = csa::face_centroid(sphere, f).z;
      top = std::max(top, z);
      bottom = std::min(bottom, z);
    }
    for (csa::FaceId f = 0; f < sphere.face_count(); ++f) {
      const double z = csa::face_centroid(sphere, f).z;
      if (std::abs(z) < 3.0) {
        band.push_back(f);
        distances[f] = 0.1;
      } else if (z > 0) {
        far_cap.push_back(f);
        distances[f] = 8.0 * z / top;
      } else {
        near_cap.push_back(f);
        distances[f] = 2.0 * z / bottom;
      }
    }
  }
};

}  // namespace fixture
