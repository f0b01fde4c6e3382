#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "csa/engine.hpp"
#include "csa/parallel.hpp"

namespace csa {

namespace {

constexpr std::size_t kBruteForceBelow = 256;
constexpr std::int64_t kMaxCells = std::int64_t{1} << 22;
constexpr double kTargetPerCell = 16.0;

/// Uniform grid over a point set, stored as a CSR bucket array.
class CentroidGrid {
 public:
  CentroidGrid(std::span<const Point3> points, double cell_size) {
    BoundingBox box{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity()},
                    {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                     -std::numeric_limits<double>::infinity()}};
    for (const Point3& p : points) {
      box.min = {std::min(box.min.x, p.x), std::min(box.min.y, p.y), std::min(box.min.z, p.z)};
      box.max = {std::max(box.max.x, p.x), std::max(box.max.y, p.y), std::max(box.max.z, p.z)};
    }
    origin_ = box.min;
    const Vec3 extent = box.max - box.min;

    cell_ = cell_size;
    while (cell_count(extent, cell_) > kMaxCells) cell_ *= 2.0;
    // Dense sets: refine the cap-sized cells while buckets stay crowded. The
    // ring search below keeps the result exact at any cell size.
    while (static_cast<double>(points.size()) / static_cast<double>(occupied_estimate(extent, cell_)) > kTargetPerCell &&
           cell_count(extent, cell_ / 2.0) <= kMaxCells &&
           axis_cells(std::max({extent.x, extent.y, extent.z}), cell_ / 2.0) <= 1024) {
      cell_ /= 2.0;
    }

    nx_ = axis_cells(extent.x, cell_);
    ny_ = axis_cells(extent.y, cell_);
    nz_ = axis_cells(extent.z, cell_);

    std::vector<std::uint32_t> cell_of(points.size());
    start_.assign(static_cast<std::size_t>(nx_ * ny_ * nz_) + 1, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto [cx, cy, cz] = coords(points[i]);
      cell_of[i] = static_cast<std::uint32_t>(flat(clamp(cx, nx_), clamp(cy, ny_), clamp(cz, nz_)));
      ++start_[cell_of[i] + 1];
    }
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
    points_.resize(points.size());
    std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i) points_[fill[cell_of[i]]++] = points[i];
  }

  double nearest_squared(const Point3& q) const {
    const auto [cx, cy, cz] = coords(q);
    double best = std::numeric_limits<double>::infinity();
    const double slack = 1e-9 * cell_ * static_cast<double>(std::abs(cx) + std::abs(cy) + std::abs(cz) + 1);
    for (std::int64_t k = 0;; ++k) {
      scan_shell(q, cx, cy, cz, k, best);
      const double reach = static_cast<double>(k) * cell_ - slack;
      if (reach > 0.0 && best <= reach * reach) return best;
      if (cx - k <= 0 && cy - k <= 0 && cz - k <= 0 && cx + k >= nx_ - 1 && cy + k >= ny_ - 1 && cz + k >= nz_ - 1)
        return best;
    }
  }

 private:
  struct Coords {
    std::int64_t x, y, z;
  };

  static std::int64_t axis_cells(double extent, double cell) {
    return static_cast<std::int64_t>(std::floor(extent / cell)) + 1;
  }

  static std::int64_t cell_count(const Vec3& extent, double cell) {
    const double n = static_cast<double>(axis_cells(extent.x, cell)) * static_cast<double>(axis_cells(extent.y, cell)) *
                     static_cast<double>(axis_cells(extent.z, cell));
    return n > static_cast<double>(kMaxCells) * 8.0 ? kMaxCells * 8 : static_cast<std::int64_t>(n);
  }

  // Surface-like point sets occupy roughly the cells of the two largest
  // bounding-box faces.
  static std::int64_t occupied_estimate(const Vec3& extent, double cell) {
    const std::int64_t a = axis_cells(extent.x, cell);
    const std::int64_t b = axis_cells(extent.y, cell);
    const std::int64_t c = axis_cells(extent.z, cell);
    return std::max<std::int64_t>(1, 2 * std::max({a * b, b * c, a * c}));
  }

  static std::int64_t clamp(std::int64_t v, std::int64_t n) { return std::clamp<std::int64_t>(v, 0, n - 1); }

  Coords coords(const Point3& p) const {
    return {static_cast<std::int64_t>(std::floor((p.x - origin_.x) / cell_)),
            static_cast<std::int64_t>(std::floor((p.y - origin_.y) / cell_)),
            static_cast<std::int64_t>(std::floor((p.z - origin_.z) / cell_))};
  }

  std::int64_t flat(std::int64_t x, std::int64_t y, std::int64_t z) const { return (z * ny_ + y) * nx_ + x; }

  void scan_cell(const Point3& q, std::int64_t x, std::int64_t y, std::int64_t z, double& best) const {
    const auto c = static_cast<std::size_t>(flat(x, y, z));
    for (std::uint32_t i = start_[c]; i < start_[c + 1]; ++i) best = std::min(best, squared_distance(q, points_[i]));
  }

  void scan_shell(const Point3& q, std::int64_t cx, std::int64_t cy, std::int64_t cz, std::int64_t k,
                  double& best) const {
    const std::int64_t x0 = std::max<std::int64_t>(cx - k, 0), x1 = std::min(cx + k, nx_ - 1);
    const std::int64_t y0 = std::max<std::int64_t>(cy - k, 0), y1 = std::min(cy + k, ny_ - 1);
    const std::int64_t z0 = std::max<std::int64_t>(cz - k, 0), z1 = std::min(cz + k, nz_ - 1);
    for (std::int64_t x = x0; x <= x1; ++x) {
      for (std::int64_t y = y0; y <= y1; ++y) {
        if (std::abs(x - cx) == k || std::abs(y - cy) == k) {
          for (std::int64_t z = z0; z <= z1; ++z) scan_cell(q, x, y, z, best);
        } else {
          if (cz - k >= z0 && cz - k <= z1) scan_cell(q, x, y, cz - k, best);
          if (k > 0 && cz + k >= z0 && cz + k <= z1) scan_cell(q, x, y, cz + k, best);
        }
      }
    }
  }

  Point3 origin_;
  double cell_ = 1.0;
  std::int64_t nx_ = 1, ny_ = 1, nz_ = 1;
  std::vector<std::uint32_t> start_;
  std::vector<Point3> points_;
};

bool first_is_small(std::span<const Point3> first, std::span<const Point3> second) {
  return first.size() <= second.size();
}

}  // namespace

DistanceVector min_distances_bruteforce(std::span<const Point3> first, std::span<const Point3> second) {
  DistanceVector out;
  out.small_is_first = first_is_small(first, second);
  const auto small = out.small_is_first ? first : second;
  const auto large = out.small_is_first ? second : first;
  out.distances.resize(small.size());
  detail::parallel_for(small.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const Point3& c : large) best = std::min(best, squared_distance(small[i], c));
      out.distances[i] = std::sqrt(best);
    }
  }, 64);
  return out;
}

DistanceVector min_distances(std::span<const Point3> first, std::span<const Point3> second, double cap_mm) {
  if (first.size() < kBruteForceBelow || second.size() < kBruteForceBelow || !(cap_mm > 0.0))
    return min_distances_bruteforce(first, second);

  DistanceVector out;
  out.small_is_first = first_is_small(first, second);
  const auto small = out.small_is_first ? first : second;
  const auto large = out.small_is_first ? second : first;

  const CentroidGrid grid(large, cap_mm);
  out.distances.resize(small.size());
  detail::parallel_for(small.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out.distances[i] = std::sqrt(grid.nearest_squared(small[i]));
  }, 256);
  return out;
}

}  // namespace csa
