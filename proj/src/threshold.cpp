#include <algorithm>
#include <cmath>
#include <limits>

#include "csa/engine.hpp"
#include "csa/parallel.hpp"

namespace csa {

namespace {

/// Running sums of y and x*y over 1-based ranks, for O(1) segment fits.
class SegmentSums {
 public:
  explicit SegmentSums(std::span<const double> y) : sy_(y.size() + 1, 0.0L), sxy_(y.size() + 1, 0.0L) {
    for (std::size_t k = 0; k < y.size(); ++k) {
      sy_[k + 1] = sy_[k] + y[k];
      sxy_[k + 1] = sxy_[k] + static_cast<long double>(k + 1) * y[k];
    }
  }

  /// Least-squares line over ranks [first, last] (1-based, inclusive).
  LineFit fit(std::size_t first, std::size_t last) const {
    const auto n = static_cast<long double>(last - first + 1);
    const long double sy = sy_[last] - sy_[first - 1];
    if (first == last) return {0.0, static_cast<double>(sy)};
    const long double sxy = sxy_[last] - sxy_[first - 1];
    const long double a = first;
    const long double b = last;
    const long double sx = (a + b) * n / 2.0L;
    const long double sxx = (square_sum(b) - square_sum(a - 1.0L));
    const long double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
    const long double intercept = (sy - slope * sx) / n;
    return {static_cast<double>(slope), static_cast<double>(intercept)};
  }

 private:
  static long double square_sum(long double m) { return m * (m + 1.0L) * (2.0L * m + 1.0L) / 6.0L; }

  std::vector<long double> sy_;
  std::vector<long double> sxy_;
};

}  // namespace

LineFit lsq_fit(std::span<const double> values, std::size_t first_rank) {
  if (values.empty()) return {};
  const SegmentSums sums(values);
  const LineFit local = sums.fit(1, values.size());
  // Shift from local ranks 1..n to first_rank..first_rank+n-1.
  const double shift = static_cast<double>(first_rank) - 1.0;
  return {local.slope, local.intercept - local.slope * shift};
}

ThresholdResult find_threshold(std::span<const double> distances, double cap_mm) {
  std::vector<double> sorted(distances.begin(), distances.end());
  std::sort(sorted.begin(), sorted.end());
  const auto below = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), cap_mm) - sorted.begin());
  if (below < 4) throw InsufficientContact(below);
  sorted.resize(below);

  const std::size_t count = below;
  const SegmentSums sums(sorted);

  ThresholdResult result;
  result.capped_count = count;
  result.cumulative_errors.assign(count - 2, 0.0);

  detail::parallel_for(count - 2, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t split = k + 2;
      const LineFit lower = sums.fit(1, split);
      const LineFit upper = sums.fit(split + 1, count);
      double error = 0.0;
      for (std::size_t j = 1; j <= split; ++j) error += std::abs(sorted[j - 1] - lower.at(static_cast<double>(j)));
      for (std::size_t j = split + 1; j <= count; ++j)
        error += std::abs(sorted[j - 1] - upper.at(static_cast<double>(j)));
      result.cumulative_errors[k] = error;
    }
  }, 64);

  const auto best = std::min_element(result.cumulative_errors.begin(), result.cumulative_errors.end());
  result.split_index = static_cast<std::size_t>(best - result.cumulative_errors.begin()) + 2;
  result.tau = sorted[result.split_index - 1];
  result.fit_lines = {sums.fit(1, result.split_index), sums.fit(result.split_index + 1, count)};
  result.sorted = std::move(sorted);
  return result;
}

std::vector<FaceId> define_csa(std::span<const double> distances, double tau) {
  // Symmetric faces often share tau exactly; after a rotation rounding can
  // split such a tie either way, so anything equal to tau up to rounding
  // counts as at tau and stays out.
  const double bound = tau - kTauTieTolerance * std::abs(tau);
  std::vector<FaceId> ids;
  for (std::size_t i = 0; i < distances.size(); ++i)
    if (distances[i] < bound) ids.push_back(static_cast<FaceId>(i));
  return ids;
}

}  // namespace csa
