#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "nanophase/feature_matrix.hpp"
#include "nanophase/random.hpp"

namespace nanophase::detail {

/// k-means++ (D^2-weighted) choice of k distinct starting points.
inline std::vector<Point> seed_kmeanspp(const FeatureMatrix& data, std::size_t k, Rng& rng) {
  const std::size_t n = data.rows();
  std::vector<Point> centers;
  centers.reserve(k);
  centers.push_back(data.point(static_cast<std::size_t>(rng.below(n))));
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    const Point& last = centers.back();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double dist = 0.0;
      for (std::size_t d = 0; d < data.dim(); ++d) {
        const double diff = data(i, d) - last[d];
        dist += diff * diff;
      }
      d2[i] = std::min(d2[i], dist);
      total += d2[i];
    }
    std::size_t pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (target < acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng.below(n));
    }
    centers.push_back(data.point(pick));
  }
  return centers;
}

}  // namespace nanophase::detail
