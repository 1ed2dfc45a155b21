#include <cmath>
#include <limits>
#include <vector>

#include "nanophase/error.hpp"
#include "nanophase/random.hpp"
#include "nanophase/stats.hpp"
#include "seeding.hpp"

namespace nanophase {
namespace {

double squared_distance(const FeatureMatrix& data, std::size_t i, const Point& c) {
  double s = 0.0;
  for (std::size_t d = 0; d < data.dim(); ++d) {
    const double diff = data(i, d) - c[d];
    s += diff * diff;
  }
  return s;
}

// Assigns every row to its nearest center; returns the objective.
double assign(const FeatureMatrix& data, const std::vector<Point>& centers, std::vector<int>& labels) {
  double objective = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_j = 0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      const double d = squared_distance(data, i, centers[j]);
      if (d < best) {
        best = d;
        best_j = static_cast<int>(j);
      }
    }
    labels[i] = best_j;
    objective += best;
  }
  return objective;
}

FeatureMatrix rescale(const FeatureMatrix& data, const Point& scale) {
  FeatureMatrix out = data;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t d = 0; d < out.dim(); ++d) out(i, d) /= scale[d];
  return out;
}

}  // namespace

KMeansResult kmeans(const FeatureMatrix& data, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
  const std::size_t n = data.rows();
  if (k < 1) throw Error(ErrorKind::InputFormat, "k must be at least 1");
  if (n < k) throw Error(ErrorKind::InsufficientData, "kmeans needs at least k points");

  KMeansResult result;
  if (options.standardize) {
    for (std::size_t d = 0; d < data.dim(); ++d) {
      double mean = 0.0, sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += data(i, d);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) sq += (data(i, d) - mean) * (data(i, d) - mean);
      const double sd = std::sqrt(sq / static_cast<double>(n));
      result.feature_scale[d] = sd > 0.0 ? sd : 1.0;
    }
  }
  const FeatureMatrix work = rescale(data, result.feature_scale);

  Rng rng(seed);
  std::vector<Point> centers = detail::seed_kmeanspp(work, k, rng);
  std::vector<int> labels(n, -1);
  std::vector<int> previous;

  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    previous = labels;
    result.objective_trace.push_back(assign(work, centers, labels));
    result.iterations = iter + 1;
    if (labels == previous) break;

    std::vector<Point> sums(k, Point{0.0, 0.0});
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = static_cast<std::size_t>(labels[i]);
      ++counts[j];
      for (std::size_t d = 0; d < work.dim(); ++d) sums[j][d] += work(i, d);
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] == 0) continue;
      for (std::size_t d = 0; d < work.dim(); ++d) centers[j][d] = sums[j][d] / static_cast<double>(counts[j]);
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] != 0) continue;
      // Re-seed at the point lying farthest from its own centroid.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = squared_distance(work, i, centers[static_cast<std::size_t>(labels[i])]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centers[j] = work.point(far);
      --counts[static_cast<std::size_t>(labels[far])];
      labels[far] = static_cast<int>(j);
      counts[j] = 1;
      ++result.reseeds;
    }
  }

  result.labeling = Labeling{std::move(labels), k};
  result.centroids = centers;
  for (auto& c : result.centroids)
    for (std::size_t d = 0; d < data.dim(); ++d) c[d] *= result.feature_scale[d];
  return result;
}

std::vector<int> kmeans_assign(const KMeansResult& fit, const FeatureMatrix& data) {
  std::vector<Point> centers = fit.centroids;
  for (auto& c : centers)
    for (std::size_t d = 0; d < data.dim(); ++d) c[d] /= fit.feature_scale[d];
  std::vector<int> labels(data.rows(), 0);
  assign(rescale(data, fit.feature_scale), centers, labels);
  return labels;
}

}  // namespace nanophase
