#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nanophase/feature_matrix.hpp"

namespace nanophase {

struct NormalityResult {
  double w_statistic = 0.0;
  double p_value = 0.0;
  std::size_t n = 0;

  /// Normality is accepted when p exceeds alpha.
  bool accepts_normality(double alpha = 0.05) const noexcept { return p_value > alpha; }
};

/// Shapiro-Wilk W and p-value via Royston's AS R94 approximation.
/// Throws UnsupportedSize outside 3 <= n <= 5000 and DegenerateSample for a constant series.
NormalityResult shapiro_wilk(std::span<const double> series);

/// Standard normal quantile (AS 241, about 1e-16 relative accuracy).
double normal_quantile(double p);

/// Upper tail probability P(Z > z) of the standard normal.
double normal_upper_tail(double z);

/// Cluster assignment, one label per point, values in [0, k).
struct Labeling {
  std::vector<int> labels;
  std::size_t k = 0;

  std::size_t size() const noexcept { return labels.size(); }
};

struct KMeansOptions {
  std::size_t max_iterations = 300;
  /// Scale each feature to unit variance before clustering; centroids are reported in raw units.
  bool standardize = false;
};

struct KMeansResult {
  Labeling labeling;
  std::vector<Point> centroids;
  /// Sum of squared distances to the assigned centroid, after each assignment pass.
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
  std::size_t reseeds = 0;
  /// Per-feature divisor applied before distances are taken (1 unless standardized).
  Point feature_scale{1.0, 1.0};
};

/// Lloyd's algorithm from k-means++ seeding; deterministic for a fixed seed.
/// Empty clusters are re-seeded at the point farthest from its centroid.
KMeansResult kmeans(const FeatureMatrix& data, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {});

/// Nearest-centroid labels for new points, using the fit's feature scaling. Ties go to the lower index.
std::vector<int> kmeans_assign(const KMeansResult& fit, const FeatureMatrix& data);

/// Permutation-model adjusted Rand index. Identical trivial partitions score 1.
/// Throws InputFormat for unequal lengths or fewer than two points.
double adjusted_rand(std::span<const int> a, std::span<const int> b);
double adjusted_rand(const Labeling& a, const Labeling& b);

}  // namespace nanophase
