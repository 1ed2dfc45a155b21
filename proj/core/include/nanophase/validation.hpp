#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nanophase/mixture.hpp"
#include "nanophase/stats.hpp"

namespace nanophase {

enum class ClusteringAlgorithm { Gmm, KMeans };

std::string_view to_string(ClusteringAlgorithm algorithm) noexcept;

struct CvConfig {
  std::size_t k_components = 3;
  std::vector<std::size_t> n_folds_range{2, 3, 4, 5, 6, 7};
  ClusteringAlgorithm algorithm = ClusteringAlgorithm::Gmm;
  std::uint64_t seed = 0;
  std::size_t size_step = 50;
  /// Sufficiency: every score at the largest size above min_score ...
  double min_score = 0.95;
  /// ... and the score standard deviation there below max_std.
  double max_std = 0.05;
  /// Used for the ground-truth fit and for every GMM fold fit.
  FitConfig fit;
  KMeansOptions kmeans;
  /// Worker threads for independent folds; 0 picks hardware concurrency.
  std::size_t threads = 0;

  /// Throws InputFormat when a fold count is below 2, size_step is 0 or the range is empty.
  void validate() const;
};

struct FoldSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded permutation cut into n_folds near-equal folds (sizes differ by at most one,
/// larger folds first). Fold f is the test set of split f. Indices are sorted.
std::vector<FoldSplit> kfold_split(std::size_t n, std::size_t n_folds, std::uint64_t seed);

/// Fits the full data with fit_em and labels every point with predict.
Labeling ground_truth_labels(const FeatureMatrix& data, std::size_t k_components, const FitConfig& fit);

struct FoldFailure {
  std::size_t n_folds = 0;
  std::size_t fold = 0;
  std::string reason;
};

struct FoldScores {
  /// Every successful fold score, pooled over the fold counts in order.
  std::vector<double> scores;
  /// Per fold count breakdown of the same scores.
  std::map<std::size_t, std::vector<double>> by_n_folds;
  std::vector<FoldFailure> failures;
};

/// For each fold count and fold: fit on the train split, label the test split, score
/// the adjusted Rand index against ground_truth restricted to the test indices.
FoldScores cross_validate(const FeatureMatrix& data, std::span<const int> ground_truth, const CvConfig& config,
                          std::uint64_t stream = 0);

/// Convenience overload computing the ground truth from the data first.
FoldScores cross_validate(const FeatureMatrix& data, const CvConfig& config);

struct SizeScores {
  std::size_t size = 0;
  FoldScores folds;
  double mean = 0.0;
  /// Population standard deviation of the pooled scores.
  double std_dev = 0.0;
  double min = 0.0;
};

struct CvReport {
  CvConfig config;
  std::size_t n_points = 0;
  std::vector<SizeScores> per_size;  // ascending size
  bool verdict = false;

  const SizeScores& largest() const { return per_size.back(); }
};

/// Sufficiency rule: min score above min_score, std below max_std, no failed folds.
bool sufficiency_verdict(const SizeScores& scores, double min_score, double max_std);

/// Sizes step, 2*step, ... up to N (or just N when step exceeds it). Subsamples are nested
/// prefixes of one seeded permutation; the ground truth is fitted once on the full data.
CvReport data_size_sweep(const FeatureMatrix& data, const CvConfig& config);

/// data_size_sweep at every candidate component count. Throws InputFormat for an empty list.
std::map<std::size_t, CvReport> cluster_count_scan(const FeatureMatrix& data, std::span<const std::size_t> k_list,
                                                   const CvConfig& config);

}  // namespace nanophase
