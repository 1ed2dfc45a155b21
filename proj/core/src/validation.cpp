#include "nanophase/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "nanophase/error.hpp"
#include "nanophase/random.hpp"
#include "parallel.hpp"

namespace nanophase {
namespace {

constexpr std::uint64_t kSubsampleStream = 0x5ab5a3b1e;

bool recoverable(ErrorKind kind) {
  return kind == ErrorKind::NumericalDegeneracy || kind == ErrorKind::InsufficientData ||
         kind == ErrorKind::EmptyComponent;
}

struct FoldOutcome {
  std::optional<double> score;
  std::string failure;
};

FoldOutcome score_fold(const FeatureMatrix& data, std::span<const int> truth, const FoldSplit& split,
                       const CvConfig& config, std::uint64_t seed) {
  if (split.test.size() < 2) return {std::nullopt, "test fold has fewer than two points"};
  const FeatureMatrix train = data.select(split.train);
  const FeatureMatrix test = data.select(split.test);
  std::vector<int> predicted;
  try {
    if (config.algorithm == ClusteringAlgorithm::Gmm) {
      FitConfig fit = config.fit;
      fit.seed = seed;
      predicted = predict_labels(fit_em(train, config.k_components, fit).model, test);
    } else {
      predicted = kmeans_assign(kmeans(train, config.k_components, seed, config.kmeans), test);
    }
  } catch (const Error& e) {
    if (!recoverable(e.kind())) throw;
    return {std::nullopt, e.what()};
  }
  std::vector<int> expected;
  expected.reserve(split.test.size());
  for (std::size_t i : split.test) expected.push_back(truth[i]);
  return {adjusted_rand(expected, predicted), {}};
}

void summarize(SizeScores& s) {
  const auto& v = s.folds.scores;
  if (v.empty()) return;
  const double n = static_cast<double>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double sq = 0.0;
  for (double x : v) sq += (x - s.mean) * (x - s.mean);
  s.std_dev = std::sqrt(sq / n);
  s.min = *std::min_element(v.begin(), v.end());
}

}  // namespace

std::string_view to_string(ClusteringAlgorithm algorithm) noexcept {
  return algorithm == ClusteringAlgorithm::Gmm ? "gmm" : "kmeans";
}

void CvConfig::validate() const {
  if (n_folds_range.empty()) throw Error(ErrorKind::InputFormat, "fold range is empty");
  for (std::size_t f : n_folds_range)
    if (f < 2) throw Error(ErrorKind::InputFormat, "every fold count must be at least 2");
  if (size_step < 1) throw Error(ErrorKind::InputFormat, "size step must be at least 1");
  if (k_components < 1) throw Error(ErrorKind::InputFormat, "k_components must be at least 1");
}

std::vector<FoldSplit> kfold_split(std::size_t n, std::size_t n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw Error(ErrorKind::InputFormat, "need at least two folds");
  if (n < n_folds) {
    throw Error(ErrorKind::InputFormat,
                std::to_string(n) + " points cannot be split into " + std::to_string(n_folds) + " folds");
  }
  Rng rng(seed);
  const auto perm = rng.permutation(n);
  const std::size_t base = n / n_folds;
  const std::size_t extra = n % n_folds;

  std::vector<std::size_t> fold_of(n);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < n_folds; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    for (std::size_t i = 0; i < len; ++i) fold_of[perm[pos++]] = f;
  }
  std::vector<FoldSplit> splits(n_folds);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < n_folds; ++f) {
      (fold_of[i] == f ? splits[f].test : splits[f].train).push_back(i);
    }
  }
  return splits;
}

Labeling ground_truth_labels(const FeatureMatrix& data, std::size_t k_components, const FitConfig& fit) {
  const FitResult result = fit_em(data, k_components, fit);
  return Labeling{predict_labels(result.model, data), k_components};
}

FoldScores cross_validate(const FeatureMatrix& data, std::span<const int> ground_truth, const CvConfig& config,
                          std::uint64_t stream) {
  config.validate();
  if (ground_truth.size() != data.rows()) throw Error(ErrorKind::InputFormat, "ground truth length mismatch");
  const std::size_t most = *std::max_element(config.n_folds_range.begin(), config.n_folds_range.end());
  if (data.rows() < most) {
    throw Error(ErrorKind::InsufficientData, "need at least " + std::to_string(most) + " points for cross-validation");
  }

  struct Unit {
    std::size_t n_folds, fold;
    const FoldSplit* split;
  };
  std::vector<std::vector<FoldSplit>> splits;
  for (std::size_t f : config.n_folds_range) {
    splits.push_back(kfold_split(data.rows(), f, derive_seed(config.seed, {stream, f})));
  }
  std::vector<Unit> units;
  for (std::size_t s = 0; s < splits.size(); ++s)
    for (std::size_t fold = 0; fold < splits[s].size(); ++fold)
      units.push_back({config.n_folds_range[s], fold, &splits[s][fold]});

  std::vector<FoldOutcome> outcomes(units.size());
  detail::parallel_for(units.size(), config.threads, [&](std::size_t u) {
    const Unit& unit = units[u];
    outcomes[u] = score_fold(data, ground_truth, *unit.split, config,
                             derive_seed(config.seed, {stream, unit.n_folds, unit.fold, 1}));
  });

  FoldScores result;
  for (std::size_t u = 0; u < units.size(); ++u) {
    if (outcomes[u].score) {
      result.scores.push_back(*outcomes[u].score);
      result.by_n_folds[units[u].n_folds].push_back(*outcomes[u].score);
    } else {
      result.failures.push_back({units[u].n_folds, units[u].fold, outcomes[u].failure});
    }
  }
  return result;
}

FoldScores cross_validate(const FeatureMatrix& data, const CvConfig& config) {
  config.validate();
  FitConfig fit = config.fit;
  fit.seed = config.seed;
  const Labeling truth = ground_truth_labels(data, config.k_components, fit);
  return cross_validate(data, truth.labels, config);
}

bool sufficiency_verdict(const SizeScores& s, double min_score, double max_std) {
  if (s.folds.scores.empty() || !s.folds.failures.empty()) return false;
  return s.min > min_score && s.std_dev < max_std;
}

CvReport data_size_sweep(const FeatureMatrix& data, const CvConfig& config) {
  config.validate();
  const std::size_t n = data.rows();
  if (n == 0) throw Error(ErrorKind::EmptyInput, "no data points");

  FitConfig fit = config.fit;
  fit.seed = config.seed;
  const Labeling truth = ground_truth_labels(data, config.k_components, fit);

  std::vector<std::size_t> sizes;
  for (std::size_t s = config.size_step; s <= n; s += config.size_step) sizes.push_back(s);
  if (sizes.empty()) sizes.push_back(n);

  Rng rng(derive_seed(config.seed, {kSubsampleStream}));
  const auto order = rng.permutation(n);

  CvReport report;
  report.config = config;
  report.n_points = n;
  for (std::size_t size : sizes) {
    std::vector<std::size_t> idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(size));
    std::vector<int> sub_truth;
    sub_truth.reserve(size);
    for (std::size_t i : idx) sub_truth.push_back(truth.labels[i]);
    SizeScores entry;
    entry.size = size;
    entry.folds = cross_validate(data.select(idx), sub_truth, config, size);
    summarize(entry);
    report.per_size.push_back(std::move(entry));
  }
  report.verdict = sufficiency_verdict(report.largest(), config.min_score, config.max_std);
  return report;
}

std::map<std::size_t, CvReport> cluster_count_scan(const FeatureMatrix& data, std::span<const std::size_t> k_list,
                                                   const CvConfig& config) {
  if (k_list.empty()) throw Error(ErrorKind::InputFormat, "candidate component list is empty");
  std::map<std::size_t, CvReport> out;
  for (std::size_t k : k_list) {
    CvConfig c = config;
    c.k_components = k;
    out.emplace(k, data_size_sweep(data, c));
  }
  return out;
}

}  // namespace nanophase
