#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nanophase/feature_matrix.hpp"

namespace nanophase {

/// Symmetric 2x2 covariance. One-dimensional components use `xx` only.
struct Covariance {
  double xx = 1.0;
  double xy = 0.0;
  double yy = 1.0;

  static Covariance scalar(double variance) { return {variance, 0.0, 0.0}; }
  friend bool operator==(const Covariance&, const Covariance&) = default;
};

struct GaussianComponent {
  double weight = 1.0;
  Point mean{0.0, 0.0};
  Covariance covariance;

  friend bool operator==(const GaussianComponent&, const GaussianComponent&) = default;
};

/// k weighted Gaussian components in one or two dimensions.
///
/// Construction validates: dimension in {1, 2}, k >= 1, weights in (0, 1]
/// summing to one within 1e-12, and positive definite covariances.
class MixtureModel {
 public:
  static constexpr double kWeightSumTolerance = 1e-12;

  MixtureModel(std::size_t dim, std::vector<GaussianComponent> components);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return components_.size(); }
  const std::vector<GaussianComponent>& components() const noexcept { return components_; }
  const GaussianComponent& operator[](std::size_t j) const { return components_[j]; }

  /// Components reordered by ascending first-coordinate mean (stable).
  MixtureModel sorted_by_first_mean() const;
  /// Permutation that sorted_by_first_mean() applies: new j -> old index.
  std::vector<std::size_t> first_mean_order() const;

  friend bool operator==(const MixtureModel&, const MixtureModel&) = default;

 private:
  std::size_t dim_;
  std::vector<GaussianComponent> components_;
};

/// Row-major N x k matrix of posterior membership probabilities.
class Responsibilities {
 public:
  Responsibilities() = default;
  Responsibilities(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }

  Responsibilities permuted_columns(std::span<const std::size_t> order) const;

  friend bool operator==(const Responsibilities&, const Responsibilities&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

enum class CovarianceType { Full, Diagonal };

struct FitConfig {
  double tolerance = 1e-6;        // absolute change in ln L between iterations
  std::size_t max_iterations = 500;
  std::size_t n_restarts = 10;
  std::uint64_t seed = 0;
  double regularization = 1e-6;   // added to covariance diagonals every M step
  CovarianceType covariance_type = CovarianceType::Full;
  std::size_t max_reseeds = 3;    // empty-component re-seeds tolerated per run
};

struct FitResult {
  MixtureModel model;
  double log_likelihood = 0.0;
  Responsibilities responsibilities;
  std::size_t n_iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  double bic = 0.0;
  int param_count = 0;
  std::size_t n_points = 0;
  /// ln L evaluated at the start of each iteration of the winning restart.
  std::vector<double> log_likelihood_trace;
  /// Iterations (indices into the trace) right after an empty-component re-seed.
  std::vector<std::size_t> reseed_iterations;
  std::size_t restarts_run = 0;
  std::size_t restarts_degenerate = 0;
};

/// Multivariate normal density at x. Weight is not applied.
/// Throws NumericalDegeneracy for a covariance that is not positive definite.
double gaussian_density(const Point& x, const GaussianComponent& component, std::size_t dim);

/// ln of the normal density; same contract as gaussian_density.
double gaussian_log_density(const Point& x, const GaussianComponent& component, std::size_t dim);

/// Sum over points of ln sum_j alpha_j N(x_i | component j), with log-sum-exp per point.
double log_likelihood(const FeatureMatrix& data, const MixtureModel& model);

/// Posterior p(j | x_i) for every point and component.
Responsibilities e_step(const FeatureMatrix& data, const MixtureModel& model);

struct MStepOptions {
  double regularization = 1e-6;
  CovarianceType covariance_type = CovarianceType::Full;
};

/// Weighted mean, maximum-likelihood (divide by effective count) covariance
/// plus the regularization floor, and weights = effective count / N.
/// Throws EmptyComponent when a component's effective count is below 1e-8.
MixtureModel m_step(const FeatureMatrix& data, const Responsibilities& resp, const MStepOptions& options = {});

/// Expectation-maximization with restarts; returns the restart with the highest final ln L.
/// Components of the result are ordered by ascending first-coordinate mean.
FitResult fit_em(const FeatureMatrix& data, std::size_t k_components, const FitConfig& config = {});

struct Prediction {
  std::size_t component = 0;
  std::vector<double> posterior;
};

/// Most probable component for a point; ties go to the lower index.
Prediction predict(const MixtureModel& model, const Point& point);

/// Hard assignments for every row.
std::vector<int> predict_labels(const MixtureModel& model, const FeatureMatrix& data);

struct MixtureSample {
  FeatureMatrix points;
  /// Generating component of each point.
  std::vector<int> components;
};

/// Draws n points: component by weight, then a Gaussian draw. Deterministic per seed.
MixtureSample sample(const MixtureModel& model, std::size_t n, std::uint64_t seed);

}  // namespace nanophase
